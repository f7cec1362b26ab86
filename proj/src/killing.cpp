#include "kintegra/killing.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kintegra {

Eigen::VectorXd KillingVector::value_at(std::span<const double> x) const {
  const int n = space_.dim();
  if (static_cast<int>(x.size()) != n)
    throw std::invalid_argument("KillingVector: coordinate count mismatch");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  switch (kind_) {
    case Kind::Translation:
      v(i_) = 1.0;
      break;
    case Kind::Rotation:
      v(j_) = x[i_];
      v(i_) = -x[j_];
      break;
    case Kind::Boost:
      v(j_) = x[i_];
      v(i_) = x[j_];
      break;
    case Kind::SphereRotation: {
      // pushforward of the ambient rotation mixing chart axis i with the pole axis
      const double r = space_.radius();
      double x2 = 0.0;
      for (double c : x) x2 += c * c;
      for (int k = 0; k < n; ++k)
        v(k) = ((k == i_ ? r * r - x2 : 0.0) + 2.0 * x[i_] * x[k]) / (2.0 * r);
      break;
    }
    case Kind::HyperbolicBoost: {
      const double r = space_.radius();
      double x2 = 0.0;
      for (double c : x) x2 += c * c;
      for (int k = 0; k < n; ++k)
        v(k) = ((k == i_ ? r * r + x2 : 0.0) - 2.0 * x[i_] * x[k]) / (2.0 * r);
      break;
    }
  }
  return v;
}

Eigen::MatrixXd KillingVector::jacobian_at(std::span<const double> x) const {
  const int n = space_.dim();
  if (static_cast<int>(x.size()) != n)
    throw std::invalid_argument("KillingVector: coordinate count mismatch");
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  switch (kind_) {
    case Kind::Translation:
      break;
    case Kind::Rotation:
      j(j_, i_) = 1.0;
      j(i_, j_) = -1.0;
      break;
    case Kind::Boost:
      j(j_, i_) = 1.0;
      j(i_, j_) = 1.0;
      break;
    case Kind::SphereRotation: {
      const double r = space_.radius();
      for (int k = 0; k < n; ++k)
        for (int nu = 0; nu < n; ++nu)
          j(k, nu) = (-(k == i_ ? x[nu] : 0.0) + (i_ == nu ? x[k] : 0.0) + (k == nu ? x[i_] : 0.0)) / r;
      break;
    }
    case Kind::HyperbolicBoost: {
      const double r = space_.radius();
      for (int k = 0; k < n; ++k)
        for (int nu = 0; nu < n; ++nu)
          j(k, nu) = ((k == i_ ? x[nu] : 0.0) - (i_ == nu ? x[k] : 0.0) - (k == nu ? x[i_] : 0.0)) / r;
      break;
    }
  }
  return j;
}

std::vector<KillingVector> killing_generators(const MetricField& space) {
  using Kind = KillingVector::Kind;
  const int n = space.dim();
  std::vector<KillingVector> out;
  auto add = [&](Kind kind, int i, int j, std::string name) {
    out.push_back(KillingVector(kind, i, j, space, std::move(name)));
  };
  switch (space.kind()) {
    case MetricKind::Euclidean:
      for (int i = 0; i < n; ++i) add(Kind::Translation, i, 0, "T" + std::to_string(i + 1));
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          add(Kind::Rotation, i, j, "R" + std::to_string(i + 1) + std::to_string(j + 1));
      break;
    case MetricKind::Minkowski: {
      const int p = space.signature().plus;
      for (int i = 0; i < n; ++i) add(Kind::Translation, i, 0, "T" + std::to_string(i + 1));
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          const bool same_sign = (i < p) == (j < p);
          const std::string nm = std::to_string(i + 1) + std::to_string(j + 1);
          if (same_sign)
            add(Kind::Rotation, i, j, "R" + nm);
          else
            add(Kind::Boost, i, j, "B" + nm);
        }
      break;
    }
    case MetricKind::SphereStereographic:
      for (int i = 0; i < n; ++i)
        add(Kind::SphereRotation, i, 0, "R" + std::to_string(i + 1) + std::to_string(n + 1));
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          add(Kind::Rotation, i, j, "R" + std::to_string(i + 1) + std::to_string(j + 1));
      break;
    case MetricKind::HyperbolicBall:
      for (int i = 0; i < n; ++i)
        add(Kind::HyperbolicBoost, i, 0, "B" + std::to_string(i + 1) + std::to_string(n + 1));
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          add(Kind::Rotation, i, j, "R" + std::to_string(i + 1) + std::to_string(j + 1));
      break;
    case MetricKind::Expression:
      throw std::invalid_argument("killing_generators: no generator catalog for expression metrics");
  }
  return out;
}

std::optional<KillingVector> find_generator(const MetricField& space, std::string_view name) {
  for (KillingVector& v : killing_generators(space))
    if (v.name() == name) return std::move(v);
  return std::nullopt;
}

DenseTensor killing_vector_residual(const KillingVector& v, const ChartPoint& p) {
  const MetricField& m = v.space();
  const int n = m.dim();
  const DenseTensor g = m.metric_at(p);
  const DenseTensor dg = m.metric_partials_at(p);
  const DenseTensor gamma = m.christoffel_at(p);
  const Eigen::VectorXd vu = v.value_at(p.coords);
  const Eigen::MatrixXd ju = v.jacobian_at(p.coords);
  // V_b and d_a V_b by the product rule through the lowering
  Eigen::VectorXd vl = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd dl = Eigen::MatrixXd::Zero(n, n);  // (b, a) = d_a V_b
  for (int b = 0; b < n; ++b)
    for (int mu = 0; mu < n; ++mu) {
      vl(b) += g(b, mu) * vu(mu);
      for (int a = 0; a < n; ++a) dl(b, a) += dg(b, mu, a) * vu(mu) + g(b, mu) * ju(mu, a);
    }
  DenseTensor r(n, {Variance::Covariant, Variance::Covariant});
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      double val = dl(b, a) + dl(a, b);
      for (int d = 0; d < n; ++d) val -= 2.0 * gamma(d, a, b) * vl(d);
      r(a, b) = val;
      r(b, a) = val;
    }
  r.declare_symmetry({0, 1, SymmetryKind::Symmetric});
  return r;
}

DenseTensor symmetric_product(const KillingVector& v, const KillingVector& w, const ChartPoint& p) {
  if (!(v.space() == w.space()))
    throw std::invalid_argument("symmetric_product: generators live on different spaces");
  const MetricField& m = v.space();
  const int n = m.dim();
  const DenseTensor g = m.metric_at(p);
  const Eigen::VectorXd vu = v.value_at(p.coords);
  const Eigen::VectorXd wu = w.value_at(p.coords);
  Eigen::VectorXd vl = Eigen::VectorXd::Zero(n), wl = Eigen::VectorXd::Zero(n);
  for (int a = 0; a < n; ++a)
    for (int mu = 0; mu < n; ++mu) {
      vl(a) += g(a, mu) * vu(mu);
      wl(a) += g(a, mu) * wu(mu);
    }
  DenseTensor k(n, {Variance::Covariant, Variance::Covariant});
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      const double val = 0.5 * (vl(a) * wl(b) + vl(b) * wl(a));
      k(a, b) = val;
      k(b, a) = val;
    }
  k.declare_symmetry({0, 1, SymmetryKind::Symmetric});
  return k;
}

KillingTensorField::KillingTensorField(MetricField space, std::vector<Term> terms)
    : space_(std::move(space)), terms_(std::move(terms)) {
  for (const Term& t : terms_)
    if (!(t.v.space() == space_) || !(t.w.space() == space_))
      throw std::invalid_argument("KillingTensorField: term generators live on a different space");
}

DenseTensor KillingTensorField::value_at(const ChartPoint& p) const {
  const int n = space_.dim();
  DenseTensor k(n, {Variance::Covariant, Variance::Covariant});
  for (const Term& t : terms_) {
    const DenseTensor prod = symmetric_product(t.v, t.w, p);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) k(a, b) += t.coeff * prod(a, b);
  }
  k.declare_symmetry({0, 1, SymmetryKind::Symmetric});
  return k;
}

DenseTensor KillingTensorField::partials_at(const ChartPoint& p) const {
  const int n = space_.dim();
  const DenseTensor g = space_.metric_at(p);
  const DenseTensor dg = space_.metric_partials_at(p);
  DenseTensor dk(n, {Variance::Covariant, Variance::Covariant, Variance::Covariant});
  for (const Term& t : terms_) {
    const Eigen::VectorXd vu = t.v.value_at(p.coords);
    const Eigen::VectorXd wu = t.w.value_at(p.coords);
    const Eigen::MatrixXd jv = t.v.jacobian_at(p.coords);
    const Eigen::MatrixXd jw = t.w.jacobian_at(p.coords);
    Eigen::VectorXd vl = Eigen::VectorXd::Zero(n), wl = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd dvl = Eigen::MatrixXd::Zero(n, n), dwl = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < n; ++a)
      for (int mu = 0; mu < n; ++mu) {
        vl(a) += g(a, mu) * vu(mu);
        wl(a) += g(a, mu) * wu(mu);
        for (int c = 0; c < n; ++c) {
          dvl(a, c) += dg(a, mu, c) * vu(mu) + g(a, mu) * jv(mu, c);
          dwl(a, c) += dg(a, mu, c) * wu(mu) + g(a, mu) * jw(mu, c);
        }
      }
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          const double val = 0.5 * t.coeff *
                             (dvl(a, c) * wl(b) + vl(a) * dwl(b, c) +
                              dvl(b, c) * wl(a) + vl(b) * dwl(a, c));
          dk(a, b, c) += val;
          if (a != b) dk(b, a, c) += val;
        }
  }
  dk.declare_symmetry({0, 1, SymmetryKind::Symmetric});
  return dk;
}

std::vector<KillingTensorField> killing_basis(const MetricField& space) {
  const std::vector<KillingVector> gens = killing_generators(space);
  std::vector<KillingTensorField> out;
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i; j < gens.size(); ++j)
      out.push_back(KillingTensorField(space, {{1.0, gens[i], gens[j]}}));
  return out;
}

DenseTensor killing_residual(const SymmetricTensorField& k, const MetricField& m,
                             const ChartPoint& p) {
  const int n = m.dim();
  const DenseTensor d = covariant_derivative_sym2(k, m, p);
  // cyclic sum of an (a,b)-symmetric tensor is totally symmetric; assemble
  // each orbit once so the symmetry holds bitwise
  DenseTensor r(n, {Variance::Covariant, Variance::Covariant, Variance::Covariant});
  static constexpr int perm[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1},
                                     {1, 0, 2}, {0, 2, 1}, {2, 1, 0}};
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b)
      for (int c = b; c < n; ++c) {
        const double v = d(a, b, c) + d(b, c, a) + d(c, a, b);
        const int tri[3] = {a, b, c};
        for (const auto& pm : perm)
          r(tri[pm[0]], tri[pm[1]], tri[pm[2]]) = v;
      }
  r.declare_symmetry({0, 1, SymmetryKind::Symmetric});
  r.declare_symmetry({1, 2, SymmetryKind::Symmetric});
  return r;
}

double killing_residual_relative(const SymmetricTensorField& k, const MetricField& m,
                                 const ChartPoint& p) {
  const DenseTensor d = covariant_derivative_sym2(k, m, p);
  const double dnorm = d.max_abs();
  if (dnorm <= covariant_zero_floor(k, m, p)) return 0.0;  // parallel field
  const DenseTensor r = killing_residual(k, m, p);
  return r.max_abs() / dnorm;
}

namespace {

struct Token {
  std::string_view text;
  std::size_t offset;
};

std::vector<Token> tokenize_line(std::string_view line, std::size_t base) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    out.push_back({line.substr(i, j - i), base + i});
    i = j;
  }
  return out;
}

}  // namespace

KillingTensorField killing_field_from_text(const MetricField& space, std::string_view text) {
  std::vector<KillingTensorField::Term> terms;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(pos, nl - pos);
    const std::size_t base = pos;
    pos = nl + 1;

    const std::vector<Token> toks = tokenize_line(line, base);
    if (toks.empty() || toks[0].text[0] == '#') {
      if (nl == text.size()) break;
      continue;
    }
    if (toks[0].text != "term")
      throw ParseError("expected 'term <coeff> <generator> <generator>'", toks[0].offset);
    if (toks.size() != 4)
      throw ParseError("term lines take a coefficient and two generator names",
                       toks.size() > 1 ? toks[1].offset : toks[0].offset);
    double coeff = 0.0;
    auto [p, ec] = std::from_chars(toks[1].text.data(), toks[1].text.data() + toks[1].text.size(), coeff);
    if (ec != std::errc() || p != toks[1].text.data() + toks[1].text.size())
      throw ParseError("malformed coefficient", toks[1].offset);
    auto lookup = [&](const Token& t) {
      std::optional<KillingVector> v = find_generator(space, t.text);
      if (!v)
        throw ParseError("unknown generator '" + std::string(t.text) + "' for this space", t.offset);
      return *std::move(v);
    };
    KillingVector v = lookup(toks[2]);
    KillingVector w = lookup(toks[3]);
    terms.push_back({coeff, std::move(v), std::move(w)});
    if (nl == text.size()) break;
  }
  if (terms.empty()) throw ParseError("killing field file holds no terms", text.size());
  return KillingTensorField(space, std::move(terms));
}

KillingTensorField killing_field_from_file(const MetricField& space, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open killing field file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return killing_field_from_text(space, ss.str());
}

}  // namespace kintegra
