#include "kintegra/metric.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace kintegra {

namespace {

constexpr double kHyperbolicMargin = 1e-6;  // keep FD stencils and inverses finite

double fd_step(double coord) {
  static const double h0 = std::cbrt(std::numeric_limits<double>::epsilon());
  return h0 * (1.0 + std::abs(coord));
}

}  // namespace

MetricField MetricField::euclidean(int dim) {
  if (dim < 2 || dim > 8) throw std::invalid_argument("euclidean: dim must be in 2..8");
  MetricField m;
  m.kind_ = MetricKind::Euclidean;
  m.dim_ = dim;
  m.sig_ = {dim, 0};
  return m;
}

MetricField MetricField::minkowski(Signature sig) {
  if (sig.dim() < 2 || sig.dim() > 8 || sig.plus < 0 || sig.minus < 1)
    throw std::invalid_argument("minkowski: signature needs dim 2..8 with at least one minus");
  MetricField m;
  m.kind_ = MetricKind::Minkowski;
  m.dim_ = sig.dim();
  m.sig_ = sig;
  return m;
}

MetricField MetricField::sphere_stereographic(int dim, double radius) {
  if (dim < 2 || dim > 8) throw std::invalid_argument("sphere_stereographic: dim must be in 2..8");
  if (!(radius > 0)) throw std::invalid_argument("sphere_stereographic: radius must be positive");
  MetricField m;
  m.kind_ = MetricKind::SphereStereographic;
  m.dim_ = dim;
  m.sig_ = {dim, 0};
  m.radius_ = radius;
  return m;
}

MetricField MetricField::hyperbolic_ball(int dim, double radius) {
  if (dim < 2 || dim > 8) throw std::invalid_argument("hyperbolic_ball: dim must be in 2..8");
  if (!(radius > 0)) throw std::invalid_argument("hyperbolic_ball: radius must be positive");
  MetricField m;
  m.kind_ = MetricKind::HyperbolicBall;
  m.dim_ = dim;
  m.sig_ = {dim, 0};
  m.radius_ = radius;
  return m;
}

MetricField MetricField::expression(int dim, std::vector<std::vector<Expr>> upper,
                                    std::optional<Signature> sig) {
  if (dim < 2 || dim > 8) throw std::invalid_argument("expression metric: dim must be in 2..8");
  if (static_cast<int>(upper.size()) != dim)
    throw std::invalid_argument("expression metric: need one row per dimension");
  for (int i = 0; i < dim; ++i) {
    if (static_cast<int>(upper[i].size()) != dim - i)
      throw std::invalid_argument("expression metric: row " + std::to_string(i + 1) +
                                  " must hold entries g[i][i..dim]");
    for (const Expr& e : upper[i]) {
      if (e.empty()) throw std::invalid_argument("expression metric: missing entry");
      if (e.max_var_index() > dim)
        throw std::invalid_argument("expression metric: entry references x" +
                                    std::to_string(e.max_var_index()) + " beyond dim");
    }
  }
  MetricField m;
  m.kind_ = MetricKind::Expression;
  m.dim_ = dim;
  m.sig_ = sig.value_or(Signature{dim, 0});
  if (m.sig_.dim() != dim) throw std::invalid_argument("expression metric: signature does not match dim");
  m.upper_ = std::move(upper);
  return m;
}

bool MetricField::operator==(const MetricField& o) const {
  if (kind_ != o.kind_ || dim_ != o.dim_ || !(sig_ == o.sig_) || radius_ != o.radius_)
    return false;
  if (kind_ != MetricKind::Expression) return true;
  for (int i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < upper_[i].size(); ++j)
      if (!upper_[i][j].same_tree(o.upper_[i][j])) return false;
  return true;
}

bool MetricField::admissible(std::span<const double> coords) const {
  if (static_cast<int>(coords.size()) != dim_) return false;
  for (double c : coords)
    if (!std::isfinite(c)) return false;
  switch (kind_) {
    case MetricKind::Euclidean:
    case MetricKind::Minkowski:
    case MetricKind::SphereStereographic:
      return true;
    case MetricKind::HyperbolicBall: {
      double r2 = 0.0;
      for (double c : coords) r2 += c * c;
      return std::sqrt(r2) < radius_ * (1.0 - kHyperbolicMargin);
    }
    case MetricKind::Expression: {
      const Eigen::MatrixXd g = eval_components(coords);
      if (!g.allFinite()) return false;
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
      const auto& sv = svd.singularValues();
      return sv(sv.size() - 1) > 1e-12 * sv(0);
    }
  }
  return false;
}

ChartPoint MetricField::point(std::vector<double> coords) const {
  ChartPoint p;
  p.admissible = admissible(coords);
  p.coords = std::move(coords);
  return p;
}

Eigen::MatrixXd MetricField::eval_components(std::span<const double> x) const {
  Eigen::MatrixXd g(dim_, dim_);
  switch (kind_) {
    case MetricKind::Euclidean:
      g = Eigen::MatrixXd::Identity(dim_, dim_);
      break;
    case MetricKind::Minkowski:
      g = Eigen::MatrixXd::Zero(dim_, dim_);
      for (int i = 0; i < dim_; ++i) g(i, i) = i < sig_.plus ? 1.0 : -1.0;
      break;
    case MetricKind::SphereStereographic:
    case MetricKind::HyperbolicBall: {
      double r2 = 0.0;
      for (double c : x) r2 += c * c;
      const double rr = radius_ * radius_;
      const double denom = kind_ == MetricKind::SphereStereographic ? rr + r2 : rr - r2;
      const double phi = 2.0 * rr / denom;
      g = phi * phi * Eigen::MatrixXd::Identity(dim_, dim_);
      break;
    }
    case MetricKind::Expression:
      for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j) {
          const double v = upper_[i][j - i].eval(x);
          g(i, j) = v;
          g(j, i) = v;
        }
      break;
  }
  return g;
}

std::vector<double> MetricField::conformal_log_gradient(std::span<const double> x) const {
  double r2 = 0.0;
  for (double c : x) r2 += c * c;
  const double rr = radius_ * radius_;
  std::vector<double> psi(dim_);
  if (kind_ == MetricKind::SphereStereographic) {
    for (int i = 0; i < dim_; ++i) psi[i] = -2.0 * x[i] / (rr + r2);
  } else {
    for (int i = 0; i < dim_; ++i) psi[i] = 2.0 * x[i] / (rr - r2);
  }
  return psi;
}

DenseTensor MetricField::metric_at(const ChartPoint& p) const {
  if (!p.admissible || p.dim() != dim_)
    throw std::domain_error("metric_at: point is not admissible for this chart");
  DenseTensor g = from_matrix(eval_components(p.coords), Variance::Covariant, Variance::Covariant);
  g.declare_symmetry({0, 1, SymmetryKind::Symmetric});
  return g;
}

DenseTensor MetricField::inverse_metric_at(const ChartPoint& p) const {
  if (!p.admissible || p.dim() != dim_)
    throw std::domain_error("inverse_metric_at: point is not admissible for this chart");
  const Eigen::MatrixXd g = eval_components(p.coords);
  Eigen::MatrixXd inv(dim_, dim_);
  switch (kind_) {
    case MetricKind::Euclidean:
    case MetricKind::Minkowski:
    case MetricKind::SphereStereographic:
    case MetricKind::HyperbolicBall:
      inv = Eigen::MatrixXd::Zero(dim_, dim_);
      for (int i = 0; i < dim_; ++i) inv(i, i) = 1.0 / g(i, i);
      break;
    case MetricKind::Expression: {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
      const auto& sv = svd.singularValues();
      if (sv(sv.size() - 1) <= 1e-12 * sv(0))
        throw std::domain_error("inverse_metric_at: metric is singular at the point");
      inv = g.inverse();
      // make the inverse exactly symmetric
      inv = 0.5 * (inv + inv.transpose()).eval();
      break;
    }
  }
  DenseTensor t = from_matrix(inv, Variance::Contravariant, Variance::Contravariant);
  t.declare_symmetry({0, 1, SymmetryKind::Symmetric});
  return t;
}

DenseTensor MetricField::metric_partials_at(const ChartPoint& p) const {
  if (!p.admissible || p.dim() != dim_)
    throw std::domain_error("metric_partials_at: point is not admissible for this chart");
  DenseTensor dg(dim_, {Variance::Covariant, Variance::Covariant, Variance::Covariant});
  switch (kind_) {
    case MetricKind::Euclidean:
    case MetricKind::Minkowski:
      break;  // flat chart
    case MetricKind::SphereStereographic:
    case MetricKind::HyperbolicBall: {
      const Eigen::MatrixXd g = eval_components(p.coords);
      const std::vector<double> psi = conformal_log_gradient(p.coords);
      for (int a = 0; a < dim_; ++a)
        for (int c = 0; c < dim_; ++c) dg(a, a, c) = 2.0 * g(a, a) * psi[c];
      break;
    }
    case MetricKind::Expression: {
      std::vector<double> x(p.coords);
      for (int c = 0; c < dim_; ++c) {
        const double h = fd_step(x[c]);
        const double orig = x[c];
        auto delta = [&](double step) {
          x[c] = orig + step;
          const Eigen::MatrixXd gp = eval_components(x);
          x[c] = orig - step;
          const Eigen::MatrixXd gm = eval_components(x);
          x[c] = orig;
          return ((gp - gm) / (2.0 * step)).eval();
        };
        const Eigen::MatrixXd d = (4.0 * delta(h / 2) - delta(h)) / 3.0;
        for (int a = 0; a < dim_; ++a)
          for (int b = a; b < dim_; ++b) {
            dg(a, b, c) = d(a, b);
            dg(b, a, c) = d(a, b);
          }
      }
      break;
    }
  }
  dg.declare_symmetry({0, 1, SymmetryKind::Symmetric});
  return dg;
}

DenseTensor MetricField::christoffel_at(const ChartPoint& p) const {
  if (!p.admissible || p.dim() != dim_)
    throw std::domain_error("christoffel_at: point is not admissible for this chart");
  DenseTensor gamma(dim_, {Variance::Contravariant, Variance::Covariant, Variance::Covariant});
  switch (kind_) {
    case MetricKind::Euclidean:
    case MetricKind::Minkowski:
      break;
    case MetricKind::SphereStereographic:
    case MetricKind::HyperbolicBall: {
      const std::vector<double> psi = conformal_log_gradient(p.coords);
      for (int a = 0; a < dim_; ++a)
        for (int b = 0; b < dim_; ++b)
          for (int c = b; c < dim_; ++c) {
            double v = 0.0;
            if (a == b) v += psi[c];
            if (a == c) v += psi[b];
            if (b == c) v -= psi[a];
            gamma(a, b, c) = v;
            gamma(a, c, b) = v;
          }
      break;
    }
    case MetricKind::Expression: {
      const DenseTensor dg = metric_partials_at(p);
      const DenseTensor ginv = inverse_metric_at(p);
      for (int a = 0; a < dim_; ++a)
        for (int b = 0; b < dim_; ++b)
          for (int c = b; c < dim_; ++c) {
            double v = 0.0;
            for (int d = 0; d < dim_; ++d)
              v += 0.5 * ginv(a, d) * (dg(d, c, b) + dg(d, b, c) - dg(b, c, d));
            gamma(a, b, c) = v;
            gamma(a, c, b) = v;
          }
      break;
    }
  }
  gamma.declare_symmetry({1, 2, SymmetryKind::Symmetric});
  return gamma;
}

namespace {

struct Line {
  std::string_view text;
  std::size_t offset;  // byte offset of line start in the source
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    lines.push_back({text.substr(pos, nl - pos), pos});
    if (nl == text.size()) break;
    pos = nl + 1;
  }
  return lines;
}

std::string_view trim(std::string_view s, std::size_t& lead) {
  lead = 0;
  while (lead < s.size() && std::isspace(static_cast<unsigned char>(s[lead]))) ++lead;
  std::size_t end = s.size();
  while (end > lead && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(lead, end - lead);
}

int parse_int_at(std::string_view s, std::size_t offset, const char* what) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ParseError(std::string("malformed ") + what, offset);
  return v;
}

}  // namespace

MetricField MetricField::from_text(std::string_view text) {
  int dim = 0;
  std::optional<Signature> sig;
  std::vector<std::vector<Expr>> upper;
  std::vector<std::vector<std::size_t>> seen_at;
  bool have_dim = false;

  for (const Line& line : split_lines(text)) {
    std::size_t lead = 0;
    const std::string_view body = trim(line.text, lead);
    const std::size_t base = line.offset + lead;
    if (body.empty() || body[0] == '#') continue;

    auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("expected 'key = value'", base);
    std::size_t klead = 0;
    const std::string_view key = trim(body.substr(0, eq), klead);
    std::size_t vlead = 0;
    const std::string_view value = trim(body.substr(eq + 1), vlead);
    const std::size_t value_off = base + eq + 1 + vlead;

    if (key == "dim") {
      if (have_dim) throw ParseError("duplicate dim line", base);
      dim = parse_int_at(value, value_off, "dim");
      if (dim < 2 || dim > 8) throw ParseError("dim must be in 2..8", value_off);
      upper.assign(dim, {});
      seen_at.assign(dim, {});
      for (int i = 0; i < dim; ++i) {
        upper[i].resize(dim - i);
        seen_at[i].assign(dim - i, 0);
      }
      have_dim = true;
    } else if (key == "signature") {
      auto comma = value.find(',');
      if (comma == std::string_view::npos)
        throw ParseError("signature must be 'p,q'", value_off);
      std::size_t l1 = 0, l2 = 0;
      const std::string_view ps = trim(value.substr(0, comma), l1);
      const std::string_view qs = trim(value.substr(comma + 1), l2);
      Signature s;
      s.plus = parse_int_at(ps, value_off + l1, "signature");
      s.minus = parse_int_at(qs, value_off + comma + 1 + l2, "signature");
      if (s.plus < 0 || s.minus < 0)
        throw ParseError("signature parts must be non-negative", value_off);
      sig = s;
    } else if (key.size() > 1 && key[0] == 'g') {
      // g[i][j]
      std::string_view k = key.substr(1);
      auto need = [&](char c) {
        if (k.empty() || k[0] != c)
          throw ParseError("metric entries look like g[i][j]", base);
        k.remove_prefix(1);
      };
      need('[');
      auto close1 = k.find(']');
      if (close1 == std::string_view::npos) throw ParseError("metric entries look like g[i][j]", base);
      const int i = parse_int_at(k.substr(0, close1), base, "index");
      k.remove_prefix(close1 + 1);
      need('[');
      auto close2 = k.find(']');
      if (close2 == std::string_view::npos) throw ParseError("metric entries look like g[i][j]", base);
      const int j = parse_int_at(k.substr(0, close2), base, "index");
      if (close2 + 1 != k.size()) throw ParseError("metric entries look like g[i][j]", base);
      if (!have_dim) throw ParseError("dim must be declared before metric entries", base);
      if (i < 1 || j < 1 || i > dim || j > dim)
        throw ParseError("metric entry index out of range", base);
      if (i > j)
        throw ParseError("only upper-triangle entries (i <= j) may be specified", base);
      if (seen_at[i - 1][j - i])
        throw ParseError("duplicate metric entry g[" + std::to_string(i) + "][" + std::to_string(j) + "]",
                         base);
      try {
        upper[i - 1][j - i] = Expr::parse(value);
      } catch (const ParseError& e) {
        throw ParseError(e.message, value_off + e.offset);
      }
      seen_at[i - 1][j - i] = 1;
    } else {
      throw ParseError("unknown key '" + std::string(key) + "'", base);
    }
  }

  if (!have_dim) throw ParseError("missing dim line", 0);
  for (int i = 1; i <= dim; ++i)
    for (int j = i; j <= dim; ++j)
      if (!seen_at[i - 1][j - i])
        throw ParseError("missing metric entry g[" + std::to_string(i) + "][" + std::to_string(j) + "]",
                         text.size());
  if (sig && sig->dim() != dim) throw ParseError("signature does not sum to dim", 0);
  return expression(dim, std::move(upper), sig);
}

MetricField MetricField::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open metric file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

std::vector<double> random_admissible_point(const MetricField& m, PhiloxRng& rng) {
  const double span = m.kind() == MetricKind::HyperbolicBall ? 0.9 * m.radius() : 2.0;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<double> x(m.dim());
    for (double& c : x) c = rng.uniform(-span, span);
    if (m.kind() == MetricKind::HyperbolicBall) {
      double r2 = 0.0;
      for (double c : x) r2 += c * c;
      if (std::sqrt(r2) > 0.9 * m.radius()) continue;
    }
    if (m.admissible(x)) return x;
  }
  throw std::domain_error("random_admissible_point: could not sample an admissible point");
}

}  // namespace kintegra
