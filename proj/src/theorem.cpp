#include "kintegra/theorem.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "kintegra/nijenhuis.hpp"

namespace kintegra {

int MultiplicityPattern::total() const {
  int t = 0;
  for (int p : parts) t += p;
  return t;
}

MultiplicityPattern MultiplicityPattern::parse(std::string_view s) {
  MultiplicityPattern out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    if (comma == std::string_view::npos) comma = s.size();
    const std::string_view part = s.substr(pos, comma - pos);
    int v = 0;
    auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || p != part.data() + part.size() || v < 1)
      throw std::invalid_argument("pattern parts must be positive integers separated by commas");
    out.parts.push_back(v);
    if (comma == s.size()) break;
    pos = comma + 1;
  }
  if (out.parts.empty()) throw std::invalid_argument("empty multiplicity pattern");
  return out;
}

MultiplicityPattern MultiplicityPattern::distinct(int dim) {
  MultiplicityPattern p;
  p.parts.assign(static_cast<std::size_t>(dim), 1);
  return p;
}

std::string MultiplicityPattern::str() const {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(parts[i]);
  }
  return s;
}

Eigen::VectorXd sample_lambda(int dim, const MultiplicityPattern& pattern, PhiloxRng& rng) {
  if (pattern.total() != dim)
    throw std::invalid_argument("sample_lambda: pattern parts must sum to dim");
  const int groups = static_cast<int>(pattern.parts.size());
  std::vector<double> values(groups);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    for (double& v : values) v = rng.normal();
    bool separated = true;
    for (int i = 0; i < groups && separated; ++i)
      for (int j = i + 1; j < groups; ++j)
        if (std::abs(values[i] - values[j]) < 0.5) {
          separated = false;
          break;
        }
    if (!separated) continue;
    Eigen::VectorXd lambda(dim);
    int k = 0;
    for (int g = 0; g < groups; ++g)
      for (int r = 0; r < pattern.parts[g]; ++r) lambda(k++) = values[g];
    return lambda;
  }
  throw std::logic_error("sample_lambda: rejection sampling failed to separate group values");
}

PointwiseKillingData sample_pointwise(int dim, const MultiplicityPattern& pattern,
                                      std::uint64_t seed) {
  if (dim < 2 || dim > 8) throw std::invalid_argument("sample_pointwise: dim must be in 2..8");
  PhiloxRng rng(seed, 0);
  PointwiseKillingData data{sample_lambda(dim, pattern, rng),
                            DenseTensor(dim, {Variance::Covariant, Variance::Covariant,
                                              Variance::Covariant})};
  DenseTensor& s = data.s;
  for (int a = 0; a < dim; ++a)
    for (int b = a; b < dim; ++b)
      for (int c = 0; c < dim; ++c) {
        const double v = rng.normal();
        s(a, b, c) = v;
        s(b, a, c) = v;
      }
  // remove the totally symmetric part (assembled orbit-wise so the projection
  // is bitwise symmetric); what remains satisfies the Killing constraint
  DenseTensor sym(dim, {Variance::Covariant, Variance::Covariant, Variance::Covariant});
  static constexpr int perm[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1},
                                     {1, 0, 2}, {0, 2, 1}, {2, 1, 0}};
  for (int a = 0; a < dim; ++a)
    for (int b = a; b < dim; ++b)
      for (int c = b; c < dim; ++c) {
        const double t = (s(a, b, c) + s(b, c, a) + s(c, a, b)) / 3.0;
        const int tri[3] = {a, b, c};
        for (const auto& pm : perm) sym(tri[pm[0]], tri[pm[1]], tri[pm[2]]) = t;
      }
  s -= sym;
  s.declare_symmetry({0, 1, SymmetryKind::Symmetric});
  return data;
}

int coord_count(int dim) { return dim * (dim + 1) / 2 * dim; }

namespace {

int pair_index(int dim, int a, int b) {
  if (a > b) std::swap(a, b);
  return a * dim - a * (a - 1) / 2 + (b - a);
}

}  // namespace

int coord_index(int dim, int a, int b, int c) { return pair_index(dim, a, b) * dim + c; }

Eigen::VectorXd tensor_to_coords(const DenseTensor& s) {
  if (s.order() != 3) throw std::invalid_argument("tensor_to_coords: order must be 3");
  const int n = s.dim();
  Eigen::VectorXd v(coord_count(n));
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b)
      for (int c = 0; c < n; ++c) v(coord_index(n, a, b, c)) = s(a, b, c);
  return v;
}

DenseTensor coords_to_tensor(int dim, const Eigen::VectorXd& v) {
  if (v.size() != coord_count(dim))
    throw std::invalid_argument("coords_to_tensor: coordinate count mismatch");
  DenseTensor s(dim, {Variance::Covariant, Variance::Covariant, Variance::Covariant});
  for (int a = 0; a < dim; ++a)
    for (int b = a; b < dim; ++b)
      for (int c = 0; c < dim; ++c) {
        const double val = v(coord_index(dim, a, b, c));
        s(a, b, c) = val;
        s(b, a, c) = val;
      }
  s.declare_symmetry({0, 1, SymmetryKind::Symmetric});
  return s;
}

Eigen::MatrixXd constraint_matrix(const Eigen::VectorXd& lambda, std::span<const KCondition> which,
                                  bool primed) {
  const int n = static_cast<int>(lambda.size());
  if (n < 2 || n > 8) throw std::invalid_argument("constraint_matrix: dim must be in 2..8");
  std::vector<Eigen::VectorXd> rows;
  for (KCondition cond : which) {
    if (cond == KCondition::K0) {
      // one row per index multiset; coefficients accumulate on coinciding
      // coordinates (e.g. S_aab + 2 S_aba = 0)
      for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b)
          for (int c = b; c < n; ++c) {
            Eigen::VectorXd row = Eigen::VectorXd::Zero(coord_count(n));
            row(coord_index(n, a, b, c)) += 1.0;
            row(coord_index(n, b, c, a)) += 1.0;
            row(coord_index(n, c, a, b)) += 1.0;
            rows.push_back(std::move(row));
          }
    } else {
      const int ci = static_cast<int>(cond);
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
          for (int c = b + 1; c < n; ++c) {
            Eigen::VectorXd row = Eigen::VectorXd::Zero(coord_count(n));
            row(coord_index(n, a, b, c)) +=
                eigenframe_coefficient(ci, primed, lambda(a), lambda(b), lambda(c));
            row(coord_index(n, b, c, a)) +=
                eigenframe_coefficient(ci, primed, lambda(b), lambda(c), lambda(a));
            row(coord_index(n, c, a, b)) +=
                eigenframe_coefficient(ci, primed, lambda(c), lambda(a), lambda(b));
            rows.push_back(std::move(row));
          }
    }
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), coord_count(n));
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i];
  return m;
}

Eigen::MatrixXd constraint_solution_space(const Eigen::VectorXd& lambda,
                                          std::span<const KCondition> which, bool primed) {
  return nullspace_basis(constraint_matrix(lambda, which, primed));
}

VandermondeVerdict vandermonde_oracle(const Eigen::VectorXd& lambda, std::array<int, 3> triple,
                                      const PointwiseKillingData& data, double tol) {
  const int n = static_cast<int>(lambda.size());
  for (int t : triple)
    if (t < 0 || t >= n) throw std::invalid_argument("vandermonde_oracle: triple index out of range");
  if (triple[0] == triple[1] || triple[0] == triple[2] || triple[1] == triple[2])
    throw std::invalid_argument("vandermonde_oracle: triple indices must be distinct");

  const double lscale = 1.0 + lambda.cwiseAbs().maxCoeff();
  const double group_tol = 1e-9 * lscale;
  const double snorm = std::max(data.s.max_abs(), 1e-300);
  auto eq = [&](int i, int j) { return std::abs(lambda(triple[i]) - lambda(triple[j])) <= group_tol; };

  VandermondeVerdict v{};
  const bool e01 = eq(0, 1), e02 = eq(0, 2), e12 = eq(1, 2);
  int odd = -1;
  if (e01 && e02 && e12) {
    v.eigencase = VandermondeVerdict::EigenCase::AllEqual;
  } else if (!e01 && !e02 && !e12) {
    v.eigencase = VandermondeVerdict::EigenCase::Distinct;
  } else {
    v.eigencase = VandermondeVerdict::EigenCase::TwoEqual;
    odd = e12 ? 0 : (e02 ? 1 : 2);
  }

  // precondition: the triple's components of the K0/K1/K2 cyclic sums vanish
  auto cyclic_value = [&](int cond, int a, int b, int c) {
    return eigenframe_coefficient(cond, false, lambda(a), lambda(b), lambda(c)) * data.s(a, b, c) +
           eigenframe_coefficient(cond, false, lambda(b), lambda(c), lambda(a)) * data.s(b, c, a) +
           eigenframe_coefficient(cond, false, lambda(c), lambda(a), lambda(b)) * data.s(c, a, b);
  };
  v.precondition_ok = true;
  double denom = snorm;
  for (int cond = 0; cond <= 2; ++cond) {
    if (std::abs(cyclic_value(cond, triple[0], triple[1], triple[2])) / denom > 1e-8)
      v.precondition_ok = false;
    denom *= lscale;
  }

  switch (v.eigencase) {
    case VandermondeVerdict::EigenCase::Distinct: {
      const double u1 = data.s(triple[0], triple[1], triple[2]);
      const double u2 = data.s(triple[1], triple[2], triple[0]);
      const double u3 = data.s(triple[2], triple[0], triple[1]);
      v.max_deviation = std::max({std::abs(u1), std::abs(u2), std::abs(u3)}) / snorm;
      break;
    }
    case VandermondeVerdict::EigenCase::TwoEqual: {
      const int alpha = triple[odd];
      const int beta = triple[(odd + 1) % 3];
      const int gamma = triple[(odd + 2) % 3];
      const double u1 = data.s(alpha, beta, gamma);
      const double u2 = data.s(beta, gamma, alpha);
      const double u3 = data.s(gamma, alpha, beta);
      v.max_deviation = std::max(std::abs(u1 + 0.5 * u2), std::abs(u3 + 0.5 * u2)) / snorm;
      break;
    }
    case VandermondeVerdict::EigenCase::AllEqual: {
      v.max_deviation = std::abs(cyclic_value(0, triple[0], triple[1], triple[2])) / snorm;
      break;
    }
  }
  v.pass = v.precondition_ok && v.max_deviation <= tol;
  return v;
}

TheoremReport verify_redundancy(int dim, const MultiplicityPattern& pattern, long trials,
                                std::uint64_t seed, double tolerance) {
  if (dim < 2 || dim > 8) throw std::invalid_argument("verify_redundancy: dim must be in 2..8");
  if (pattern.total() != dim)
    throw std::invalid_argument("verify_redundancy: pattern parts must sum to dim");
  if (trials < 1) throw std::invalid_argument("verify_redundancy: trials must be at least 1");
  if (!(tolerance > 0)) throw std::invalid_argument("verify_redundancy: tolerance must be positive");

  const auto start = std::chrono::steady_clock::now();
  TheoremReport rep;
  rep.dim = dim;
  rep.pattern = pattern;
  rep.trials = trials;
  rep.seed = seed;
  rep.tolerance = tolerance;

  static constexpr KCondition c0[] = {KCondition::K0};
  static constexpr KCondition c01[] = {KCondition::K0, KCondition::K1};
  static constexpr KCondition c012[] = {KCondition::K0, KCondition::K1, KCondition::K2};
  static constexpr KCondition c0123[] = {KCondition::K0, KCondition::K1, KCondition::K2,
                                         KCondition::K3};

  bool dims_ok = true;
  double max_k3 = 0.0;
  for (long t = 0; t < trials; ++t) {
    PhiloxRng rng(seed, static_cast<std::uint64_t>(t));
    const Eigen::VectorXd lambda = sample_lambda(dim, pattern, rng);
    const Eigen::MatrixXd basis = constraint_solution_space(lambda, c012);
    const int d012 = static_cast<int>(basis.cols());
    const int d0123 = coord_count(dim) - matrix_rank(constraint_matrix(lambda, c0123));
    if (t == 0) {
      rep.constraint_dims[0] = coord_count(dim) - matrix_rank(constraint_matrix(lambda, c0));
      rep.constraint_dims[1] = coord_count(dim) - matrix_rank(constraint_matrix(lambda, c01));
      rep.constraint_dims[2] = d012;
      rep.constraint_dims[3] = d0123;
    }
    if (d0123 != d012) dims_ok = false;
    if (d012 == 0) continue;
    Eigen::VectorXd z(d012);
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
    Eigen::VectorXd w = basis * z;
    const double nrm = w.norm();
    if (nrm < 1e-12) continue;
    w /= nrm;
    const PointwiseKillingData data{lambda, coords_to_tensor(dim, w)};
    max_k3 = std::max(max_k3, eigenframe_residuals(lambda, data.s).k3);
  }
  rep.max_k3_residual = max_k3;
  rep.verified = dims_ok && max_k3 <= tolerance;
  rep.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

std::optional<WitnessResult> independence_witness(int dim, const Eigen::VectorXd& lambda,
                                                  std::uint64_t seed) {
  if (dim < 2 || dim > 8) throw std::invalid_argument("independence_witness: dim must be in 2..8");
  if (lambda.size() != dim)
    throw std::invalid_argument("independence_witness: lambda size must equal dim");

  static constexpr KCondition c01[] = {KCondition::K0, KCondition::K1};
  static constexpr KCondition c012[] = {KCondition::K0, KCondition::K1, KCondition::K2};
  static constexpr KCondition c2[] = {KCondition::K2};

  const Eigen::MatrixXd b01 = constraint_solution_space(lambda, c01);
  const Eigen::MatrixXd b012 = constraint_solution_space(lambda, c012);
  if (b01.cols() == b012.cols()) return std::nullopt;

  // orthonormal basis of the complement of span(b012) inside span(b01)
  const Eigen::MatrixXd proj = b01 - b012 * (b012.transpose() * b01);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(proj, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-10 * sv(0)) ++rank;
  if (rank == 0) return std::nullopt;
  const Eigen::MatrixXd comp = svd.matrixU().leftCols(rank);

  // the K2 rows restricted to the complement; the top right-singular vector
  // maximizes the K2 image among unit elements
  const Eigen::MatrixXd w = constraint_matrix(lambda, c2) * comp;
  Eigen::JacobiSVD<Eigen::MatrixXd> wsvd(w, Eigen::ComputeFullV);

  auto residual_of = [&](const Eigen::VectorXd& u) {
    return eigenframe_residuals(lambda, coords_to_tensor(dim, u)).k2;
  };
  Eigen::VectorXd best = comp * wsvd.matrixV().col(0);
  double best_k2 = residual_of(best);
  PhiloxRng rng(seed, 0);
  for (int it = 0; it < 32; ++it) {
    Eigen::VectorXd z(rank);
    for (int i = 0; i < rank; ++i) z(i) = rng.normal();
    Eigen::VectorXd u = comp * z;
    const double nrm = u.norm();
    if (nrm < 1e-12) continue;
    u /= nrm;
    const double k2 = residual_of(u);
    if (k2 > best_k2) {
      best_k2 = k2;
      best = u;
    }
  }
  if (best_k2 < 0.1) return std::nullopt;

  return WitnessResult{lambda, coords_to_tensor(dim, best), best_k2,
                       static_cast<int>(b01.cols()), static_cast<int>(b012.cols())};
}

}  // namespace kintegra
