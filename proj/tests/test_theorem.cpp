#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "kintegra/nijenhuis.hpp"
#include "kintegra/rng.hpp"
#include "kintegra/tensor.hpp"
#include "kintegra/theorem.hpp"

using namespace kintegra;

namespace {

// Constraint rows rebuilt from scratch: the cyclic-sum coefficients written
// out as polynomials, one row for EVERY ordered index triple (no case
// analysis, no skipped rows) so any bookkeeping shortcut in the library
// assembly would show up as a nullspace mismatch.
double oracle_coeff(int cond, double a, double b, double c) {
  switch (cond) {
    case 0: return 1.0;
    case 1: return a - b;
    case 2: return (a - b) * (a + b - c);
    default: return (a - b) * ((a + b) * (a + b) - a * b - b * c - c * a);
  }
}

Eigen::MatrixXd oracle_matrix(const Eigen::VectorXd& lambda, std::span<const KCondition> which) {
  const int n = static_cast<int>(lambda.size());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(which.size()) * n * n * n, coord_count(n));
  m.setZero();
  Eigen::Index r = 0;
  for (KCondition cond : which) {
    const int ci = static_cast<int>(cond);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          m(r, coord_index(n, a, b, c)) += oracle_coeff(ci, lambda(a), lambda(b), lambda(c));
          m(r, coord_index(n, b, c, a)) += oracle_coeff(ci, lambda(b), lambda(c), lambda(a));
          m(r, coord_index(n, c, a, b)) += oracle_coeff(ci, lambda(c), lambda(a), lambda(b));
          ++r;
        }
  }
  return m;
}

// max-abs of M * B, scaled by the largest row norm of M.
double containment_residual(const Eigen::MatrixXd& m, const Eigen::MatrixXd& basis) {
  if (m.rows() == 0 || basis.cols() == 0) return 0.0;
  const double scale = std::max(m.rowwise().norm().maxCoeff(), 1e-300);
  return (m * basis).cwiseAbs().maxCoeff() / scale;
}

Eigen::VectorXd fixed_lambda(std::initializer_list<double> v) {
  Eigen::VectorXd l(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) l(i++) = x;
  return l;
}

constexpr KCondition kc0[] = {KCondition::K0};
constexpr KCondition kc01[] = {KCondition::K0, KCondition::K1};
constexpr KCondition kc012[] = {KCondition::K0, KCondition::K1, KCondition::K2};
constexpr KCondition kc0123[] = {KCondition::K0, KCondition::K1, KCondition::K2, KCondition::K3};

}  // namespace

TEST_CASE("coordinate map is a bijection onto 0..count-1") {
  for (int n : {2, 3, 5}) {
    std::set<int> seen;
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          const int ix = coord_index(n, a, b, c);
          CHECK(ix >= 0);
          CHECK(ix < coord_count(n));
          CHECK(seen.insert(ix).second);
          CHECK(coord_index(n, b, a, c) == ix);
        }
    CHECK(static_cast<int>(seen.size()) == coord_count(n));
  }
}

TEST_CASE("tensor/coordinate round trip is bitwise") {
  PointwiseKillingData d = sample_pointwise(4, MultiplicityPattern::distinct(4), 11);
  const Eigen::VectorXd v = tensor_to_coords(d.s);
  const DenseTensor back = coords_to_tensor(4, v);
  auto a = d.s.components();
  auto b = back.components();
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

  DenseTensor wrong_order(3, {Variance::Covariant, Variance::Covariant});
  CHECK_THROWS_AS(tensor_to_coords(wrong_order), std::invalid_argument);
  CHECK_THROWS_AS(coords_to_tensor(3, Eigen::VectorXd::Zero(5)), std::invalid_argument);
}

TEST_CASE("multiplicity pattern parsing and formatting") {
  MultiplicityPattern p = MultiplicityPattern::parse("2,1");
  CHECK(p.parts == std::vector<int>{2, 1});
  CHECK(p.total() == 3);
  CHECK(p.str() == "2,1");
  CHECK(MultiplicityPattern::parse(p.str()) == p);
  CHECK(MultiplicityPattern::parse("4").parts == std::vector<int>{4});
  CHECK(MultiplicityPattern::distinct(4).str() == "1,1,1,1");

  for (const char* bad : {"", "0", "2,", ",1", "1,x", "-1", "1.5"})
    CHECK_THROWS_AS(MultiplicityPattern::parse(bad), std::invalid_argument);
}

TEST_CASE("lambda samples respect multiplicities and separation") {
  PhiloxRng rng(21);
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd l = sample_lambda(3, MultiplicityPattern::parse("2,1"), rng);
    CHECK(l(0) == l(1));
    CHECK(std::abs(l(0) - l(2)) >= 0.5);
  }
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd l = sample_lambda(4, MultiplicityPattern::distinct(4), rng);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) CHECK(std::abs(l(i) - l(j)) >= 0.5);
  }
  CHECK_THROWS_AS(sample_lambda(3, MultiplicityPattern::parse("2,2"), rng),
                  std::invalid_argument);
}

TEST_CASE("pointwise samples satisfy the cyclic constraint exactly") {
  PointwiseKillingData d = sample_pointwise(4, MultiplicityPattern::parse("2,1,1"), 5);
  CHECK(d.s.has_symmetry(0, 1, SymmetryKind::Symmetric));
  const int n = 4;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        CHECK(d.s(a, b, c) == d.s(b, a, c));
        CHECK(std::abs(d.s(a, b, c) + d.s(b, c, a) + d.s(c, a, b)) < 1e-13);
      }
  CHECK(d.s.max_abs() > 0.1);

  PointwiseKillingData d2 = sample_pointwise(4, MultiplicityPattern::parse("2,1,1"), 5);
  CHECK((d.lambda.array() == d2.lambda.array()).all());
  auto ca = d.s.components();
  auto cb = d2.s.components();
  for (std::size_t i = 0; i < ca.size(); ++i) CHECK(ca[i] == cb[i]);
  PointwiseKillingData d3 = sample_pointwise(4, MultiplicityPattern::parse("2,1,1"), 6);
  double diff = 0.0;
  auto cc = d3.s.components();
  for (std::size_t i = 0; i < ca.size(); ++i) diff = std::max(diff, std::abs(ca[i] - cc[i]));
  CHECK(diff > 0.01);
  CHECK_THROWS_AS(sample_pointwise(9, MultiplicityPattern::distinct(9), 5),
                  std::invalid_argument);
}

TEST_CASE("constraint nullspaces match a from-scratch ordered-triple assembly") {
  PhiloxRng rng(22);
  for (int dim : {3, 4}) {
    for (const char* pat : {"", "2,1"}) {
      MultiplicityPattern pattern =
          *pat ? MultiplicityPattern::parse(pat) : MultiplicityPattern::distinct(dim);
      if (pattern.total() != dim) continue;
      const Eigen::VectorXd lambda = sample_lambda(dim, pattern, rng);
      for (auto which : {std::span<const KCondition>(kc0), std::span<const KCondition>(kc01),
                         std::span<const KCondition>(kc012),
                         std::span<const KCondition>(kc0123)}) {
        const Eigen::MatrixXd lib_basis = constraint_solution_space(lambda, which);
        const Eigen::MatrixXd ora = oracle_matrix(lambda, which);
        const Eigen::MatrixXd ora_basis = nullspace_basis(ora);
        CHECK(lib_basis.cols() == ora_basis.cols());
        CHECK(containment_residual(ora, lib_basis) < 1e-9);
        CHECK(containment_residual(constraint_matrix(lambda, which), ora_basis) < 1e-9);
      }
    }
  }
}

TEST_CASE("nullspace dimensions for the reference eigenvalues 1,2,3") {
  const Eigen::VectorXd lambda = fixed_lambda({1.0, 2.0, 3.0});
  CHECK(constraint_solution_space(lambda, kc0).cols() == 8);
  CHECK(constraint_solution_space(lambda, kc01).cols() == 7);
  CHECK(constraint_solution_space(lambda, kc012).cols() == 6);
  CHECK(constraint_solution_space(lambda, kc0123).cols() == 6);
}

TEST_CASE("primed coefficient sets cut the same cumulative nullspaces") {
  PhiloxRng rng(23);
  for (int dim : {3, 4}) {
    const Eigen::VectorXd lambda = sample_lambda(dim, MultiplicityPattern::distinct(dim), rng);
    for (auto which : {std::span<const KCondition>(kc012), std::span<const KCondition>(kc0123)}) {
      const Eigen::MatrixXd plain = constraint_solution_space(lambda, which, false);
      const Eigen::MatrixXd primed = constraint_solution_space(lambda, which, true);
      CHECK(plain.cols() == primed.cols());
      CHECK(containment_residual(constraint_matrix(lambda, which, true), plain) < 1e-9);
      CHECK(containment_residual(constraint_matrix(lambda, which, false), primed) < 1e-9);
    }
  }
}

TEST_CASE("eigenvalue case analysis on solution-space elements") {
  PhiloxRng rng(24);

  auto project = [&](const Eigen::VectorXd& lambda) {
    const Eigen::MatrixXd basis = constraint_solution_space(lambda, kc012);
    REQUIRE(basis.cols() > 0);
    Eigen::VectorXd z(basis.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
    Eigen::VectorXd w = basis * z;
    w /= w.norm();
    const int dim = static_cast<int>(lambda.size());
    return PointwiseKillingData{lambda, coords_to_tensor(dim, w)};
  };

  SUBCASE("distinct eigenvalues kill the strict-triple components") {
    PointwiseKillingData d = project(fixed_lambda({1.0, 2.0, 3.0}));
    VandermondeVerdict v = vandermonde_oracle(d.lambda, {0, 1, 2}, d);
    CHECK(v.eigencase == VandermondeVerdict::EigenCase::Distinct);
    CHECK(v.precondition_ok);
    CHECK(v.pass);
    CHECK(v.max_deviation < 1e-10);
  }

  SUBCASE("a double eigenvalue leaves the half-turn relation") {
    PointwiseKillingData d = project(fixed_lambda({2.0, 2.0, 5.0}));
    VandermondeVerdict v = vandermonde_oracle(d.lambda, {0, 1, 2}, d);
    CHECK(v.eigencase == VandermondeVerdict::EigenCase::TwoEqual);
    CHECK(v.pass);
    // odd index 2: s_2,0,1 = -s_0,1,2 / 2 = s_1,2,0
    const double u = d.s(0, 1, 2);
    CHECK(d.s(2, 0, 1) == doctest::Approx(-0.5 * u).epsilon(1e-9).scale(1.0));
    CHECK(d.s(1, 2, 0) == doctest::Approx(-0.5 * u).epsilon(1e-9).scale(1.0));
  }

  SUBCASE("a triple eigenvalue leaves only the cyclic constraint") {
    PointwiseKillingData d = project(fixed_lambda({3.0, 3.0, 3.0}));
    VandermondeVerdict v = vandermonde_oracle(d.lambda, {0, 1, 2}, d);
    CHECK(v.eigencase == VandermondeVerdict::EigenCase::AllEqual);
    CHECK(v.pass);
  }

  SUBCASE("data outside the solution space fails the precondition") {
    PointwiseKillingData d = sample_pointwise(3, MultiplicityPattern::distinct(3), 31);
    VandermondeVerdict v = vandermonde_oracle(d.lambda, {0, 1, 2}, d);
    CHECK_FALSE(v.precondition_ok);
    CHECK_FALSE(v.pass);
  }

  SUBCASE("argument validation") {
    PointwiseKillingData d = sample_pointwise(3, MultiplicityPattern::distinct(3), 32);
    CHECK_THROWS_AS(vandermonde_oracle(d.lambda, {0, 1, 1}, d), std::invalid_argument);
    CHECK_THROWS_AS(vandermonde_oracle(d.lambda, {0, 1, 3}, d), std::invalid_argument);
  }
}

TEST_CASE("redundancy verification over small trial batches") {
  SUBCASE("dimension 3, distinct eigenvalues") {
    TheoremReport r = verify_redundancy(3, MultiplicityPattern::distinct(3), 25, 7, 1e-9);
    CHECK(r.verified);
    CHECK(r.constraint_dims == std::array<int, 4>{8, 7, 6, 6});
    CHECK(r.max_k3_residual <= 1e-9);
    CHECK(r.trials == 25);
    CHECK(r.elapsed_seconds > 0.0);
  }
  SUBCASE("dimension 3, one double eigenvalue") {
    TheoremReport r = verify_redundancy(3, MultiplicityPattern::parse("2,1"), 10, 7, 1e-9);
    CHECK(r.verified);
    CHECK(r.constraint_dims == std::array<int, 4>{8, 7, 7, 7});
  }
  SUBCASE("dimension 3, fully degenerate") {
    TheoremReport r = verify_redundancy(3, MultiplicityPattern::parse("3"), 10, 7, 1e-9);
    CHECK(r.verified);
    CHECK(r.constraint_dims == std::array<int, 4>{8, 8, 8, 8});
  }
  SUBCASE("dimension 2 has no strict triples") {
    TheoremReport r = verify_redundancy(2, MultiplicityPattern::distinct(2), 5, 7, 1e-9);
    CHECK(r.verified);
    CHECK(r.constraint_dims == std::array<int, 4>{2, 2, 2, 2});
  }
  SUBCASE("dimension 4, distinct eigenvalues") {
    TheoremReport r = verify_redundancy(4, MultiplicityPattern::distinct(4), 5, 7, 1e-9);
    CHECK(r.verified);
    CHECK(r.constraint_dims == std::array<int, 4>{20, 16, 12, 12});
  }
  SUBCASE("argument validation") {
    CHECK_THROWS_AS(verify_redundancy(1, MultiplicityPattern::distinct(1), 5, 7, 1e-9),
                    std::invalid_argument);
    CHECK_THROWS_AS(verify_redundancy(3, MultiplicityPattern::parse("2,2"), 5, 7, 1e-9),
                    std::invalid_argument);
    CHECK_THROWS_AS(verify_redundancy(3, MultiplicityPattern::distinct(3), 0, 7, 1e-9),
                    std::invalid_argument);
    CHECK_THROWS_AS(verify_redundancy(3, MultiplicityPattern::distinct(3), 5, 7, 0.0),
                    std::invalid_argument);
  }
}

TEST_CASE("independence witness separates the quadratic condition") {
  const Eigen::VectorXd lambda = fixed_lambda({1.0, 2.0, 3.0});
  auto w = independence_witness(3, lambda, 7);
  REQUIRE(w.has_value());
  CHECK(w->dim_k0k1 == 7);
  CHECK(w->dim_k0k1k2 == 6);
  CHECK(w->k2_residual >= 0.1);

  const Eigen::VectorXd coords = tensor_to_coords(w->s);
  CHECK(coords.norm() == doctest::Approx(1.0).epsilon(1e-9));
  // the witness lies in the {K0, K1} solution space...
  CHECK(containment_residual(constraint_matrix(lambda, kc01), coords) < 1e-9);
  // ...and its quadratic residual is what the eigenframe scan reports
  CHECK(eigenframe_residuals(lambda, w->s).k2 == w->k2_residual);
}

TEST_CASE("no witness exists when the quadratic condition adds nothing") {
  CHECK_FALSE(independence_witness(3, fixed_lambda({2.0, 2.0, 5.0}), 7).has_value());
  CHECK_FALSE(independence_witness(2, fixed_lambda({1.0, 2.0}), 7).has_value());
  CHECK_THROWS_AS(independence_witness(3, fixed_lambda({1.0, 2.0}), 7), std::invalid_argument);
}
