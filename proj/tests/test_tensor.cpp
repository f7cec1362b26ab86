#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "kintegra/rng.hpp"
#include "kintegra/tensor.hpp"

using namespace kintegra;

namespace {

DenseTensor random_tensor(int dim, int order, PhiloxRng& rng) {
  std::vector<Variance> var(order, Variance::Covariant);
  DenseTensor t(dim, var);
  for (double& c : t.mutable_components()) c = rng.normal();
  return t;
}

}  // namespace

TEST_CASE("component storage is row-major with the last index fastest") {
  DenseTensor t(3, {Variance::Covariant, Variance::Covariant});
  t(1, 2) = 5.0;
  CHECK(t.components()[1 * 3 + 2] == 5.0);
  const int idx[] = {1, 2};
  CHECK(t.value(idx) == 5.0);
}

TEST_CASE("shape validation rejects out-of-range dims and orders") {
  CHECK_THROWS_AS(DenseTensor(1, {Variance::Covariant}), std::invalid_argument);
  CHECK_THROWS_AS(DenseTensor(9, {Variance::Covariant}), std::invalid_argument);
  CHECK_THROWS_AS(
      DenseTensor(3, std::vector<Variance>(5, Variance::Covariant)),
      std::invalid_argument);
  CHECK_NOTHROW(DenseTensor(2, {}));
}

TEST_CASE("declare_symmetry verifies bitwise and rejects lies") {
  DenseTensor t(2, {Variance::Covariant, Variance::Covariant});
  t(0, 1) = 3.0;
  t(1, 0) = 3.0 + 1e-15;
  CHECK_THROWS_AS(t.declare_symmetry({0, 1, SymmetryKind::Symmetric}), std::invalid_argument);
  t(1, 0) = 3.0;
  CHECK_NOTHROW(t.declare_symmetry({0, 1, SymmetryKind::Symmetric}));
  CHECK(t.has_symmetry(0, 1, SymmetryKind::Symmetric));
  CHECK(t.has_symmetry(1, 0, SymmetryKind::Symmetric));
  CHECK_FALSE(t.has_symmetry(0, 1, SymmetryKind::Antisymmetric));
}

TEST_CASE("antisymmetrize3 projects and is idempotent") {
  PhiloxRng rng(101);
  for (int dim : {3, 4}) {
    DenseTensor t = random_tensor(dim, 3, rng);
    DenseTensor a = antisymmetrize3(t, {0, 1, 2});

    // swap of any two slots flips the sign bitwise
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k) {
          CHECK(a(i, j, k) == -a(j, i, k));
          CHECK(a(i, j, k) == -a(i, k, j));
          if (i == j || j == k || i == k) CHECK(a(i, j, k) == 0.0);
        }

    // idempotent up to rounding
    DenseTensor aa = antisymmetrize3(a, {0, 1, 2});
    aa -= a;
    CHECK(aa.max_abs() < 1e-15 * (1.0 + a.max_abs()));

    CHECK(a.has_symmetry(0, 1, SymmetryKind::Antisymmetric));
    CHECK(a.has_symmetry(1, 2, SymmetryKind::Antisymmetric));
  }
}

TEST_CASE("cyclic_sum3 of an antisymmetrized tensor is three times it") {
  // the cyclic group has three elements, each fixing the alternating part
  PhiloxRng rng(55);
  DenseTensor t = random_tensor(3, 3, rng);
  DenseTensor a = antisymmetrize3(t, {0, 1, 2});
  DenseTensor c = cyclic_sum3(a, {0, 1, 2});
  DenseTensor three_a = 3.0 * a;
  c -= three_a;
  CHECK(c.max_abs() < 1e-14);
}

TEST_CASE("cyclic_sum3 of a totally symmetric tensor is three times it") {
  DenseTensor t(2, {Variance::Covariant, Variance::Covariant, Variance::Covariant});
  PhiloxRng rng(56);
  for (int i = 0; i < 2; ++i)
    for (int j = i; j < 2; ++j)
      for (int k = j; k < 2; ++k) {
        const double v = rng.normal();
        int perm[][3] = {{i, j, k}, {i, k, j}, {j, i, k}, {j, k, i}, {k, i, j}, {k, j, i}};
        for (auto& p : perm) t(p[0], p[1], p[2]) = v;
      }
  DenseTensor c = cyclic_sum3(t, {0, 1, 2});
  DenseTensor three_t = 3.0 * t;
  c -= three_t;
  CHECK(c.max_abs() == 0.0);
}

TEST_CASE("raise then lower is the identity") {
  PhiloxRng rng(7);
  const int dim = 4;
  // a random SPD metric
  Eigen::MatrixXd a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = rng.normal();
  Eigen::MatrixXd gm = a * a.transpose() + Eigen::MatrixXd::Identity(dim, dim);
  DenseTensor g = from_matrix(gm, Variance::Covariant, Variance::Covariant);
  DenseTensor ginv = from_matrix(gm.inverse(), Variance::Contravariant, Variance::Contravariant);

  DenseTensor t = random_tensor(dim, 3, rng);
  DenseTensor up = raise_index(t, 1, ginv);
  CHECK(up.variance(1) == Variance::Contravariant);
  DenseTensor back = lower_index(up, 1, g);
  back -= t;
  CHECK(back.max_abs() < 1e-12);
}

TEST_CASE("contract matches a hand-written matrix product") {
  PhiloxRng rng(8);
  DenseTensor a(3, {Variance::Covariant, Variance::Contravariant});
  DenseTensor b(3, {Variance::Covariant, Variance::Covariant});
  for (double& c : a.mutable_components()) c = rng.normal();
  for (double& c : b.mutable_components()) c = rng.normal();
  DenseTensor c = contract(a, 1, b, 0);  // c_a_b = a_a^m b_mb
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int m = 0; m < 3; ++m) s += a(i, m) * b(m, j);
      CHECK(c(i, j) == doctest::Approx(s).epsilon(1e-14));
    }
  CHECK_THROWS_AS(contract(a, 0, b, 0), std::invalid_argument);  // same variance
}

TEST_CASE("generalized eigenframe diagonalizes both forms on a riemannian space") {
  PhiloxRng rng(12);
  const int dim = 4;
  Eigen::MatrixXd a(dim, dim), b(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      a(i, j) = rng.normal();
      b(i, j) = rng.normal();
    }
  Eigen::MatrixXd gm = a * a.transpose() + Eigen::MatrixXd::Identity(dim, dim);
  Eigen::MatrixXd cm = 0.5 * (b + b.transpose());
  DenseTensor g = from_matrix(gm, Variance::Covariant, Variance::Covariant);
  DenseTensor c = from_matrix(cm, Variance::Covariant, Variance::Covariant);

  auto ef = generalized_eigenframe(c, g, Signature{dim, 0});
  REQUIRE(ef.has_value());
  const Eigen::MatrixXd& e = ef->frame;
  Eigen::MatrixXd gdiag = e.transpose() * gm * e;
  Eigen::MatrixXd cdiag = e.transpose() * cm * e;
  for (int i = 0; i < dim; ++i) {
    CHECK(gdiag(i, i) == doctest::Approx(ef->normal_squares(i)).epsilon(1e-10));
    CHECK(cdiag(i, i) ==
          doctest::Approx(ef->eigenvalues(i) * ef->normal_squares(i)).epsilon(1e-9));
    CHECK(ef->normal_squares(i) == 1.0);
    for (int j = 0; j < dim; ++j)
      if (i != j) {
        CHECK(std::abs(gdiag(i, j)) < 1e-10);
        CHECK(std::abs(cdiag(i, j)) < 1e-9);
      }
  }
  // ascending eigenvalues
  for (int i = 0; i + 1 < dim; ++i) CHECK(ef->eigenvalues(i) <= ef->eigenvalues(i + 1));
}

TEST_CASE("indefinite eigenframe handles real-diagonalizable pencils") {
  // g = diag(1,-1), c chosen so g^{-1}c has distinct real eigenvalues
  DenseTensor g(2, {Variance::Covariant, Variance::Covariant});
  g(0, 0) = 1.0;
  g(1, 1) = -1.0;
  DenseTensor c(2, {Variance::Covariant, Variance::Covariant});
  c(0, 0) = 2.0;
  c(1, 1) = 3.0;
  c(0, 1) = c(1, 0) = 0.1;
  auto ef = generalized_eigenframe(c, g, Signature{1, 1});
  REQUIRE(ef.has_value());
  Eigen::MatrixXd gm = to_matrix(g), cm = to_matrix(c);
  Eigen::MatrixXd gd = ef->frame.transpose() * gm * ef->frame;
  Eigen::MatrixXd cd = ef->frame.transpose() * cm * ef->frame;
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(std::abs(gd(i, i)) - 1.0) < 1e-10);
    CHECK(cd(i, i) == doctest::Approx(ef->eigenvalues(i) * gd(i, i)).epsilon(1e-9));
  }
  CHECK(std::abs(gd(0, 1)) < 1e-10);
  CHECK(std::abs(cd(0, 1)) < 1e-9);
}

TEST_CASE("indefinite eigenframe reports complex spectra as absent") {
  // g = diag(1,-1) with an off-diagonal c gives g^{-1}c eigenvalues t +- i s
  DenseTensor g(2, {Variance::Covariant, Variance::Covariant});
  g(0, 0) = 1.0;
  g(1, 1) = -1.0;
  DenseTensor c(2, {Variance::Covariant, Variance::Covariant});
  c(0, 1) = c(1, 0) = 1.0;
  Eigen::MatrixXd endo = to_matrix(g).inverse() * to_matrix(c);
  Eigen::EigenSolver<Eigen::MatrixXd> es(endo);
  CHECK(std::abs(es.eigenvalues()(0).imag()) > 0.5);  // genuinely complex
  CHECK_FALSE(generalized_eigenframe(c, g, Signature{1, 1}).has_value());
}

TEST_CASE("frame transform of the metric gives the signature matrix") {
  PhiloxRng rng(21);
  const int dim = 3;
  Eigen::MatrixXd a(dim, dim), b(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      a(i, j) = rng.normal();
      b(i, j) = rng.normal();
    }
  Eigen::MatrixXd gm = a * a.transpose() + Eigen::MatrixXd::Identity(dim, dim);
  Eigen::MatrixXd cm = 0.5 * (b + b.transpose());
  DenseTensor g = from_matrix(gm, Variance::Covariant, Variance::Covariant);
  DenseTensor c = from_matrix(cm, Variance::Covariant, Variance::Covariant);
  auto ef = generalized_eigenframe(c, g, Signature{dim, 0});
  REQUIRE(ef.has_value());
  DenseTensor gf = frame_transform(g, *ef);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const double want = i == j ? ef->normal_squares(i) : 0.0;
      CHECK(std::abs(gf(i, j) - want) < 1e-10);
    }
}

TEST_CASE("nullspace_basis and matrix_rank agree with known systems") {
  Eigen::MatrixXd a(2, 3);
  a << 1, 0, 1,
       0, 1, 1;
  CHECK(matrix_rank(a) == 2);
  Eigen::MatrixXd ns = nullspace_basis(a);
  REQUIRE(ns.cols() == 1);
  CHECK((a * ns).norm() < 1e-12);
  CHECK(std::abs(ns.col(0).norm() - 1.0) < 1e-12);

  Eigen::MatrixXd empty(0, 4);
  Eigen::MatrixXd full = nullspace_basis(empty);
  CHECK(full.cols() == 4);
  CHECK((full.transpose() * full - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-12);

  // duplicated rows do not raise the rank
  Eigen::MatrixXd dup(3, 3);
  dup << 1, 2, 3,
         1, 2, 3,
         0, 1, 0;
  CHECK(matrix_rank(dup) == 2);
}
