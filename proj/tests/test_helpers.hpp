#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "kintegra/fields.hpp"
#include "kintegra/metric.hpp"
#include "kintegra/rng.hpp"
#include "kintegra/tensor.hpp"

namespace testutil {

// Plain second-order central difference, deliberately simpler than the
// library's derivative path so the two can cross-check each other.
inline double central_diff(const std::function<double(const std::vector<double>&)>& f,
                           std::vector<double> x, int axis) {
  const double h = 1e-6 * (1.0 + std::abs(x[axis]));
  const double x0 = x[axis];
  x[axis] = x0 + h;
  const double fp = f(x);
  x[axis] = x0 - h;
  const double fm = f(x);
  return (fp - fm) / (2.0 * h);
}

// d_c g_ab by central differences on metric_at only.
inline kintegra::DenseTensor fd_metric_partials(const kintegra::MetricField& m,
                                                const std::vector<double>& x) {
  using kintegra::Variance;
  const int n = m.dim();
  kintegra::DenseTensor out(n, {Variance::Covariant, Variance::Covariant, Variance::Covariant});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        out(a, b, c) = central_diff(
            [&](const std::vector<double>& y) { return m.metric_at(m.point(y))(a, b); }, x, c);
  return out;
}

// Gamma^k_ij from finite-difference metric partials and a straight inverse.
inline kintegra::DenseTensor fd_christoffel(const kintegra::MetricField& m,
                                            const std::vector<double>& x) {
  using kintegra::Variance;
  const int n = m.dim();
  const kintegra::DenseTensor dg = fd_metric_partials(m, x);
  const Eigen::MatrixXd ginv = kintegra::to_matrix(m.metric_at(m.point(x))).inverse();
  kintegra::DenseTensor out(n, {Variance::Contravariant, Variance::Covariant, Variance::Covariant});
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
          s += 0.5 * ginv(k, l) * (dg(l, i, j) + dg(l, j, i) - dg(i, j, l));
        out(k, i, j) = s;
      }
  return out;
}

// K_ab;c assembled from scratch: finite-difference partials of value_at plus
// finite-difference Christoffel corrections.
inline kintegra::DenseTensor fd_covariant_derivative(const kintegra::SymmetricTensorField& k,
                                                     const kintegra::MetricField& m,
                                                     const std::vector<double>& x) {
  using kintegra::Variance;
  const int n = m.dim();
  const kintegra::DenseTensor gamma = fd_christoffel(m, x);
  const kintegra::DenseTensor kv = k.value_at(m.point(x));
  kintegra::DenseTensor out(n, {Variance::Covariant, Variance::Covariant, Variance::Covariant});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double s = central_diff(
            [&](const std::vector<double>& y) { return k.value_at(m.point(y))(a, b); }, x, c);
        for (int d = 0; d < n; ++d)
          s -= gamma(d, a, c) * kv(d, b) + gamma(d, b, c) * kv(a, d);
        out(a, b, c) = s;
      }
  return out;
}

// The coordinate-free Nijenhuis torsion of the endomorphism A = g^{-1} K,
// evaluated on the coordinate fields e_i, e_j through finite differences of
// the columns of A alone:
//   N(X,Y) = A^2 [X,Y] + [AX, AY] - A[AX, Y] - A[X, AY].
// For constant X = e_i, Y = e_j the first bracket vanishes and
//   [U,V]^k = U^m d_m V^k - V^m d_m U^k.
// This equals exactly twice the half-normalized component torsion.
inline kintegra::DenseTensor fd_bracket_torsion(const kintegra::SymmetricTensorField& k,
                                                const kintegra::MetricField& m,
                                                const std::vector<double>& x) {
  using kintegra::Variance;
  const int n = m.dim();
  auto endo = [&](const std::vector<double>& y) -> Eigen::MatrixXd {
    const auto p = m.point(y);
    return kintegra::to_matrix(m.inverse_metric_at(p)) * kintegra::to_matrix(k.value_at(p));
  };
  const Eigen::MatrixXd a0 = endo(x);
  // dA(k, i, c) = d_c A^k_i
  std::vector<Eigen::MatrixXd> da(n);
  for (int c = 0; c < n; ++c) {
    std::vector<double> xp = x, xm = x;
    const double h = 1e-6 * (1.0 + std::abs(x[c]));
    xp[c] += h;
    xm[c] -= h;
    da[c] = (endo(xp) - endo(xm)) / (2.0 * h);
  }
  kintegra::DenseTensor out(n, {Variance::Contravariant, Variance::Covariant, Variance::Covariant});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      // U = A e_i, V = A e_j as vector fields; brackets need d_m of each.
      Eigen::VectorXd uv = Eigen::VectorXd::Zero(n);  // [AX, AY]
      Eigen::VectorXd auy = Eigen::VectorXd::Zero(n);  // A[AX, Y]  (Y constant)
      Eigen::VectorXd axv = Eigen::VectorXd::Zero(n);  // A[X, AY]  (X constant)
      for (int kk = 0; kk < n; ++kk) {
        double s = 0.0;
        for (int mu = 0; mu < n; ++mu)
          s += a0(mu, i) * da[mu](kk, j) - a0(mu, j) * da[mu](kk, i);
        uv(kk) = s;
      }
      Eigen::VectorXd bru = Eigen::VectorXd::Zero(n);  // [AX, Y] = -d_Y(AX)
      Eigen::VectorXd brv = Eigen::VectorXd::Zero(n);  // [X, AY] = d_X(AY)
      for (int kk = 0; kk < n; ++kk) {
        bru(kk) = -da[j](kk, i);
        brv(kk) = da[i](kk, j);
      }
      auy = a0 * bru;
      axv = a0 * brv;
      for (int kk = 0; kk < n; ++kk) out(kk, i, j) = uv(kk) - auy(kk) - axv(kk);
    }
  return out;
}

inline kintegra::ChartPoint random_point(const kintegra::MetricField& m, kintegra::PhiloxRng& rng) {
  return m.point(kintegra::random_admissible_point(m, rng));
}

inline double max_abs_diff(const kintegra::DenseTensor& a, const kintegra::DenseTensor& b) {
  double r = 0.0;
  auto ca = a.components();
  auto cb = b.components();
  for (std::size_t i = 0; i < ca.size(); ++i) r = std::max(r, std::abs(ca[i] - cb[i]));
  return r;
}

}  // namespace testutil
