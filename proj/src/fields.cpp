#include "kintegra/fields.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kintegra {

ExprSymmetricField::ExprSymmetricField(MetricField space, std::vector<std::vector<Expr>> upper)
    : space_(std::move(space)), upper_(std::move(upper)) {
  const int dim = space_.dim();
  if (static_cast<int>(upper_.size()) != dim)
    throw std::invalid_argument("ExprSymmetricField: need one row per dimension");
  for (int i = 0; i < dim; ++i) {
    if (static_cast<int>(upper_[i].size()) != dim - i)
      throw std::invalid_argument("ExprSymmetricField: row " + std::to_string(i + 1) +
                                  " must hold entries (i, i..dim)");
    for (const Expr& e : upper_[i]) {
      if (e.empty()) throw std::invalid_argument("ExprSymmetricField: missing entry");
      if (e.max_var_index() > dim)
        throw std::invalid_argument("ExprSymmetricField: entry references x" +
                                    std::to_string(e.max_var_index()) + " beyond dim");
    }
  }
}

Eigen::MatrixXd ExprSymmetricField::eval_components(std::span<const double> x) const {
  const int dim = space_.dim();
  Eigen::MatrixXd k(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      const double v = upper_[i][j - i].eval(x);
      k(i, j) = v;
      k(j, i) = v;
    }
  return k;
}

DenseTensor ExprSymmetricField::value_at(const ChartPoint& p) const {
  if (!p.admissible || p.dim() != space_.dim())
    throw std::domain_error("ExprSymmetricField: point is not admissible");
  DenseTensor k = from_matrix(eval_components(p.coords), Variance::Covariant, Variance::Covariant);
  k.declare_symmetry({0, 1, SymmetryKind::Symmetric});
  return k;
}

DenseTensor ExprSymmetricField::partials_at(const ChartPoint& p) const {
  if (!p.admissible || p.dim() != space_.dim())
    throw std::domain_error("ExprSymmetricField: point is not admissible");
  const int dim = space_.dim();
  DenseTensor dk(dim, {Variance::Covariant, Variance::Covariant, Variance::Covariant});
  std::vector<double> x(p.coords);
  static const double h0 = std::cbrt(std::numeric_limits<double>::epsilon());
  for (int c = 0; c < dim; ++c) {
    const double orig = x[c];
    const double h = h0 * (1.0 + std::abs(orig));
    auto delta = [&](double step) {
      x[c] = orig + step;
      const Eigen::MatrixXd kp = eval_components(x);
      x[c] = orig - step;
      const Eigen::MatrixXd km = eval_components(x);
      x[c] = orig;
      return ((kp - km) / (2.0 * step)).eval();
    };
    const Eigen::MatrixXd d = (4.0 * delta(h / 2) - delta(h)) / 3.0;
    for (int a = 0; a < dim; ++a)
      for (int b = a; b < dim; ++b) {
        dk(a, b, c) = d(a, b);
        dk(b, a, c) = d(a, b);
      }
  }
  dk.declare_symmetry({0, 1, SymmetryKind::Symmetric});
  return dk;
}

double covariant_zero_floor(const SymmetricTensorField& k, const MetricField& m,
                            const ChartPoint& p) {
  const double n = m.dim();
  const double term = k.partials_at(p).max_abs() +
                      2.0 * m.christoffel_at(p).max_abs() * k.value_at(p).max_abs();
  return 256.0 * n * n * std::numeric_limits<double>::epsilon() * term;
}

DenseTensor covariant_derivative_sym2(const SymmetricTensorField& k, const MetricField& m,
                                      const ChartPoint& p) {
  if (!(k.space() == m))
    throw std::invalid_argument("covariant_derivative_sym2: field lives on a different space");
  const int n = m.dim();
  const DenseTensor kv = k.value_at(p);
  const DenseTensor dk = k.partials_at(p);
  const DenseTensor gamma = m.christoffel_at(p);
  DenseTensor out(n, {Variance::Covariant, Variance::Covariant, Variance::Covariant});
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double v = dk(a, b, c);
        for (int d = 0; d < n; ++d)
          v -= gamma(d, c, a) * kv(d, b) + gamma(d, c, b) * kv(a, d);
        out(a, b, c) = v;
        out(b, a, c) = v;
      }
  out.declare_symmetry({0, 1, SymmetryKind::Symmetric});
  return out;
}

}  // namespace kintegra
