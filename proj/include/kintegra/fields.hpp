#pragma once

#include <memory>
#include <vector>

#include "kintegra/expr.hpp"
#include "kintegra/metric.hpp"
#include "kintegra/tensor.hpp"

namespace kintegra {

// A symmetric covariant 2-tensor field on a chart. value_at must be bitwise
// symmetric; partials_at(a,b,c) = d_c K_ab likewise in (a,b).
class SymmetricTensorField {
 public:
  virtual ~SymmetricTensorField() = default;
  virtual DenseTensor value_at(const ChartPoint& p) const = 0;
  virtual DenseTensor partials_at(const ChartPoint& p) const = 0;
  virtual const MetricField& space() const = 0;
};

// K = g itself (trivially a Killing tensor on any space).
class MetricTensorField final : public SymmetricTensorField {
 public:
  explicit MetricTensorField(MetricField space) : space_(std::move(space)) {}
  DenseTensor value_at(const ChartPoint& p) const override { return space_.metric_at(p); }
  DenseTensor partials_at(const ChartPoint& p) const override {
    return space_.metric_partials_at(p);
  }
  const MetricField& space() const override { return space_; }

 private:
  MetricField space_;
};

// Components given as expressions in the chart coordinates; derivatives by
// central differences with one Richardson level.
class ExprSymmetricField final : public SymmetricTensorField {
 public:
  // upper triangle rows: entries (i, i..dim), 1-based
  ExprSymmetricField(MetricField space, std::vector<std::vector<Expr>> upper);
  DenseTensor value_at(const ChartPoint& p) const override;
  DenseTensor partials_at(const ChartPoint& p) const override;
  const MetricField& space() const override { return space_; }

 private:
  Eigen::MatrixXd eval_components(std::span<const double> x) const;
  MetricField space_;
  std::vector<std::vector<Expr>> upper_;
};

// (a,b,c) = K_ab;c — the chart partials corrected by the Levi-Civita
// connection of m; exactly symmetric in (a,b).
DenseTensor covariant_derivative_sym2(const SymmetricTensorField& k, const MetricField& m,
                                      const ChartPoint& p);

// Magnitude below which an assembled covariant derivative of k at p cannot be
// told apart from zero: the rounding scale of the partials-minus-connection
// sum. A derivative with max-abs at or under this floor certifies a parallel
// field (relative residuals are then zero by convention, not 0/0 noise).
double covariant_zero_floor(const SymmetricTensorField& k, const MetricField& m,
                            const ChartPoint& p);

}  // namespace kintegra
