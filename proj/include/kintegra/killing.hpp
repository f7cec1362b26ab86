#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kintegra/fields.hpp"
#include "kintegra/metric.hpp"
#include "kintegra/tensor.hpp"

namespace kintegra {

// One isometry generator of a built-in space, with closed-form components and
// jacobian. Names use 1-based axes: T1 (translation), R12 (rotation in the
// 1-2 plane), B13 (boost mixing a plus and a minus axis).
class KillingVector {
 public:
  enum class Kind { Translation, Rotation, Boost, SphereRotation, HyperbolicBoost };

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const MetricField& space() const { return space_; }

  Eigen::VectorXd value_at(std::span<const double> x) const;     // V^mu
  Eigen::MatrixXd jacobian_at(std::span<const double> x) const;  // (mu, nu) = d_nu V^mu

 private:
  friend std::vector<KillingVector> killing_generators(const MetricField& space);
  KillingVector(Kind kind, int i, int j, MetricField space, std::string name)
      : kind_(kind), i_(i), j_(j), space_(std::move(space)), name_(std::move(name)) {}

  Kind kind_;
  int i_;  // 0-based axis (first plane axis, or translation/ambient axis)
  int j_;  // 0-based second plane axis (unused for translations/ambient kinds)
  MetricField space_;
  std::string name_;
};

// Full isometry algebra basis of a built-in space; throws for expression
// metrics (no closed-form catalog).
std::vector<KillingVector> killing_generators(const MetricField& space);
std::optional<KillingVector> find_generator(const MetricField& space, std::string_view name);

// First-order Killing residual d_a V_b + d_b V_a - 2 Gamma^d_ab V_d of a
// generator (V lowered with g); zero up to rounding for catalog members.
DenseTensor killing_vector_residual(const KillingVector& v, const ChartPoint& p);

// Pointwise symmetric product K_ab = (V_a W_b + V_b W_a) / 2 with indices
// lowered by the metric of the (shared) space.
DenseTensor symmetric_product(const KillingVector& v, const KillingVector& w, const ChartPoint& p);

// Sum of coeff * (v ⊙ w) terms; a second-order Killing tensor field with
// closed-form derivatives.
class KillingTensorField final : public SymmetricTensorField {
 public:
  struct Term {
    double coeff;
    KillingVector v;
    KillingVector w;
  };

  KillingTensorField(MetricField space, std::vector<Term> terms);
  DenseTensor value_at(const ChartPoint& p) const override;
  DenseTensor partials_at(const ChartPoint& p) const override;
  const MetricField& space() const override { return space_; }
  const std::vector<Term>& terms() const { return terms_; }

 private:
  MetricField space_;
  std::vector<Term> terms_;
};

// All products of generator pairs (i <= j): g(g+1)/2 fields for g generators.
std::vector<KillingTensorField> killing_basis(const MetricField& space);

// Killing equation residual: cyclic sum over all three slots of the covariant
// derivative of k; exactly totally symmetric (assembled orbit-wise).
DenseTensor killing_residual(const SymmetricTensorField& k, const MetricField& m,
                             const ChartPoint& p);

// max-abs of killing_residual scaled by the covariant-derivative norm; zero
// when ∇k sits under the covariant_zero_floor (a parallel field is Killing)
double killing_residual_relative(const SymmetricTensorField& k, const MetricField& m,
                                 const ChartPoint& p);

// Killing field files: '#' comments, blank lines, and lines
//   term <coeff> <generator> <generator>
KillingTensorField killing_field_from_text(const MetricField& space, std::string_view text);
KillingTensorField killing_field_from_file(const MetricField& space, const std::string& path);

}  // namespace kintegra
