#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kintegra/expr.hpp"
#include "kintegra/rng.hpp"
#include "kintegra/tensor.hpp"

namespace kintegra {

// A point in the chart, with the domain check already applied.
struct ChartPoint {
  std::vector<double> coords;
  bool admissible = true;
  int dim() const { return static_cast<int>(coords.size()); }
};

enum class MetricKind { Euclidean, Minkowski, SphereStereographic, HyperbolicBall, Expression };

// Metric tensor field on a single chart. Built-in families carry closed-form
// component derivatives; expression metrics fall back to central differences
// with one Richardson extrapolation level.
class MetricField {
 public:
  static MetricField euclidean(int dim);
  static MetricField minkowski(Signature sig);
  static MetricField sphere_stereographic(int dim, double radius);
  static MetricField hyperbolic_ball(int dim, double radius);
  // entries indexed (i, j), 1-based, upper triangle i <= j
  static MetricField expression(int dim, std::vector<std::vector<Expr>> upper,
                                std::optional<Signature> sig = std::nullopt);
  static MetricField from_text(std::string_view text);
  static MetricField from_file(const std::string& path);

  int dim() const { return dim_; }
  MetricKind kind() const { return kind_; }
  Signature signature() const { return sig_; }
  double radius() const { return radius_; }

  ChartPoint point(std::vector<double> coords) const;
  bool admissible(std::span<const double> coords) const;

  DenseTensor metric_at(const ChartPoint& p) const;           // g_ab
  DenseTensor inverse_metric_at(const ChartPoint& p) const;   // g^ab
  DenseTensor metric_partials_at(const ChartPoint& p) const;  // (a,b,c) = d_c g_ab
  DenseTensor christoffel_at(const ChartPoint& p) const;      // (a,b,c) = Gamma^a_bc

  bool operator==(const MetricField& o) const;

 private:
  MetricField() = default;
  Eigen::MatrixXd eval_components(std::span<const double> x) const;
  std::vector<double> conformal_log_gradient(std::span<const double> x) const;  // psi_c

  MetricKind kind_ = MetricKind::Euclidean;
  int dim_ = 0;
  Signature sig_{};
  double radius_ = 0.0;
  std::vector<std::vector<Expr>> upper_;  // expression metrics only
};

// Seeded sample from the chart domain: coordinates uniform in [-2, 2] (scaled
// into the ball for hyperbolic charts), redrawn until admissible.
std::vector<double> random_admissible_point(const MetricField& m, PhiloxRng& rng);

}  // namespace kintegra
