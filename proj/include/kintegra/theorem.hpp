#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kintegra/rng.hpp"
#include "kintegra/tensor.hpp"

namespace kintegra {

// Ordered eigenvalue multiplicity pattern, e.g. (2,1) = one double and one
// simple eigenvalue in dimension 3.
struct MultiplicityPattern {
  std::vector<int> parts;
  int total() const;
  static MultiplicityPattern parse(std::string_view s);  // "2,1"
  static MultiplicityPattern distinct(int dim);          // (1,...,1)
  std::string str() const;
  bool operator==(const MultiplicityPattern&) const = default;
};

// Pointwise frame data for the constraint analysis: eigenvalues plus the
// frame components s_abc of a covariant derivative candidate (symmetric in
// a,b). Sampled data satisfies the Killing constraint (vanishing cyclic sum).
struct PointwiseKillingData {
  Eigen::VectorXd lambda;
  DenseTensor s;
};

// Eigenvalues with the given multiplicities (group values standard normal,
// pairwise separation >= 0.5 by rejection; repeated entries bitwise equal).
Eigen::VectorXd sample_lambda(int dim, const MultiplicityPattern& pattern, PhiloxRng& rng);

// Killing-constraint-satisfying random data: normal components projected off
// their totally symmetric part.
PointwiseKillingData sample_pointwise(int dim, const MultiplicityPattern& pattern,
                                      std::uint64_t seed);

enum class KCondition { K0 = 0, K1 = 1, K2 = 2, K3 = 3 };

// Coordinates for (a,b)-symmetric 3-index arrays: one slot per pair a <= b and
// last index c, n(n+1)/2 * n in total.
int coord_count(int dim);
int coord_index(int dim, int a, int b, int c);
Eigen::VectorXd tensor_to_coords(const DenseTensor& s);
DenseTensor coords_to_tensor(int dim, const Eigen::VectorXd& v);

// Stacked linear constraint rows over those coordinates: K0 contributes one
// row per index multiset, K1..K3 one row per strict triple a < b < c (their
// repeated-index rows vanish identically). `primed` swaps in the primed
// coefficient sets for K2/K3.
Eigen::MatrixXd constraint_matrix(const Eigen::VectorXd& lambda, std::span<const KCondition> which,
                                  bool primed = false);

// Orthonormal nullspace basis of constraint_matrix (columns).
Eigen::MatrixXd constraint_solution_space(const Eigen::VectorXd& lambda,
                                          std::span<const KCondition> which, bool primed = false);

// Independent componentwise check of the eigenvalue case analysis on one index
// triple: distinct eigenvalues force the three triple components to vanish;
// one coincidence forces s_abc = -s_bca/2 = s_cab; full coincidence only the
// cyclic sum. Deviations are relative to |s|.
struct VandermondeVerdict {
  enum class EigenCase { Distinct, TwoEqual, AllEqual };
  EigenCase eigencase;
  bool precondition_ok;  // K0, K1, K2 hold on the triple (at 1e-8)
  bool pass;
  double max_deviation;
};

VandermondeVerdict vandermonde_oracle(const Eigen::VectorXd& lambda, std::array<int, 3> triple,
                                      const PointwiseKillingData& data, double tol = 1e-10);

// Randomized + exact verification that the cubic condition adds nothing over
// {K0, K1, K2}: equal nullspace dimensions every trial, and the cubic residual
// of random unit nullspace elements stays below tolerance.
struct TheoremReport {
  int dim = 0;
  MultiplicityPattern pattern;
  long trials = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  double max_k3_residual = 0.0;
  std::array<int, 4> constraint_dims{};  // {K0}, {K0,K1}, {K0,K1,K2}, {K0..K3}
  double elapsed_seconds = 0.0;
  bool verified = false;
};

TheoremReport verify_redundancy(int dim, const MultiplicityPattern& pattern, long trials,
                                std::uint64_t seed, double tolerance);

// A unit element of the {K0,K1} nullspace orthogonal to the {K0,K1,K2}
// nullspace whose quadratic residual is at least 0.1 — evidence that the
// quadratic condition is independent. none when the nullspaces coincide.
struct WitnessResult {
  Eigen::VectorXd lambda;
  DenseTensor s;
  double k2_residual = 0.0;
  int dim_k0k1 = 0;
  int dim_k0k1k2 = 0;
};

std::optional<WitnessResult> independence_witness(int dim, const Eigen::VectorXd& lambda,
                                                  std::uint64_t seed);

}  // namespace kintegra
