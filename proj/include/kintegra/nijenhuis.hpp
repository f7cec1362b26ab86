#pragma once

#include <array>
#include <optional>

#include "kintegra/fields.hpp"
#include "kintegra/metric.hpp"
#include "kintegra/tensor.hpp"

namespace kintegra {

// Nijenhuis torsion N^a_bc of the endomorphism g^{-1}K, assembled from the
// covariant derivative of K with the 1/2-normalized pair antisymmetrization;
// the coordinate-free bracket definition equals exactly twice this tensor.
// Antisymmetric in (b, c) bitwise.
DenseTensor torsion_at(const SymmetricTensorField& k, const MetricField& m, const ChartPoint& p);

// Haantjes tensor H^a_bc built from the torsion by the usual four-term sum;
// same layout and exact antisymmetry as torsion_at.
DenseTensor haantjes_at(const SymmetricTensorField& k, const MetricField& m, const ChartPoint& p);

// The three integrability conditions: total antisymmetrization of the torsion
// lowered with g, with K, and with K·g^{-1}·K. rel[i] is max-abs scaled by
// (1 + |K|)^i * |∇K| and verdict[i] = rel[i] <= tol; a ∇K under the
// covariant_zero_floor certifies a parallel field and all rel are zero.
struct ConditionResiduals {
  DenseTensor c1, c2, c3;
  std::array<double, 3> rel;
  std::array<bool, 3> verdict;
  double tol;
};

ConditionResiduals condition_residuals(const SymmetricTensorField& k, const MetricField& m,
                                       const ChartPoint& p, double tol);

// Coefficient of s_abc in the cyclic-sum condition of the given index:
// 0 -> 1, 1 -> (la-lb), 2 -> (la-lb)(la+lb-lc), 3 -> the cubic set. The primed
// variants replace conditions 2 and 3 by (la-lb)(la+lb)^degree; condition 1 is
// its own primed form.
double eigenframe_coefficient(int condition, bool primed, double la, double lb, double lc);

// Cyclic-sum condition tensors in an eigenframe of K: inputs are the
// eigenvalues and the frame components s_abc of ∇K (symmetric in a,b).
// k0 has unit coefficients, k1..k3 the eigenvalue-difference coefficients of
// increasing degree, k2p/k3p the primed variants (k1 primed equals k1).
struct EigenframeConditionTensors {
  DenseTensor k0, k1, k2, k3, k2p, k3p;
};

EigenframeConditionTensors eigenframe_condition_tensors(const Eigen::VectorXd& lambda,
                                                        const DenseTensor& s);

// max-abs of each condition tensor scaled by (1 + |lambda|)^degree * |s|;
// k1p is literally k1 (identical formula).
struct EigenframeResiduals {
  double k0, k1, k2, k3, k1p, k2p, k3p;
};

EigenframeResiduals eigenframe_residuals(const Eigen::VectorXd& lambda, const DenseTensor& s);

// Compare covariant condition verdicts against the eigenframe residuals at
// the same tolerance; nullopt when K has no eigenframe at p.
std::optional<bool> covariant_vs_eigenframe_check(const SymmetricTensorField& k,
                                                  const MetricField& m, const ChartPoint& p,
                                                  double tol);

}  // namespace kintegra
