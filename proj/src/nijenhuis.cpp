#include "kintegra/nijenhuis.hpp"

#include <cmath>

namespace kintegra {

namespace {

// K^a_b and K^a_b;c (first index raised with the inverse metric)
struct RaisedData {
  Eigen::MatrixXd kup;     // (a, b)
  DenseTensor dup;         // (a, b, c) = K^a_b;c
  DenseTensor kcov;        // K_ab
  DenseTensor dcov;        // K_ab;c
};

RaisedData raised_data(const SymmetricTensorField& k, const MetricField& m, const ChartPoint& p) {
  const int n = m.dim();
  RaisedData r{Eigen::MatrixXd::Zero(n, n),
               DenseTensor(n, {Variance::Contravariant, Variance::Covariant, Variance::Covariant}),
               k.value_at(p), covariant_derivative_sym2(k, m, p)};
  const DenseTensor ginv = m.inverse_metric_at(p);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double kv = 0.0;
      for (int d = 0; d < n; ++d) kv += ginv(a, d) * r.kcov(d, b);
      r.kup(a, b) = kv;
      for (int c = 0; c < n; ++c) {
        double dv = 0.0;
        for (int d = 0; d < n; ++d) dv += ginv(a, d) * r.dcov(d, b, c);
        r.dup(a, b, c) = dv;
      }
    }
  return r;
}

DenseTensor torsion_from(const RaisedData& rd, int n) {
  DenseTensor t(n, {Variance::Contravariant, Variance::Covariant, Variance::Covariant});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = b + 1; c < n; ++c) {
        double v = 0.0;
        for (int d = 0; d < n; ++d) {
          v += rd.kup(a, d) * (rd.dup(d, b, c) - rd.dup(d, c, b));
          v += rd.kup(d, b) * rd.dup(a, c, d) - rd.kup(d, c) * rd.dup(a, b, d);
        }
        v *= 0.5;
        t(a, b, c) = v;
        t(a, c, b) = -v;
      }
  t.declare_symmetry({1, 2, SymmetryKind::Antisymmetric});
  return t;
}

}  // namespace

DenseTensor torsion_at(const SymmetricTensorField& k, const MetricField& m, const ChartPoint& p) {
  return torsion_from(raised_data(k, m, p), m.dim());
}

DenseTensor haantjes_at(const SymmetricTensorField& k, const MetricField& m, const ChartPoint& p) {
  const int n = m.dim();
  const RaisedData rd = raised_data(k, m, p);
  const DenseTensor t = torsion_from(rd, n);
  const Eigen::MatrixXd k2 = rd.kup * rd.kup;
  DenseTensor h(n, {Variance::Contravariant, Variance::Covariant, Variance::Covariant});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = b + 1; c < n; ++c) {
        double v = 0.0;
        for (int d = 0; d < n; ++d) {
          v += k2(a, d) * t(d, b, c);
          for (int e = 0; e < n; ++e) {
            v -= rd.kup(a, d) * t(d, e, c) * rd.kup(e, b);
            v -= rd.kup(a, d) * t(d, b, e) * rd.kup(e, c);
            v += t(a, d, e) * rd.kup(d, b) * rd.kup(e, c);
          }
        }
        h(a, b, c) = v;
        h(a, c, b) = -v;
      }
  h.declare_symmetry({1, 2, SymmetryKind::Antisymmetric});
  return h;
}

ConditionResiduals condition_residuals(const SymmetricTensorField& k, const MetricField& m,
                                       const ChartPoint& p, double tol) {
  const int n = m.dim();
  const RaisedData rd = raised_data(k, m, p);
  const DenseTensor t = torsion_from(rd, n);
  const DenseTensor g = m.metric_at(p);

  // lower the torsion's first slot with g, with K, and with K g^{-1} K
  auto lowered = [&](const Eigen::MatrixXd& form) {
    DenseTensor out(n, {Variance::Covariant, Variance::Covariant, Variance::Covariant});
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          double v = 0.0;
          for (int d = 0; d < n; ++d) v += form(a, d) * t(d, b, c);
          out(a, b, c) = v;
        }
    return out;
  };
  const Eigen::MatrixXd gm = to_matrix(g);
  const Eigen::MatrixXd km = to_matrix(rd.kcov);
  const Eigen::MatrixXd k2m = km * rd.kup;  // K_ad K^d_b

  ConditionResiduals out{antisymmetrize3(lowered(gm), {0, 1, 2}),
                         antisymmetrize3(lowered(km), {0, 1, 2}),
                         antisymmetrize3(lowered(k2m), {0, 1, 2}),
                         {},
                         {},
                         tol};
  const double knorm = 1.0 + rd.kcov.max_abs();
  const double dnorm = std::max(rd.dcov.max_abs(), 1e-300);
  const bool parallel = rd.dcov.max_abs() <= covariant_zero_floor(k, m, p);
  const DenseTensor* cs[3] = {&out.c1, &out.c2, &out.c3};
  double scale = dnorm;
  for (int i = 0; i < 3; ++i) {
    out.rel[i] = parallel ? 0.0 : cs[i]->max_abs() / scale;
    out.verdict[i] = out.rel[i] <= tol;
    scale *= knorm;
  }
  return out;
}

double eigenframe_coefficient(int condition, bool primed, double la, double lb, double lc) {
  switch (condition) {
    case 0: return 1.0;
    case 1: return la - lb;
    case 2:
      return primed ? (la - lb) * (la + lb) : (la - lb) * (la + lb - lc);
    case 3:
      return primed ? (la - lb) * (la + lb) * (la + lb)
                    : (la - lb) * ((la + lb) * (la + lb) - la * lb - lb * lc - lc * la);
  }
  throw std::invalid_argument("eigenframe_coefficient: condition index must be 0..3");
}

namespace {

DenseTensor cyclic_weighted(const Eigen::VectorXd& lambda, const DenseTensor& s, int condition,
                            bool primed) {
  const int n = s.dim();
  DenseTensor out(n, {Variance::Covariant, Variance::Covariant, Variance::Covariant});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        out(a, b, c) =
            eigenframe_coefficient(condition, primed, lambda(a), lambda(b), lambda(c)) * s(a, b, c) +
            eigenframe_coefficient(condition, primed, lambda(b), lambda(c), lambda(a)) * s(b, c, a) +
            eigenframe_coefficient(condition, primed, lambda(c), lambda(a), lambda(b)) * s(c, a, b);
  return out;
}

}  // namespace

EigenframeConditionTensors eigenframe_condition_tensors(const Eigen::VectorXd& lambda,
                                                        const DenseTensor& s) {
  if (s.order() != 3 || lambda.size() != s.dim())
    throw std::invalid_argument("eigenframe_condition_tensors: need order-3 s and matching lambda");
  return {cyclic_weighted(lambda, s, 0, false), cyclic_weighted(lambda, s, 1, false),
          cyclic_weighted(lambda, s, 2, false), cyclic_weighted(lambda, s, 3, false),
          cyclic_weighted(lambda, s, 2, true),  cyclic_weighted(lambda, s, 3, true)};
}

EigenframeResiduals eigenframe_residuals(const Eigen::VectorXd& lambda, const DenseTensor& s) {
  const EigenframeConditionTensors t = eigenframe_condition_tensors(lambda, s);
  const double lscale = 1.0 + lambda.cwiseAbs().maxCoeff();
  const double snorm = std::max(s.max_abs(), 1e-300);
  auto rel = [&](const DenseTensor& c, int degree) {
    double denom = snorm;
    for (int i = 0; i < degree; ++i) denom *= lscale;
    return c.max_abs() / denom;
  };
  EigenframeResiduals r{};
  r.k0 = rel(t.k0, 0);
  r.k1 = rel(t.k1, 1);
  r.k2 = rel(t.k2, 2);
  r.k3 = rel(t.k3, 3);
  r.k1p = r.k1;  // identical coefficient set
  r.k2p = rel(t.k2p, 2);
  r.k3p = rel(t.k3p, 3);
  return r;
}

std::optional<bool> covariant_vs_eigenframe_check(const SymmetricTensorField& k,
                                                  const MetricField& m, const ChartPoint& p,
                                                  double tol) {
  const DenseTensor kv = k.value_at(p);
  const DenseTensor g = m.metric_at(p);
  const std::optional<EigenFrame> frame = generalized_eigenframe(kv, g, m.signature());
  if (!frame) return std::nullopt;
  const DenseTensor d = covariant_derivative_sym2(k, m, p);
  const DenseTensor s = frame_transform(d, *frame);
  const EigenframeResiduals er = eigenframe_residuals(frame->eigenvalues, s);
  const ConditionResiduals cr = condition_residuals(k, m, p, tol);
  const bool agree = cr.verdict[0] == (er.k1 <= tol) && cr.verdict[1] == (er.k2 <= tol) &&
                     cr.verdict[2] == (er.k3 <= tol);
  return agree;
}

}  // namespace kintegra
