#include "kintegra/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace kintegra {

namespace {

std::size_t pow_size(int dim, int order) {
  std::size_t s = 1;
  for (int i = 0; i < order; ++i) s *= static_cast<std::size_t>(dim);
  return s;
}

void check_three_slots(const DenseTensor& t, std::array<int, 3> slots, const char* op) {
  if (t.order() < 3) throw std::invalid_argument(std::string(op) + ": tensor order must be >= 3");
  for (int s : slots) {
    if (s < 0 || s >= t.order())
      throw std::invalid_argument(std::string(op) + ": slot out of range");
  }
  if (slots[0] == slots[1] || slots[0] == slots[2] || slots[1] == slots[2])
    throw std::invalid_argument(std::string(op) + ": slots must be distinct");
  if (t.variance(slots[0]) != t.variance(slots[1]) || t.variance(slots[0]) != t.variance(slots[2]))
    throw std::invalid_argument(std::string(op) + ": slots must have equal variance");
}

}  // namespace

DenseTensor::DenseTensor(int dim, std::vector<Variance> variance)
    : dim_(dim), variance_(std::move(variance)) {
  if (dim_ < 2 || dim_ > 8) throw std::invalid_argument("DenseTensor: dim must be in 2..8");
  if (variance_.size() > 4) throw std::invalid_argument("DenseTensor: order must be <= 4");
  comp_.assign(pow_size(dim_, order()), 0.0);
}

Variance DenseTensor::variance(int slot) const {
  if (slot < 0 || slot >= order()) throw std::out_of_range("DenseTensor: slot out of range");
  return variance_[slot];
}

std::size_t DenseTensor::flat_index(std::span<const int> idx) const {
  if (static_cast<int>(idx.size()) != order())
    throw std::invalid_argument("DenseTensor: index count does not match order");
  std::size_t flat = 0;
  for (int i : idx) {
    if (i < 0 || i >= dim_) throw std::out_of_range("DenseTensor: index out of range");
    flat = flat * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
  }
  return flat;
}

void DenseTensor::declare_symmetry(SlotSymmetry s) {
  if (s.slot_a == s.slot_b || s.slot_a < 0 || s.slot_b < 0 || s.slot_a >= order() ||
      s.slot_b >= order())
    throw std::invalid_argument("declare_symmetry: invalid slot pair");
  if (variance_[s.slot_a] != variance_[s.slot_b])
    throw std::invalid_argument("declare_symmetry: slots differ in variance");
  const double sign = s.kind == SymmetryKind::Symmetric ? 1.0 : -1.0;
  bool ok = true;
  detail::for_each_index(dim_, order(), [&](std::span<const int> idx) {
    std::array<int, 4> sw{};
    std::copy(idx.begin(), idx.end(), sw.begin());
    std::swap(sw[s.slot_a], sw[s.slot_b]);
    const double lhs = comp_[flat_index(idx)];
    const double rhs = sign * comp_[flat_index(std::span<const int>(sw.data(), idx.size()))];
    if (lhs != rhs) ok = false;
  });
  if (!ok) throw std::invalid_argument("declare_symmetry: symmetry does not hold exactly");
  symmetries_.push_back(s);
}

bool DenseTensor::has_symmetry(int slot_a, int slot_b, SymmetryKind kind) const {
  for (const auto& s : symmetries_) {
    if (s.kind != kind) continue;
    if ((s.slot_a == slot_a && s.slot_b == slot_b) || (s.slot_a == slot_b && s.slot_b == slot_a))
      return true;
  }
  return false;
}

double DenseTensor::max_abs() const {
  double m = 0.0;
  for (double v : comp_) m = std::max(m, std::abs(v));
  return m;
}

bool DenseTensor::same_shape(const DenseTensor& o) const {
  return dim_ == o.dim_ && variance_ == o.variance_;
}

DenseTensor& DenseTensor::operator+=(const DenseTensor& o) {
  if (!same_shape(o)) throw std::invalid_argument("tensor +: shape mismatch");
  symmetries_.clear();
  for (std::size_t i = 0; i < comp_.size(); ++i) comp_[i] += o.comp_[i];
  return *this;
}

DenseTensor& DenseTensor::operator-=(const DenseTensor& o) {
  if (!same_shape(o)) throw std::invalid_argument("tensor -: shape mismatch");
  symmetries_.clear();
  for (std::size_t i = 0; i < comp_.size(); ++i) comp_[i] -= o.comp_[i];
  return *this;
}

DenseTensor& DenseTensor::operator*=(double s) {
  for (double& v : comp_) v *= s;
  return *this;
}

DenseTensor antisymmetrize3(const DenseTensor& t, std::array<int, 3> slots) {
  check_three_slots(t, slots, "antisymmetrize3");
  DenseTensor r(t.dim(), t.variances());
  // signed permutations of the slot triple, even first
  static constexpr int perm[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1},
                                     {1, 0, 2}, {0, 2, 1}, {2, 1, 0}};
  static constexpr double sgn[6] = {1, 1, 1, -1, -1, -1};
  detail::for_each_index(t.dim(), t.order(), [&](std::span<const int> idx) {
    const int a = idx[slots[0]], b = idx[slots[1]], c = idx[slots[2]];
    if (!(a < b && b < c)) return;  // one canonical representative per orbit
    const int tri[3] = {a, b, c};
    std::array<int, 4> w{};
    std::copy(idx.begin(), idx.end(), w.begin());
    double v = 0.0;
    for (int p = 0; p < 6; ++p) {
      w[slots[0]] = tri[perm[p][0]];
      w[slots[1]] = tri[perm[p][1]];
      w[slots[2]] = tri[perm[p][2]];
      v += sgn[p] * t.value(std::span<const int>(w.data(), idx.size()));
    }
    v /= 6.0;
    for (int p = 0; p < 6; ++p) {
      w[slots[0]] = tri[perm[p][0]];
      w[slots[1]] = tri[perm[p][1]];
      w[slots[2]] = tri[perm[p][2]];
      r.set_value(std::span<const int>(w.data(), idx.size()), sgn[p] * v);
    }
  });
  r.declare_symmetry({slots[0], slots[1], SymmetryKind::Antisymmetric});
  r.declare_symmetry({slots[1], slots[2], SymmetryKind::Antisymmetric});
  return r;
}

DenseTensor cyclic_sum3(const DenseTensor& t, std::array<int, 3> slots) {
  check_three_slots(t, slots, "cyclic_sum3");
  DenseTensor r(t.dim(), t.variances());
  detail::for_each_index(t.dim(), t.order(), [&](std::span<const int> idx) {
    std::array<int, 4> w{};
    std::copy(idx.begin(), idx.end(), w.begin());
    const int a = idx[slots[0]], b = idx[slots[1]], c = idx[slots[2]];
    double v = t.value(idx);
    w[slots[0]] = b; w[slots[1]] = c; w[slots[2]] = a;
    v += t.value(std::span<const int>(w.data(), idx.size()));
    w[slots[0]] = c; w[slots[1]] = a; w[slots[2]] = b;
    v += t.value(std::span<const int>(w.data(), idx.size()));
    r.set_value(idx, v);
  });
  return r;
}

namespace {

DenseTensor contract_slot_with_form(const DenseTensor& t, int slot, const DenseTensor& form,
                                    Variance required, const char* op) {
  if (slot < 0 || slot >= t.order()) throw std::invalid_argument(std::string(op) + ": slot out of range");
  if (t.variance(slot) != required)
    throw std::invalid_argument(std::string(op) + ": slot has the wrong variance");
  if (form.order() != 2 || form.dim() != t.dim())
    throw std::invalid_argument(std::string(op) + ": metric argument must be an order-2 tensor of matching dim");
  const Variance form_var = required == Variance::Covariant ? Variance::Contravariant : Variance::Covariant;
  if (form.variance(0) != form_var || form.variance(1) != form_var)
    throw std::invalid_argument(std::string(op) + ": metric argument has the wrong variance");
  std::vector<Variance> rv = t.variances();
  rv[slot] = form_var;
  DenseTensor r(t.dim(), rv);
  detail::for_each_index(t.dim(), t.order(), [&](std::span<const int> idx) {
    std::array<int, 4> w{};
    std::copy(idx.begin(), idx.end(), w.begin());
    double v = 0.0;
    for (int k = 0; k < t.dim(); ++k) {
      w[slot] = k;
      v += form(idx[slot], k) * t.value(std::span<const int>(w.data(), idx.size()));
    }
    r.set_value(idx, v);
  });
  return r;
}

}  // namespace

DenseTensor raise_index(const DenseTensor& t, int slot, const DenseTensor& inverse_metric) {
  return contract_slot_with_form(t, slot, inverse_metric, Variance::Covariant, "raise_index");
}

DenseTensor lower_index(const DenseTensor& t, int slot, const DenseTensor& metric) {
  return contract_slot_with_form(t, slot, metric, Variance::Contravariant, "lower_index");
}

DenseTensor contract(const DenseTensor& a, int slot_a, const DenseTensor& b, int slot_b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("contract: dimension mismatch");
  if (slot_a < 0 || slot_a >= a.order() || slot_b < 0 || slot_b >= b.order())
    throw std::invalid_argument("contract: slot out of range");
  if (a.variance(slot_a) == b.variance(slot_b))
    throw std::invalid_argument("contract: slots must have opposite variance");
  const int ra = a.order() - 1, rb = b.order() - 1;
  if (ra + rb > 4) throw std::invalid_argument("contract: result order exceeds 4");
  std::vector<Variance> rv;
  for (int i = 0; i < a.order(); ++i)
    if (i != slot_a) rv.push_back(a.variance(i));
  for (int i = 0; i < b.order(); ++i)
    if (i != slot_b) rv.push_back(b.variance(i));
  DenseTensor r(a.dim(), rv);
  detail::for_each_index(a.dim(), ra + rb, [&](std::span<const int> idx) {
    std::array<int, 4> ia{}, ib{};
    int p = 0;
    for (int i = 0; i < a.order(); ++i)
      if (i != slot_a) ia[i] = idx[p++];
    for (int i = 0; i < b.order(); ++i)
      if (i != slot_b) ib[i] = idx[p++];
    double v = 0.0;
    for (int k = 0; k < a.dim(); ++k) {
      ia[slot_a] = k;
      ib[slot_b] = k;
      v += a.value(std::span<const int>(ia.data(), a.order())) *
           b.value(std::span<const int>(ib.data(), b.order()));
    }
    r.set_value(idx, v);
  });
  return r;
}

DenseTensor frame_transform(const DenseTensor& t, const EigenFrame& frame) {
  const int n = t.dim();
  if (frame.frame.rows() != n || frame.frame.cols() != n)
    throw std::invalid_argument("frame_transform: frame size does not match tensor dim");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(frame.frame);
  if (!lu.isInvertible()) throw std::invalid_argument("frame_transform: singular frame matrix");
  const Eigen::MatrixXd inv = lu.inverse();
  DenseTensor cur = t;
  for (int s = 0; s < t.order(); ++s) {
    DenseTensor next(n, t.variances());
    const bool cov = t.variance(s) == Variance::Covariant;
    detail::for_each_index(n, t.order(), [&](std::span<const int> idx) {
      std::array<int, 4> w{};
      std::copy(idx.begin(), idx.end(), w.begin());
      double v = 0.0;
      for (int i = 0; i < n; ++i) {
        w[s] = i;
        const double coef = cov ? frame.frame(i, idx[s]) : inv(idx[s], i);
        v += coef * cur.value(std::span<const int>(w.data(), idx.size()));
      }
      next.set_value(idx, v);
    });
    cur = std::move(next);
  }
  return cur;
}

Eigen::MatrixXd to_matrix(const DenseTensor& t) {
  if (t.order() != 2) throw std::invalid_argument("to_matrix: tensor order must be 2");
  Eigen::MatrixXd m(t.dim(), t.dim());
  for (int i = 0; i < t.dim(); ++i)
    for (int j = 0; j < t.dim(); ++j) m(i, j) = t(i, j);
  return m;
}

DenseTensor from_matrix(const Eigen::MatrixXd& m, Variance row, Variance col) {
  if (m.rows() != m.cols()) throw std::invalid_argument("from_matrix: matrix must be square");
  DenseTensor t(static_cast<int>(m.rows()), {row, col});
  for (int i = 0; i < t.dim(); ++i)
    for (int j = 0; j < t.dim(); ++j) t(i, j) = m(i, j);
  return t;
}

Eigen::MatrixXd nullspace_basis(const Eigen::MatrixXd& a, double rel_tol) {
  const Eigen::Index cols = a.cols();
  if (a.rows() == 0) return Eigen::MatrixXd::Identity(cols, cols);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double tol = rel_tol * smax;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

int matrix_rank(const Eigen::MatrixXd& a, double rel_tol) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double tol = rel_tol * smax;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  return rank;
}

namespace {

// validation shared by both eigenframe paths; frames from exact arithmetic sit
// far inside these bounds
bool frame_valid(const Eigen::MatrixXd& a, const EigenFrame& f, const Eigen::MatrixXd& g) {
  const int n = static_cast<int>(g.rows());
  const Eigen::MatrixXd gram = f.frame.transpose() * g * f.frame;
  Eigen::MatrixXd want = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) want(i, i) = f.normal_squares(i);
  if ((gram - want).cwiseAbs().maxCoeff() > 1e-8) return false;
  const double scale = 1.0 + a.cwiseAbs().maxCoeff();
  const Eigen::MatrixXd resid = a * f.frame - f.frame * f.eigenvalues.asDiagonal();
  return resid.cwiseAbs().maxCoeff() <= 1e-8 * scale;
}

std::optional<EigenFrame> eigenframe_indefinite(const Eigen::MatrixXd& c, const Eigen::MatrixXd& g) {
  const int n = static_cast<int>(g.rows());
  Eigen::JacobiSVD<Eigen::MatrixXd> gsvd(g);
  const auto& gs = gsvd.singularValues();
  if (gs(gs.size() - 1) <= 1e-12 * gs(0))
    throw std::invalid_argument("generalized_eigenframe: singular metric");
  const Eigen::MatrixXd a = g.partialPivLu().solve(c);
  Eigen::EigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) return std::nullopt;
  const double escale = 1.0 + es.eigenvalues().cwiseAbs().maxCoeff();
  for (int i = 0; i < n; ++i)
    if (std::abs(es.eigenvalues()(i).imag()) > 1e-9 * escale) return std::nullopt;

  std::vector<double> evs(n);
  for (int i = 0; i < n; ++i) evs[i] = es.eigenvalues()(i).real();
  std::sort(evs.begin(), evs.end());

  EigenFrame out;
  out.eigenvalues.resize(n);
  out.frame.resize(n, n);
  out.normal_squares.resize(n);
  int col = 0;
  const double group_tol = 1e-9 * escale;
  for (int i = 0; i < n;) {
    int j = i;
    while (j < n && evs[j] - evs[i] <= group_tol) ++j;
    const int mult = j - i;
    double mu = 0.0;
    for (int k = i; k < j; ++k) mu += evs[k];
    mu /= mult;
    // eigenspace as nullspace of (a - mu I); defective pairs come out short
    Eigen::MatrixXd basis = nullspace_basis(a - mu * Eigen::MatrixXd::Identity(n, n), 1e-8);
    if (basis.cols() != mult) return std::nullopt;
    // g-orthonormalize within the eigenspace via the Gram spectral decomposition
    const Eigen::MatrixXd gram = basis.transpose() * g * basis;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ges(gram);
    const Eigen::VectorXd d = ges.eigenvalues();
    const double dmax = d.cwiseAbs().maxCoeff();
    for (int k = 0; k < mult; ++k)
      if (std::abs(d(k)) <= 1e-10 * std::max(dmax, 1e-300)) return std::nullopt;
    for (int k = 0; k < mult; ++k) {
      const Eigen::VectorXd v = basis * ges.eigenvectors().col(k) / std::sqrt(std::abs(d(k)));
      out.frame.col(col) = v;
      out.eigenvalues(col) = mu;
      out.normal_squares(col) = d(k) > 0 ? 1.0 : -1.0;
      ++col;
    }
    i = j;
  }
  if (!frame_valid(a, out, g)) return std::nullopt;
  return out;
}

EigenFrame eigenframe_riemannian(const Eigen::MatrixXd& c, const Eigen::MatrixXd& g) {
  // congruence with the Cholesky factor turns the pencil into an ordinary
  // symmetric eigenproblem; always diagonalizable with an orthonormal frame
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("generalized_eigenframe: metric is not positive definite for the stated signature");
  const Eigen::MatrixXd l = llt.matrixL();
  const Eigen::MatrixXd linv = l.triangularView<Eigen::Lower>().solve(
      Eigen::MatrixXd::Identity(g.rows(), g.rows()));
  const Eigen::MatrixXd b = linv * c * linv.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (b + b.transpose()));
  EigenFrame out;
  out.eigenvalues = es.eigenvalues();
  out.frame = linv.transpose() * es.eigenvectors();
  out.normal_squares = Eigen::VectorXd::Ones(g.rows());
  return out;
}

}  // namespace

std::optional<EigenFrame> generalized_eigenframe(const DenseTensor& c, const DenseTensor& g,
                                                 const Signature& sig) {
  if (c.order() != 2 || g.order() != 2 || c.dim() != g.dim())
    throw std::invalid_argument("generalized_eigenframe: expects two order-2 tensors of equal dim");
  if (c.variance(0) != Variance::Covariant || c.variance(1) != Variance::Covariant ||
      g.variance(0) != Variance::Covariant || g.variance(1) != Variance::Covariant)
    throw std::invalid_argument("generalized_eigenframe: expects covariant bilinear forms");
  if (sig.dim() != g.dim())
    throw std::invalid_argument("generalized_eigenframe: signature does not match dim");
  const Eigen::MatrixXd cm = to_matrix(c);
  const Eigen::MatrixXd gm = to_matrix(g);
  if (sig.riemannian()) {
    EigenFrame f = eigenframe_riemannian(cm, gm);
    const Eigen::MatrixXd a = gm.partialPivLu().solve(cm);
    if (!frame_valid(a, f, gm)) return std::nullopt;  // not reachable for sane input
    return f;
  }
  return eigenframe_indefinite(cm, gm);
}

}  // namespace kintegra
