#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace kintegra {

enum class Variance { Covariant, Contravariant };

enum class SymmetryKind { Symmetric, Antisymmetric };

// A verified exchange symmetry between two slots of equal variance.
struct SlotSymmetry {
  int slot_a = 0;
  int slot_b = 1;
  SymmetryKind kind = SymmetryKind::Symmetric;
};

// Metric signature: `plus` positive squares followed by `minus` negative ones.
struct Signature {
  int plus = 0;
  int minus = 0;
  int dim() const { return plus + minus; }
  bool riemannian() const { return minus == 0; }
  bool operator==(const Signature&) const = default;
};

// Dense tensor value at a single point. Components are row-major (last index
// fastest); dimension 2..8, order 0..4. Symmetry annotations are verified on
// declaration and carried along for documentation/assertions.
class DenseTensor {
 public:
  DenseTensor(int dim, std::vector<Variance> variance);

  int dim() const { return dim_; }
  int order() const { return static_cast<int>(variance_.size()); }
  Variance variance(int slot) const;
  const std::vector<Variance>& variances() const { return variance_; }

  std::size_t size() const { return comp_.size(); }
  std::span<const double> components() const { return comp_; }
  std::span<double> mutable_components() { return comp_; }

  double value(std::span<const int> idx) const { return comp_[flat_index(idx)]; }
  void set_value(std::span<const int> idx, double v) { comp_[flat_index(idx)] = v; }

  template <class... Ix>
  double operator()(Ix... ix) const {
    const std::array<int, sizeof...(Ix)> idx{static_cast<int>(ix)...};
    return comp_[flat_index(idx)];
  }
  template <class... Ix>
  double& operator()(Ix... ix) {
    const std::array<int, sizeof...(Ix)> idx{static_cast<int>(ix)...};
    return comp_[flat_index(idx)];
  }

  // Verifies the symmetry holds exactly (bitwise) and records it; throws
  // std::invalid_argument when it does not.
  void declare_symmetry(SlotSymmetry s);
  const std::vector<SlotSymmetry>& symmetries() const { return symmetries_; }
  bool has_symmetry(int slot_a, int slot_b, SymmetryKind kind) const;

  double max_abs() const;
  bool same_shape(const DenseTensor& o) const;

  DenseTensor& operator+=(const DenseTensor& o);
  DenseTensor& operator-=(const DenseTensor& o);
  DenseTensor& operator*=(double s);
  friend DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
  friend DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }
  friend DenseTensor operator*(double s, DenseTensor t) { return t *= s; }

  std::size_t flat_index(std::span<const int> idx) const;

 private:
  int dim_;
  std::vector<Variance> variance_;
  std::vector<SlotSymmetry> symmetries_;
  std::vector<double> comp_;
};

namespace detail {

// Visit every multi-index of the given order; f receives a span of `order` ints.
template <class F>
inline void for_each_index(int dim, int order, F&& f) {
  std::array<int, 4> idx{};
  if (order == 0) {
    f(std::span<const int>(idx.data(), 0));
    return;
  }
  while (true) {
    f(std::span<const int>(idx.data(), static_cast<std::size_t>(order)));
    int k = order - 1;
    while (k >= 0 && ++idx[k] == dim) {
      idx[k] = 0;
      --k;
    }
    if (k < 0) break;
  }
}

}  // namespace detail

// Total antisymmetrization (1/6-normalized projector) over three distinct
// slots of equal variance. Entries with a repeated index in those slots are
// exactly zero and the result is bitwise antisymmetric (each orbit is written
// from a single computed value).
DenseTensor antisymmetrize3(const DenseTensor& t, std::array<int, 3> slots);

// Sum over the identity and the two cyclic shifts of three distinct slots of
// equal variance (no normalization).
DenseTensor cyclic_sum3(const DenseTensor& t, std::array<int, 3> slots);

// Contract a covariant slot with the inverse metric / a contravariant slot
// with the metric; the slot's variance flips, everything else is unchanged.
DenseTensor raise_index(const DenseTensor& t, int slot, const DenseTensor& inverse_metric);
DenseTensor lower_index(const DenseTensor& t, int slot, const DenseTensor& metric);

// Contract slot_a of a (summed) against slot_b of b; the slots must have
// opposite variance. Result slots: a's remaining slots then b's.
DenseTensor contract(const DenseTensor& a, int slot_a, const DenseTensor& b, int slot_b);

// Pointwise frame data: columns of `frame` are the basis vectors e_a expressed
// in chart coordinates, eigenvalues[a] the matching eigenvalue, and
// normal_squares[a] = g(e_a, e_a) = ±1.
struct EigenFrame {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd frame;
  Eigen::VectorXd normal_squares;
};

// Eigenframe of the endomorphism g^{-1}c for a symmetric bilinear form c:
// returns a frame with c(e_a, e_b) = lambda_a * normal_squares[a] * delta_ab
// and g(e_a, e_b) = normal_squares[a] * delta_ab, eigenvalues ascending.
// Riemannian signatures always succeed; otherwise returns nullopt when the
// endomorphism has complex eigenvalues, is defective, or an eigenspace is
// degenerate with respect to g.
std::optional<EigenFrame> generalized_eigenframe(const DenseTensor& c, const DenseTensor& g,
                                                 const Signature& sig);

// Express a tensor in the given frame: covariant slots contract with the frame
// matrix, contravariant slots with its inverse.
DenseTensor frame_transform(const DenseTensor& t, const EigenFrame& frame);

// order-2 conversions
Eigen::MatrixXd to_matrix(const DenseTensor& t);
DenseTensor from_matrix(const Eigen::MatrixXd& m, Variance row, Variance col);

// Orthonormal basis (columns) of the nullspace of A, singular values at or
// below rel_tol * sigma_max counting as zero. A matrix with no rows has the
// full space as nullspace.
Eigen::MatrixXd nullspace_basis(const Eigen::MatrixXd& a, double rel_tol = 1e-10);
int matrix_rank(const Eigen::MatrixXd& a, double rel_tol = 1e-10);

}  // namespace kintegra
