#pragma once

// Concrete operator systems V ⊆ M_d, their matrix levels M_n(V) and the
// ambient matrix ordering C_n = M_n(V) ∩ PSD.

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "opsys/certificate.hpp"
#include "opsys/matlin.hpp"

namespace opsys {

inline constexpr double kContainsResidual = 1e-9;

struct ContainsResult {
  bool inside = false;
  CVector coeffs;  // complex coefficients over the Hermitian basis
  double residual = 0.0;
};

/// A unital self-adjoint subspace of M_d given by a real-independent
/// Hermitian basis whose real span contains I_d. Immutable.
class OperatorSystemSpace {
 public:
  explicit OperatorSystemSpace(std::vector<CMatrix> basis);

  /// M_d with the Frobenius-orthonormal Hermitian basis
  /// {E_ii, (E_ij+E_ji)/√2, i(E_ij-E_ji)/√2}.
  static OperatorSystemSpace full_matrix_algebra(int d);

  /// Span of `elements` together with I_d; independent Hermitian parts are
  /// kept in order, the identity first.
  static OperatorSystemSpace from_spanning_set(int d, const std::vector<CMatrix>& elements);

  int ambient_dim() const { return d_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<CMatrix>& basis() const { return basis_; }
  const RVector& unit_coefficients() const { return unit_coeffs_; }
  CMatrix unit() const { return identity(d_); }

  ContainsResult contains(const CMatrix& x) const;

  /// Σ_k coeffs_k basis_k.
  CMatrix combine(const CVector& coeffs) const;

  /// Frobenius-orthonormal Hermitian basis of V_h (same real span as basis()).
  const std::vector<CMatrix>& orthonormal_basis() const { return orthonormal_; }

  /// M_n(V) as an operator system inside M_{nd}.
  OperatorSystemSpace amplify(int n) const;

 private:
  int d_ = 0;
  std::vector<CMatrix> basis_;
  std::vector<CMatrix> orthonormal_;
  RMatrix gram_;
  Eigen::LDLT<RMatrix> gram_solver_;
  RVector unit_coeffs_;

  RVector real_coefficients(const CMatrix& hermitian) const;
};

using SpacePtr = std::shared_ptr<const OperatorSystemSpace>;

inline SpacePtr make_space(OperatorSystemSpace v) {
  return std::make_shared<const OperatorSystemSpace>(std::move(v));
}

/// An element of M_n(V): the nd×nd block matrix and the coefficient vector of
/// every d×d entry over V's basis.
class LevelElement {
 public:
  /// Throws ShapeMismatch or EntryNotInSystem.
  static LevelElement from_block(const OperatorSystemSpace& v, const CMatrix& block);
  static LevelElement from_coefficients(const OperatorSystemSpace& v, int n, std::vector<CVector> coeffs);
  static LevelElement unit(const OperatorSystemSpace& v, int n);
  static LevelElement zero(const OperatorSystemSpace& v, int n);

  int level() const { return n_; }
  int entry_dim() const { return d_; }
  const CMatrix& block() const { return block_; }
  CMatrix entry(int i, int j) const { return block_.block(i * d_, j * d_, d_, d_); }
  const CVector& coeffs(int i, int j) const { return coeffs_[static_cast<std::size_t>(i * n_ + j)]; }
  bool is_hermitian(double tol = kHermitianTol) const { return opsys::is_hermitian(block_, tol); }

  LevelElement operator+(const LevelElement& o) const;
  LevelElement operator-(const LevelElement& o) const;
  LevelElement operator*(double s) const;
  LevelElement operator-() const { return *this * -1.0; }

 private:
  LevelElement(int n, int d, CMatrix block, std::vector<CVector> coeffs)
      : n_(n), d_(d), block_(std::move(block)), coeffs_(std::move(coeffs)) {}
  int n_ = 0;
  int d_ = 0;
  CMatrix block_;
  std::vector<CVector> coeffs_;
};

/// x ⊕ y at level n + m.
LevelElement direct_sum(const OperatorSystemSpace& v, const LevelElement& x, const LevelElement& y);

/// (α* ⊗ I_d) x (α ⊗ I_d) for a scalar n×m matrix α.
LevelElement compress_scalar(const OperatorSystemSpace& v, const LevelElement& x, const CMatrix& alpha);

/// Throws EntryNotInSystem if some d×d entry of `block` lies outside V.
void require_entries_in(const OperatorSystemSpace& v, const CMatrix& block);

ConeCertificate cone_membership(const OperatorSystemSpace& v, const LevelElement& x, double tol = kDefaultPsdTol);

double order_norm_hermitian(const OperatorSystemSpace& v, const LevelElement& x);

/// Minimal order norm on Hermitian elements; it coincides with the order norm there.
double minimal_order_norm_hermitian(const OperatorSystemSpace& v, const LevelElement& x);

struct OrderUnitReport {
  int trials = 0;
  int failures = 0;
  double worst_lambda = 0.0;  // smallest λ_min(r e_n - x) seen
};

OrderUnitReport matrix_order_unit_check(const OperatorSystemSpace& v, int n_max, int trials, std::uint64_t seed);

}  // namespace opsys
