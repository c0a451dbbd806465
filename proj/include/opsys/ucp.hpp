#pragma once

// Unital maps on the abstract compression M_2(V)/J_{p⊕q}, the rescaling that
// turns the image of p ⊕ 0 into a projection, and the resulting
// representation of V in which p becomes a projection.

#include <functional>
#include <vector>

#include "opsys/projection.hpp"
#include "opsys/sampling.hpp"

namespace opsys {

/// A map M_2(V)/J_{p⊕q} → M_k given by an ambient lift L : M_{2d} → M_k,
/// stored as its Choi matrix Σ E_ij ⊗ L(E_ij).
class QuotientMap {
 public:
  QuotientMap(int in_dim, int out_dim, CMatrix choi);
  static QuotientMap from_function(int in_dim, int out_dim, const std::function<CMatrix(const CMatrix&)>& f);

  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }
  const CMatrix& choi() const { return choi_; }

  CMatrix apply(const CMatrix& x) const;
  /// Entrywise on an n×n block matrix with in_dim-sized entries.
  CMatrix apply_level(const CMatrix& x, int n) const;

 private:
  int in_dim_;
  int out_dim_;
  CMatrix choi_;
};

struct AdmissibilityReport {
  bool ok = false;
  double choi_lambda_min = 0.0;
  double unit_error = 0.0;        // ‖L(p ⊕ q) - I‖
  double complement_error = 0.0;  // ‖L(q ⊕ p)‖
  double j_leak = 0.0;            // max ‖L(j)‖ over J's basis
};

/// Sufficient conditions for a ucp map on the quotient: L completely
/// positive, L(p ⊕ q) = I, L(q ⊕ p) = 0 and L(J) = 0.
AdmissibilityReport check_ucp_admissible(const ProjectionContext& ctx, const QuotientMap& phi, double tol = 1e-9);

/// L(X) = Σ_l K_l* W* X W K_l with W an isometry onto range(p ⊕ q) and
/// Σ K_l* K_l = I. Throws NotAProjection.
QuotientMap random_admissible_ucp(const ProjectionContext& ctx, int out_dim, Rng& rng);

struct RescaledMap {
  QuotientMap psi;
  int ones = 0;      // eigenvalues of φ(p ⊕ 0) equal to 1
  int interior = 0;  // eigenvalues strictly inside (0, 1)
  int n = 0;         // output dimension of φ
  RVector interior_values;
  CMatrix eigenbasis;  // columns ordered ones, interior, zeros
};

/// ψ = V_φ-conjugated corners of φ, of output dimension m' + n - m. Throws
/// IllConditioned when an interior eigenvalue sits within 1e-10 of 0 or 1,
/// and InvariantViolation when φ is not unital on p ⊕ q.
RescaledMap rescale_ucp(const ProjectionContext& ctx, const QuotientMap& phi, double tol = 1e-9);

struct TransferSample {
  double phi_lambda_min = 0.0;  // λ_min of φ applied to [[a⊕0, b], [b*, 0⊕c]]
  double psi_lambda_min = 0.0;  // λ_min of ψ applied to [[a, b], [b*, c]]
};

/// Both sides of the positivity transfer for a, c Hermitian and b arbitrary
/// in M_k(V).
TransferSample positivity_transfer(const ProjectionContext& ctx, const QuotientMap& phi, const RescaledMap& psi,
                                   const LevelElement& a, const LevelElement& b, const LevelElement& c);

struct Representation {
  std::vector<RescaledMap> parts;
  int dim = 0;

  /// ⊕_i ψ_i(π_p(x)) for x ∈ M_n(V).
  CMatrix apply(const LevelElement& x) const;
};

/// Throws EmptyFamily, or InvariantViolation if the result is not unital or
/// does not send p to a projection.
Representation projectionizing_representation(const ProjectionContext& ctx, const std::vector<QuotientMap>& phis,
                                              double tol = 1e-9);

}  // namespace opsys
