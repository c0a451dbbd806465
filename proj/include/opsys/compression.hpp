#pragma once

// Cones C(p_n) induced by a positive contraction p, the null space J_p and
// the direct-sum constructions p ⊕ q and ⊕_i p^i ⊕ ⊕_i q^i.

#include <optional>
#include <vector>

#include "opsys/certificate.hpp"
#include "opsys/system.hpp"

namespace opsys {

inline constexpr double kProjectionTol = 1e-9;
inline constexpr double kContractionTol = 1e-8;
inline constexpr double kTCap = 1e12;

/// Descending ε values standing in for "for every ε > 0".
std::vector<double> default_eps_schedule();

/// A positive contraction 0 ⪯ p ⪯ e inside V, with q = e - p.
class ContractionData {
 public:
  /// Throws NonHermitianInput, EntryNotInSystem or NonContraction.
  ContractionData(SpacePtr system, const CMatrix& p);

  const OperatorSystemSpace& system() const { return *system_; }
  const SpacePtr& system_ptr() const { return system_; }
  const CMatrix& p() const { return p_; }
  const CMatrix& q() const { return q_; }
  bool is_projection(double tol = kProjectionTol) const;

  CMatrix p_level(int n) const { return kron(identity(n), p_); }
  CMatrix q_level(int n) const { return kron(identity(n), q_); }

 private:
  SpacePtr system_;
  CMatrix p_;
  CMatrix q_;
};

struct TSearchResult {
  double best_t = 0.0;
  double best_value = 0.0;
  bool cap_reached = false;
  int evaluations = 0;
};

/// Maximizes the concave g(t) = λ_min(base + t·direction) over t ≥ 0 by
/// doubling T until g(T) ≤ g(T/2), then ternary search on [0, T].
TSearchResult maximize_min_eig_along(const CMatrix& base, const CMatrix& direction, double t_cap = kTCap);

/// x ∈ C(p_n): for every ε in the schedule, max_t λ_min(x + ε p_n + t q_n).
ConeCertificate abstract_cone_membership(const ContractionData& c, const LevelElement& x,
                                         double tol = kDefaultPsdTol,
                                         const std::vector<double>& eps_schedule = default_eps_schedule());

/// p_n x p_n ⪰ 0 for a projection p. Throws NotAProjection.
bool concrete_cone_membership(const ContractionData& c, const LevelElement& x, double tol = kDefaultPsdTol);

/// λ_min of x compressed to range(p_n) (+∞ when p = 0). Throws NotAProjection.
double compressed_lambda_min(const ContractionData& c, const LevelElement& x);

struct EpsilonWitness {
  double epsilon = 0.0;
  double t = 0.0;
  double lambda_min = 0.0;
  bool applicable = false;  // only meaningful when p x p ⪰ 0
  bool verified = false;
};

struct EquivalenceReport {
  ConeCertificate abstract_cert;
  bool concrete = false;
  bool agree = false;
  EpsilonWitness witness;
};

/// Runs both routes on x and replays the explicit t of the equivalence proof:
/// t = ‖x‖ + 10‖x‖²/ε + 1.
EquivalenceReport equivalence_check(const ContractionData& c, const LevelElement& x, double tol = kDefaultPsdTol,
                                    double witness_eps = 0.1,
                                    const std::vector<double>& eps_schedule = default_eps_schedule());

/// Real subspace of Hermitian elements spanning J (complex span = J).
struct JSubspace {
  int level = 1;
  std::vector<CMatrix> basis;  // Frobenius-orthonormal Hermitian matrices
  bool heuristic = false;

  int dim() const { return static_cast<int>(basis.size()); }
  /// Frobenius residual of x after projecting on the complex span.
  double residual(const CMatrix& x) const;
  CMatrix project(const CMatrix& x) const;
};

enum class JPath { Auto, Concrete, Abstract };

JSubspace compute_J(const ContractionData& c, JPath path = JPath::Auto,
                    const std::vector<double>& eps_schedule = default_eps_schedule());

/// M_n(J) spanned by |i><j| ⊗ j_k (Hermitian combinations).
JSubspace amplify_J(const JSubspace& j, int n);

struct AmplificationReport {
  int dim_amplified = 0;
  int dim_direct = 0;
  double amplified_in_direct = 0.0;  // max residual
  double direct_in_amplified = 0.0;
};

/// Compares amplify_J(J, n) against J_{p_n} computed directly in M_n(V).
AmplificationReport verify_amplification(const ContractionData& c, const JSubspace& j, int n);

/// p ⊕ q as a positive contraction of M_2(V); its complement is q ⊕ p.
ContractionData direct_sum_contraction(const ContractionData& c);

/// Decides x ∈ C((p ⊕ q)_n) for a level-n element of M_2(V) through the
/// canonical shuffle onto C(p_n ⊕ q_n).
ConeCertificate shuffled_direct_sum_membership(const ContractionData& c, const LevelElement& x_m2v,
                                               double tol = kDefaultPsdTol,
                                               const std::vector<double>& eps_schedule = default_eps_schedule());

/// P ⊕ Q over M_{2N}(V) for P = ⊕ p^i, Q = ⊕ (e - p^i).
/// Throws NotAProjection, EmptyFamily, or TrivialUnit when every p^i = 0.
ContractionData family_compression(const SpacePtr& v, const std::vector<CMatrix>& family);

}  // namespace opsys
