#pragma once

// Non-signalling and quantum-commuting correlations p(a,b|x,y), and the
// operator systems spanned by generators Q(a,b|x,y).

#include <cstdint>
#include <optional>
#include <vector>

#include "opsys/projection.hpp"

namespace opsys {

inline constexpr double kEntryFloor = 1e-10;
inline constexpr double kNsTol = 1e-9;

/// p(a,b|x,y) for x, y ∈ [0, n) and a, b ∈ [0, k), stored x-major.
class Correlation {
 public:
  Correlation(int n, int k);
  Correlation(int n, int k, std::vector<double> values);

  int n() const { return n_; }
  int k() const { return k_; }
  const std::vector<double>& values() const { return values_; }

  double operator()(int x, int y, int a, int b) const { return values_[index(x, y, a, b)]; }
  double& at(int x, int y, int a, int b) { return values_[index(x, y, a, b)]; }

 private:
  std::size_t index(int x, int y, int a, int b) const {
    return static_cast<std::size_t>(((x * n_ + y) * k_ + a) * k_ + b);
  }
  int n_;
  int k_;
  std::vector<double> values_;
};

struct Marginals {
  RMatrix alice;  // p_A(a|x), row x
  RMatrix bob;    // p_B(b|y), row y
};

/// Throws NotADistribution or SignallingViolation; the detail carries 1-based
/// indices (x, a, y, y') for Alice's marginal and (y, b, x, x') for Bob's.
Marginals validate_ns(const Correlation& corr, double tol = kNsTol);

/// measures[x][a] = P_{x,a}.
struct PVMFamily {
  int dim = 0;
  std::vector<std::vector<CMatrix>> measures;

  int n() const { return static_cast<int>(measures.size()); }
  int k() const { return measures.empty() ? 0 : static_cast<int>(measures.front().size()); }
};

/// Throws ShapeMismatch, NotAProjection, or InvariantViolation if some
/// measurement does not sum to the identity.
void validate_pvm(const PVMFamily& f, double tol = kNsTol);

struct StateFunctional {
  CMatrix rho;
};

/// Throws InvalidState.
void validate_state(const StateFunctional& s, int dim, double tol = kNsTol);

/// p(a,b|x,y) = tr(ρ E_{x,a} F_{y,b}). Throws CommutationViolation.
Correlation qc_from_pvms(const PVMFamily& e, const PVMFamily& f, const StateFunctional& state,
                         double commute_tol = kNsTol);

struct GeneratorVerdict {
  int x = 0, y = 0, a = 0, b = 0;
  bool certified = false;
  std::string method;  // "spectral" or "detector"
  std::optional<ProjectionVerdict> verdict;
};

struct NSOperatorSystem {
  SpacePtr system;
  int n = 0;
  int k = 0;
  std::vector<CMatrix> generators;  // same layout as Correlation
  bool non_signalling_ok = false;
  bool quantum_commuting_ok = false;
  std::vector<GeneratorVerdict> verdicts;

  const CMatrix& q(int x, int y, int a, int b) const {
    return generators[static_cast<std::size_t>(((x * n + y) * k + a) * k + b)];
  }
};

/// V = span{Q(a,b|x,y)} ∪ {I}. Throws NotNonSignalling naming the failing
/// identity.
NSOperatorSystem build_ns_opsys(int n, int k, const std::vector<CMatrix>& generators, double tol = kNsTol);

/// Q(a,b|x,y) = E_{x,a} F_{y,b}.
std::vector<CMatrix> pvm_products(const PVMFamily& e, const PVMFamily& f);

/// Q(a,b|x,y) = p(a,b|x,y)·1 on ℂ.
NSOperatorSystem scalar_ns_opsys(const Correlation& corr, double tol = kNsTol);

/// Spectral oracle first; the detector decides generators the oracle does
/// not recognise as projections.
NSOperatorSystem certify_quantum_commuting(NSOperatorSystem ns, int n_max = 3, int budget = 2000,
                                           std::uint64_t seed = 0, double tol = kDefaultPsdTol);

/// p(a,b|x,y) = tr(ρ Q(a,b|x,y)). Throws InvalidState.
Correlation correlation_from_state(const NSOperatorSystem& ns, const StateFunctional& state);

/// E(a|x) = Σ_b Q(a,b|x,0) and F(b|y) = Σ_a Q(a,b|0,y).
CMatrix alice_marginal_operator(const NSOperatorSystem& ns, int x, int a);
CMatrix bob_marginal_operator(const NSOperatorSystem& ns, int y, int b);

/// (1/4) Σ_{x,y} Σ_{a⊕b = xy} p(a,b|x,y), labels 1, 2 read as bits 0, 1.
/// Throws ShapeMismatch unless n = k = 2.
double chsh_value(const Correlation& corr);

/// Alice measures at angles 0, π/4 and Bob at π/8, -π/8 on ℂ² ⊗ ℂ².
std::pair<PVMFamily, PVMFamily> tsirelson_pvms();
StateFunctional maximally_entangled_state(int local_dim);

/// p(a,b|x,y) = [a = fa(x)]·[b = fb(y)].
Correlation deterministic_correlation(int k, const std::vector<int>& fa, const std::vector<int>& fb);

/// Best CHSH value over the 16 deterministic strategies.
double best_classical_chsh();

}  // namespace opsys
