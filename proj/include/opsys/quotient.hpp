#pragma once

// The abstract compression V/J_p with cones C̃(p_n) and unit p + J_p.

#include <cstdint>
#include <memory>

#include "opsys/compression.hpp"

namespace opsys {

struct QuotientOptions {
  /// Reject p with α_m(p) ≠ 1 (the unit coset degenerates). The projection
  /// detector turns this off so it can still look for witnesses.
  bool require_nontrivial = true;
  JPath j_path = JPath::Auto;
  std::vector<double> eps_schedule = default_eps_schedule();
};

class QuotientSystem {
 public:
  QuotientSystem(ContractionData c, JSubspace j, std::vector<CMatrix> reps, CVector unit_coset)
      : contraction_(std::move(c)), j_(std::move(j)), reps_(std::move(reps)), unit_coset_(std::move(unit_coset)) {}

  const ContractionData& contraction() const { return contraction_; }
  const OperatorSystemSpace& system() const { return contraction_.system(); }
  const JSubspace& J() const { return j_; }
  /// Frobenius-orthonormal Hermitian basis of the complement of J in V.
  const std::vector<CMatrix>& reps() const { return reps_; }
  /// Coordinates of p + J_p over reps().
  const CVector& unit_coset() const { return unit_coset_; }
  int dim() const { return static_cast<int>(reps_.size()); }

  /// Complex coordinates over reps() of the canonical representative of x + J.
  CVector coset_coordinates(const CMatrix& x) const;

 private:
  ContractionData contraction_;
  JSubspace j_;
  std::vector<CMatrix> reps_;
  CVector unit_coset_;
};

/// Throws TrivialUnit when α_m(p) ≠ 1 within 1e-8 (and the option is on).
QuotientSystem build_quotient(const ContractionData& c, const QuotientOptions& options = {});

struct CosetElement {
  LevelElement representative;
  LevelElement reduced;
  int level() const { return representative.level(); }
  bool is_zero(double tol = 1e-9) const { return reduced.block().norm() <= tol; }
};

/// Subtracts the Frobenius-orthogonal projection onto M_n(J).
CosetElement coset_reduce(const QuotientSystem& q, const LevelElement& x);

enum class QuotientPath { Auto, Concrete, General };

struct SubgradientOptions {
  int max_iterations = 5000;
  int restarts = 3;
  int stall_window = 300;
  std::uint64_t seed = 0;
};

ConeCertificate quotient_cone_membership(const QuotientSystem& q, const CosetElement& xc,
                                         double tol = kDefaultPsdTol, QuotientPath path = QuotientPath::Auto,
                                         const std::vector<double>& eps_schedule = default_eps_schedule(),
                                         const SubgradientOptions& sg = {});

struct IsoReport {
  int instances = 0;
  int evaluated = 0;  // margin above the filter
  int agreements = 0;
  double worst_margin = 0.0;  // smallest |compressed λ_min| among evaluated
  int j_instances = 0;
  int j_agreements = 0;
  double j_max_compressed = 0.0;  // max |λ| of the compressed side on M_n(J)
  bool all_agree() const { return agreements == evaluated && j_agreements == j_instances; }
};

/// Quotient membership (general path) against positivity of the compression
/// to range(p_n), on random Hermitian x and on random x ∈ M_n(J).
IsoReport compression_iso_check(const QuotientSystem& q, int n_max, int trials, std::uint64_t seed,
                                double tol = kDefaultPsdTol, int j_trials = 0, double margin_filter = 1e-6,
                                QuotientPath path = QuotientPath::General);

struct UcpReport {
  int trials = 0;
  int failures = 0;
};

/// x ∈ C_n ⟹ x + M_n(J) ∈ C̃(p_n), on random positive x.
UcpReport quotient_map_ucp_check(const QuotientSystem& q, int n_max, int trials, std::uint64_t seed,
                                 double tol = kDefaultPsdTol);

/// Random Hermitian element of M_n(J) built from J's basis.
LevelElement random_J_level(const QuotientSystem& q, int n, std::uint64_t seed);

}  // namespace opsys
