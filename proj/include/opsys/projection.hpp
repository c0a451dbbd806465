#pragma once

// Abstract projections: the map π_p : x ↦ [[x, x], [x, x]] + J_{p⊕q} into the
// abstract compression M_2(V)/J_{p⊕q}, the block-cone test and a
// semi-decision procedure looking for finite-level counterexamples to π_p
// being a complete order isomorphism.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opsys/quotient.hpp"

namespace opsys {

/// p, its double p ⊕ q over M_2(V) and the quotient M_2(V)/J_{p⊕q}.
struct ProjectionContext {
  ContractionData c;
  ContractionData pq;
  QuotientSystem quotient;
};

/// The quotient is built without the nontriviality requirement so that the
/// detector can still run when α_m(p) < 1.
ProjectionContext make_projection_context(const ContractionData& c,
                                          const std::vector<double>& eps_schedule = default_eps_schedule());

enum class BlockPath { Auto, Fast, General };

/// [[a, x], [x*, b]] ∈ C(p_n ⊕ q_n). The fast path tests
/// p_n a p_n + p_n x q_n + q_n x* p_n + q_n b q_n ⪰ 0 and needs a projection.
bool block_cone_membership(const ContractionData& c, const LevelElement& a, const LevelElement& b,
                           const LevelElement& x_offdiag, double tol = kDefaultPsdTol,
                           BlockPath path = BlockPath::Auto);

/// Level-n element of M_2(V) corresponding to [[x, x], [x, x]] under the
/// canonical shuffle M_2(M_n(V)) → M_n(M_2(V)).
LevelElement doubled_element(const ProjectionContext& ctx, const LevelElement& x);

CosetElement pi_p(const ProjectionContext& ctx, const LevelElement& x);

struct UnitalityReport {
  bool ok = false;
  double worst_lambda = 0.0;
};

/// Replays the explicit certificates showing ±[[0,p],[p,p]] and ±[[q,q],[q,0]]
/// lie in C(p ⊕ q): t = 1/ε for the + sign, t = 1 + 1/ε for the − sign.
UnitalityReport unitality_check(const ContractionData& c, double tol = kDefaultPsdTol,
                                const std::vector<double>& eps_schedule = default_eps_schedule());

struct ForwardReport {
  ConeCertificate ambient;
  ConeCertificate quotient;
  bool agree = false;
};

/// x ∈ C_n versus π_p(x) ∈ C̃((p⊕q)_n).
ForwardReport forward_check(const ProjectionContext& ctx, const LevelElement& x, double tol = kDefaultPsdTol);

bool spectral_projection_oracle(const CMatrix& p, double tol = kProjectionTol);

struct DetectorOptions {
  int n_max = 3;
  int budget = 2000;
  std::uint64_t seed = 0;
  double tol = kDefaultPsdTol;
  std::vector<double> eps_schedule = default_eps_schedule();
  bool parallel = true;
};

struct Witness {
  int level = 1;
  CMatrix x;  // Hermitian block of the level element
  ConeCertificate quotient;
  double lambda_min = 0.0;
};

struct Prechecks {
  bool contraction_ok = false;
  bool unit_norm_ok = false;
  bool unitality_ok = false;
  double alpha_m = 0.0;
};

enum class VerdictStatus { CertifiedUpTo, Rejected };

struct ProjectionVerdict {
  VerdictStatus status = VerdictStatus::Rejected;
  int n_max = 0;
  std::optional<Witness> witness;
  Prechecks prechecks;
  long candidates = 0;

  bool certified() const { return status == VerdictStatus::CertifiedUpTo; }
};

/// Witness margin: λ_min(x) must sit this many tolerances below zero.
inline constexpr double kWitnessSeparation = 10.0;

ProjectionVerdict is_abstract_projection(const ContractionData& c, const DetectorOptions& options = {});

/// Recomputes the quotient verdict of π_p(x) and λ_min(x) for a witness.
bool verify_witness(const ProjectionContext& ctx, const Witness& w, double tol = kDefaultPsdTol);

}  // namespace opsys
