#pragma once

// Batched data-parallel kernels. Each has a serial reference; the OpenMP
// version must produce bitwise-identical output in the same order.

#include <span>
#include <vector>

#include "opsys/projection.hpp"

namespace opsys::kernels {

std::vector<double> lambda_min_batch_serial(std::span<const CMatrix> mats);
std::vector<double> lambda_min_batch_parallel(std::span<const CMatrix> mats);

struct CandidateScore {
  double ambient_lambda_min = 0.0;
  ConeCertificate quotient;
};

struct ScoreOptions {
  double tol = kDefaultPsdTol;
  std::vector<double> eps_schedule = default_eps_schedule();
  std::uint64_t seed = 0;
};

/// λ_min(x) and the quotient certificate of π_p(x) for every candidate.
std::vector<CandidateScore> score_candidates_serial(const ProjectionContext& ctx, std::span<const LevelElement> xs,
                                                    const ScoreOptions& options);
std::vector<CandidateScore> score_candidates_parallel(const ProjectionContext& ctx, std::span<const LevelElement> xs,
                                                      const ScoreOptions& options);

int max_threads();

}  // namespace opsys::kernels
