#include "opsys/kernels.hpp"

#include <exception>

#ifdef OPSYS_HAVE_OPENMP
#include <omp.h>
#endif

namespace opsys::kernels {
namespace {

CandidateScore score_one(const ProjectionContext& ctx, const LevelElement& x, const ScoreOptions& options,
                         std::size_t index) {
  CandidateScore s;
  s.ambient_lambda_min = lambda_min(x.block());
  SubgradientOptions sg;
  sg.seed = options.seed + static_cast<std::uint64_t>(index);
  s.quotient = quotient_cone_membership(ctx.quotient, pi_p(ctx, x), options.tol, QuotientPath::Auto,
                                        options.eps_schedule, sg);
  return s;
}

}  // namespace

int max_threads() {
#ifdef OPSYS_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::vector<double> lambda_min_batch_serial(std::span<const CMatrix> mats) {
  std::vector<double> out(mats.size());
  for (std::size_t i = 0; i < mats.size(); ++i) out[i] = lambda_min(mats[i]);
  return out;
}

std::vector<double> lambda_min_batch_parallel(std::span<const CMatrix> mats) {
  std::vector<double> out(mats.size());
  const auto count = static_cast<std::ptrdiff_t>(mats.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lambda_min(mats[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<CandidateScore> score_candidates_serial(const ProjectionContext& ctx, std::span<const LevelElement> xs,
                                                    const ScoreOptions& options) {
  std::vector<CandidateScore> out;
  out.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out.push_back(score_one(ctx, xs[i], options, i));
  return out;
}

std::vector<CandidateScore> score_candidates_parallel(const ProjectionContext& ctx, std::span<const LevelElement> xs,
                                                      const ScoreOptions& options) {
  std::vector<CandidateScore> out(xs.size());
  std::exception_ptr failure;
  const auto count = static_cast<std::ptrdiff_t>(xs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = score_one(ctx, xs[k], options, k);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace opsys::kernels
