#include "opsys/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "opsys/error.hpp"
#include "opsys/kernels.hpp"
#include "opsys/sampling.hpp"

namespace opsys {
namespace {

constexpr double kUnitNormTol = 1e-8;
constexpr double kSmallKappa = 1e-4;
constexpr int kRefineSeeds = 4;
constexpr int kRefineSteps = 20;

CMatrix block_matrix(const CMatrix& a, const CMatrix& b, const CMatrix& c, const CMatrix& d) {
  CMatrix out(a.rows() + c.rows(), a.cols() + b.cols());
  out << a, b, c, d;
  return out;
}

// Frobenius-orthonormal Hermitian coordinate directions of M_n(V).
std::vector<CMatrix> level_directions(const OperatorSystemSpace& v, int n) {
  const std::vector<CMatrix> basis = v.orthonormal_basis();
  const double r = 1.0 / std::sqrt(2.0);
  const cplx i_unit(0.0, 1.0);
  std::vector<CMatrix> out;
  for (int i = 0; i < n; ++i)
    for (const CMatrix& b : basis) out.push_back(kron(matrix_unit(n, i, i), b));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const CMatrix sym = (matrix_unit(n, i, j) + matrix_unit(n, j, i)) * r;
      const CMatrix asym = (matrix_unit(n, i, j) - matrix_unit(n, j, i)) * (i_unit * r);
      for (const CMatrix& b : basis) {
        out.push_back(kron(sym, b));
        out.push_back(kron(asym, b));
      }
    }
  return out;
}

// h normalized and shifted along the unit so that λ_min = -kappa.
LevelElement shifted_candidate(const OperatorSystemSpace& v, const CMatrix& h, double kappa) {
  const CMatrix hn = hermitian_part(h) / spectral_norm_hermitian(h);
  const double s = -kappa - lambda_min(hn);
  return LevelElement::from_block(v, hn + s * identity(static_cast<int>(hn.rows())));
}

std::vector<kernels::CandidateScore> score(const ProjectionContext& ctx, const std::vector<LevelElement>& xs,
                                           const DetectorOptions& options, std::uint64_t salt) {
  kernels::ScoreOptions so;
  so.tol = options.tol;
  so.eps_schedule = options.eps_schedule;
  so.seed = options.seed + salt;
  return options.parallel ? kernels::score_candidates_parallel(ctx, xs, so)
                          : kernels::score_candidates_serial(ctx, xs, so);
}

bool is_witness(const kernels::CandidateScore& s, double tol) {
  return s.quotient.member() && s.ambient_lambda_min <= -kWitnessSeparation * tol;
}

Witness make_witness(const LevelElement& x, const kernels::CandidateScore& s) {
  return Witness{x.level(), x.block(), s.quotient, s.ambient_lambda_min};
}

// Replaces a found witness by the most negative shift of the same direction
// that still lands in the quotient cone.
Witness strengthen(const ProjectionContext& ctx, const CMatrix& h, Witness found, const DetectorOptions& options) {
  const OperatorSystemSpace& v = ctx.c.system();
  for (const double kappa : {0.5, 1e-2}) {
    const LevelElement x = shifted_candidate(v, h, kappa);
    const auto s = score(ctx, {x}, options, 17);
    if (is_witness(s[0], options.tol)) return make_witness(x, s[0]);
  }
  return found;
}

}  // namespace

ProjectionContext make_projection_context(const ContractionData& c, const std::vector<double>& eps_schedule) {
  ContractionData pq = direct_sum_contraction(c);
  QuotientOptions qo;
  qo.require_nontrivial = false;
  qo.eps_schedule = eps_schedule;
  QuotientSystem quotient = build_quotient(pq, qo);
  return ProjectionContext{c, std::move(pq), std::move(quotient)};
}

bool block_cone_membership(const ContractionData& c, const LevelElement& a, const LevelElement& b,
                           const LevelElement& x_offdiag, double tol, BlockPath path) {
  const int n = a.level();
  if (b.level() != n || x_offdiag.level() != n) throw Error(ErrorKind::ShapeMismatch, "block entries differ in level");
  if (!a.is_hermitian() || !b.is_hermitian()) throw Error(ErrorKind::NonHermitianInput, "diagonal blocks must be Hermitian");
  if (path == BlockPath::Auto) path = c.is_projection() ? BlockPath::Fast : BlockPath::General;
  if (path == BlockPath::Fast) {
    if (!c.is_projection()) throw Error(ErrorKind::NotAProjection, "fast block test needs a projection");
    const CMatrix pn = c.p_level(n);
    const CMatrix qn = c.q_level(n);
    const CMatrix& x = x_offdiag.block();
    const CMatrix m = pn * a.block() * pn + pn * x * qn + qn * x.adjoint() * pn + qn * b.block() * qn;
    return is_psd(hermitian_part(m), tol);
  }
  const int d = c.system().ambient_dim();
  const CMatrix z = block_matrix(a.block(), x_offdiag.block(), x_offdiag.block().adjoint(), b.block());
  const ContractionData pq = direct_sum_contraction(c);
  const LevelElement y = LevelElement::from_block(pq.system(), canonical_shuffle(z, 2, n, d));
  return abstract_cone_membership(pq, y, tol).member();
}

LevelElement doubled_element(const ProjectionContext& ctx, const LevelElement& x) {
  const int n = x.level();
  const int d = ctx.c.system().ambient_dim();
  if (x.entry_dim() != d) throw Error(ErrorKind::ShapeMismatch, "element does not live over V");
  const CMatrix doubled = kron(CMatrix::Ones(2, 2), x.block());
  return LevelElement::from_block(ctx.quotient.system(), canonical_shuffle(doubled, 2, n, d));
}

CosetElement pi_p(const ProjectionContext& ctx, const LevelElement& x) {
  return coset_reduce(ctx.quotient, doubled_element(ctx, x));
}

UnitalityReport unitality_check(const ContractionData& c, double tol, const std::vector<double>& eps_schedule) {
  const int d = c.system().ambient_dim();
  const CMatrix z = CMatrix::Zero(d, d);
  const CMatrix& p = c.p();
  const CMatrix& q = c.q();
  const CMatrix big_p = direct_sum(p, q);
  const CMatrix big_q = direct_sum(q, p);
  const CMatrix a = block_matrix(z, p, p, p);
  const CMatrix b = block_matrix(q, q, q, z);
  UnitalityReport r;
  r.worst_lambda = std::numeric_limits<double>::infinity();
  for (const double eps : eps_schedule) {
    for (const CMatrix* m : {&a, &b}) {
      const double plus = lambda_min(*m + eps * big_p + (1.0 / eps) * big_q);
      const double minus = lambda_min(-*m + eps * big_p + (1.0 + 1.0 / eps) * big_q);
      r.worst_lambda = std::min({r.worst_lambda, plus, minus});
    }
  }
  r.ok = r.worst_lambda >= -tol;
  return r;
}

ForwardReport forward_check(const ProjectionContext& ctx, const LevelElement& x, double tol) {
  ForwardReport r;
  r.ambient = cone_membership(ctx.c.system(), x, tol);
  r.quotient = quotient_cone_membership(ctx.quotient, pi_p(ctx, x), tol);
  r.agree = r.ambient.member() == r.quotient.member();
  return r;
}

bool spectral_projection_oracle(const CMatrix& p, double tol) {
  return is_hermitian(p) && (p * p - p).norm() < tol;
}

bool verify_witness(const ProjectionContext& ctx, const Witness& w, double tol) {
  const LevelElement x = LevelElement::from_block(ctx.c.system(), w.x);
  if (lambda_min(x.block()) > -kWitnessSeparation * tol) return false;
  return quotient_cone_membership(ctx.quotient, pi_p(ctx, x), tol).member();
}

ProjectionVerdict is_abstract_projection(const ContractionData& c, const DetectorOptions& options) {
  if (options.n_max < 1) throw Error(ErrorKind::InvalidArgument, "n_max must be at least 1");
  if (options.budget < 0) throw Error(ErrorKind::InvalidArgument, "budget must be non-negative");
  ProjectionVerdict verdict;
  verdict.n_max = options.n_max;
  Prechecks& pre = verdict.prechecks;
  pre.alpha_m = lambda_max(c.p());
  pre.contraction_ok = lambda_min(c.p()) >= -kContractionTol && pre.alpha_m <= 1.0 + kContractionTol;
  pre.unit_norm_ok = std::abs(pre.alpha_m - 1.0) <= kUnitNormTol;
  pre.unitality_ok = unitality_check(c, options.tol, options.eps_schedule).ok;

  const ProjectionContext ctx = make_projection_context(c, options.eps_schedule);
  const OperatorSystemSpace& v = c.system();
  const double kappa = std::max(kSmallKappa, 20.0 * options.tol);

  auto run_batch = [&](const std::vector<CMatrix>& bases, std::uint64_t salt) -> std::optional<Witness> {
    std::vector<LevelElement> xs;
    xs.reserve(bases.size());
    for (const CMatrix& h : bases) xs.push_back(shifted_candidate(v, h, kappa));
    const auto scores = score(ctx, xs, options, salt);
    verdict.candidates += static_cast<long>(xs.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
      if (is_witness(scores[i], options.tol)) return strengthen(ctx, bases[i], make_witness(xs[i], scores[i]), options);
    return std::nullopt;
  };

  for (int n = 1; n <= options.n_max && !verdict.witness; ++n) {
    const auto level_salt = static_cast<std::uint64_t>(n) * 1000003u;
    const std::vector<CMatrix> dirs = level_directions(v, n);

    std::vector<CMatrix> bases;
    for (const CMatrix& h : dirs) {
      bases.push_back(h);
      bases.push_back(-h);
    }
    if ((verdict.witness = run_batch(bases, level_salt + 1))) break;

    bases.clear();
    const auto budget = static_cast<std::size_t>(options.budget);
    for (std::size_t i = 0; i < dirs.size() && bases.size() < budget; ++i)
      for (std::size_t j = i + 1; j < dirs.size() && bases.size() < budget; ++j) {
        bases.push_back(dirs[i] + dirs[j]);
        bases.push_back(dirs[i] - dirs[j]);
      }
    if (bases.size() > budget) bases.resize(budget);
    if ((verdict.witness = run_batch(bases, level_salt + 2))) break;

    Rng rng(options.seed ^ (level_salt * 0x9E3779B97F4A7C15ULL));
    bases.clear();
    for (std::size_t k = 0; k < budget; ++k) bases.push_back(random_hermitian_level(v, n, rng).block());
    std::vector<LevelElement> xs;
    for (const CMatrix& h : bases) xs.push_back(shifted_candidate(v, h, kappa));
    const auto scores = score(ctx, xs, options, level_salt + 3);
    verdict.candidates += static_cast<long>(xs.size());
    for (std::size_t i = 0; i < scores.size() && !verdict.witness; ++i)
      if (is_witness(scores[i], options.tol))
        verdict.witness = strengthen(ctx, bases[i], make_witness(xs[i], scores[i]), options);
    if (verdict.witness) break;

    // hill-climb the gap between quotient margin and λ_min from the best samples
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    auto gap = [&](const kernels::CandidateScore& s) { return s.quotient.margin() - s.ambient_lambda_min; };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return gap(scores[a]) > gap(scores[b]); });
    const std::size_t seeds = std::min<std::size_t>(kRefineSeeds, order.size());
    for (std::size_t s = 0; s < seeds && !verdict.witness; ++s) {
      CMatrix h = bases[order[s]];
      h /= spectral_norm_hermitian(h);
      double best = gap(scores[order[s]]);
      for (int step = 0; step < kRefineSteps && !verdict.witness; ++step) {
        CMatrix trial = h + 0.1 * random_hermitian_level(v, n, rng).block() / std::sqrt(static_cast<double>(n * v.ambient_dim()));
        trial /= spectral_norm_hermitian(trial);
        const LevelElement x = shifted_candidate(v, trial, kappa);
        const auto sc = score(ctx, {x}, options, level_salt + 4);
        ++verdict.candidates;
        if (is_witness(sc[0], options.tol)) {
          verdict.witness = strengthen(ctx, trial, make_witness(x, sc[0]), options);
        } else if (gap(sc[0]) > best) {
          best = gap(sc[0]);
          h = trial;
        }
      }
    }
  }

  const bool prechecks_ok = pre.contraction_ok && pre.unit_norm_ok && pre.unitality_ok;
  verdict.status = (verdict.witness || !prechecks_ok) ? VerdictStatus::Rejected : VerdictStatus::CertifiedUpTo;
  return verdict;
}

}  // namespace opsys
