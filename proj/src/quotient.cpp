#include "opsys/quotient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "opsys/error.hpp"
#include "opsys/sampling.hpp"

namespace opsys {
namespace {

constexpr double kUnitNormTol = 1e-8;

cplx frobenius(const CMatrix& a, const CMatrix& x) { return (a.conjugate().cwiseProduct(x)).sum(); }

// Pivoted Gram–Schmidt: repeatedly takes the candidate with the largest
// component outside the current span.
std::vector<CMatrix> pivoted_complement(std::vector<CMatrix> candidates, std::size_t count) {
  std::vector<CMatrix> out;
  while (out.size() < count && !candidates.empty()) {
    std::size_t pick = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const double nrm = candidates[i].norm();
      if (nrm > best) {
        best = nrm;
        pick = i;
      }
    }
    if (best <= 1e-12) break;
    CMatrix b = hermitian_part(candidates[pick] / best);
    candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(pick));
    for (CMatrix& c : candidates) c -= real_inner(b, c) * b;
    out.push_back(std::move(b));
  }
  return out;
}

ConeCertificate general_membership(const QuotientSystem& q, const LevelElement& x, double tol,
                                   const std::vector<double>& eps_schedule, const SubgradientOptions& sg) {
  const ContractionData& c = q.contraction();
  const int n = x.level();
  const CMatrix& xb = x.block();
  const CMatrix pn = c.p_level(n);
  const CMatrix qn = c.q_level(n);
  const std::vector<CMatrix> shifts = amplify_J(q.J(), n).basis;
  const auto k_count = static_cast<Eigen::Index>(shifts.size());
  const double scale = 1.0 + spectral_norm_hermitian(xb);

  ConeCertificate cert;
  cert.tol = tol;
  cert.method = "quotient-general";
  for (std::size_t e = 0; e < eps_schedule.size(); ++e) {
    const double eps = eps_schedule[e];
    const CMatrix base = xb + eps * pn;
    const TSearchResult line = maximize_min_eig_along(base, qn);

    EpsilonProbe probe;
    probe.epsilon = eps;
    probe.best_t = line.best_t;
    probe.lambda_min = line.best_value;
    probe.cap_reached = line.cap_reached;
    probe.iterations = line.evaluations;
    RVector best_shift = RVector::Zero(k_count);

    if (probe.lambda_min < -tol) {
      const double t0 = std::max(line.best_t, 1.0);
      Rng rng(sg.seed + 7919u * static_cast<std::uint64_t>(e + 1));
      bool done = false;
      for (int restart = 0; restart < sg.restarts && !done; ++restart) {
        RVector gamma = RVector::Zero(k_count);  // shift coefficients divided by `scale`
        if (restart > 0)
          for (Eigen::Index k = 0; k < k_count; ++k) gamma(k) = 0.1 * standard_normal(rng);
        double tau = line.best_t / t0;
        double local_best = -std::numeric_limits<double>::infinity();
        int stall = 0;
        for (int it = 1; it <= sg.max_iterations; ++it) {
          CMatrix m = base + (t0 * tau) * qn;
          for (Eigen::Index k = 0; k < k_count; ++k) m += (scale * gamma(k)) * shifts[static_cast<std::size_t>(k)];
          const auto [lam, v] = lambda_min_with_vector(m);
          ++probe.iterations;
          if (lam > probe.lambda_min) {
            probe.lambda_min = lam;
            probe.best_t = t0 * tau;
            best_shift = gamma * scale;
          }
          if (probe.lambda_min >= -tol) {
            done = true;
            break;
          }
          if (lam > local_best + 1e-12) {
            local_best = lam;
            stall = 0;
          } else if (++stall >= sg.stall_window) {
            break;
          }
          RVector grad(k_count + 1);
          for (Eigen::Index k = 0; k < k_count; ++k)
            grad(k) = scale * v.dot(shifts[static_cast<std::size_t>(k)] * v).real();
          grad(k_count) = t0 * v.dot(qn * v).real();
          const double gn = grad.norm();
          if (!(gn > 0)) break;
          const double step = 0.1 / std::sqrt(static_cast<double>(it));
          gamma += (step / gn) * grad.head(k_count);
          tau = std::max(0.0, tau + step * grad(k_count) / gn);
        }
      }
    }
    probe.shift.assign(best_shift.data(), best_shift.data() + best_shift.size());
    cert.probes.push_back(std::move(probe));
  }
  const double last = cert.margin();
  cert.decision = last >= -tol ? Decision::Member : Decision::NotMember;
  cert.marginal = cert.member() ? last < tol : last > -10.0 * tol;
  return cert;
}

}  // namespace

CVector QuotientSystem::coset_coordinates(const CMatrix& x) const {
  const CMatrix reduced = x - j_.project(x);
  CVector out(static_cast<Eigen::Index>(reps_.size()));
  for (std::size_t k = 0; k < reps_.size(); ++k) out(static_cast<Eigen::Index>(k)) = frobenius(reps_[k], reduced);
  return out;
}

QuotientSystem build_quotient(const ContractionData& c, const QuotientOptions& options) {
  const double alpha = lambda_max(c.p());
  if (options.require_nontrivial && std::abs(alpha - 1.0) > kUnitNormTol) {
    throw Error(ErrorKind::TrivialUnit,
                "minimal order norm of p is " + std::to_string(alpha) + ", so p lies in J_p");
  }
  JSubspace j = compute_J(c, options.j_path, options.eps_schedule);
  std::vector<CMatrix> residuals;
  for (const CMatrix& o : c.system().orthonormal_basis()) residuals.push_back(hermitian_part(o - j.project(o)));
  const auto want = static_cast<std::size_t>(std::max(0, c.system().dim() - j.dim()));
  std::vector<CMatrix> reps = pivoted_complement(std::move(residuals), want);
  if (reps.size() != want) throw Error(ErrorKind::InvariantViolation, "could not complete the quotient basis");

  QuotientSystem q(c, std::move(j), std::move(reps), CVector());
  CVector unit = q.coset_coordinates(c.p());
  return QuotientSystem(c, q.J(), q.reps(), std::move(unit));
}

CosetElement coset_reduce(const QuotientSystem& q, const LevelElement& x) {
  const OperatorSystemSpace& v = q.system();
  require_entries_in(v, x.block());
  const int n = x.level();
  const int d = v.ambient_dim();
  CMatrix reduced = x.block();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const CMatrix e = x.block().block(i * d, j * d, d, d);
      reduced.block(i * d, j * d, d, d) = e - q.J().project(e);
    }
  return CosetElement{x, LevelElement::from_block(v, reduced)};
}

ConeCertificate quotient_cone_membership(const QuotientSystem& q, const CosetElement& xc, double tol,
                                         QuotientPath path, const std::vector<double>& eps_schedule,
                                         const SubgradientOptions& sg) {
  const ContractionData& c = q.contraction();
  require_hermitian(xc.reduced.block());
  if (path == QuotientPath::Auto) path = c.is_projection() ? QuotientPath::Concrete : QuotientPath::General;
  if (path == QuotientPath::General) return general_membership(q, xc.reduced, tol, eps_schedule, sg);

  ConeCertificate cert;
  cert.tol = tol;
  cert.method = "quotient-concrete";
  EpsilonProbe probe;
  probe.lambda_min = compressed_lambda_min(c, xc.reduced);
  cert.probes.push_back(probe);
  cert.decision = probe.lambda_min >= -tol ? Decision::Member : Decision::NotMember;
  cert.marginal = std::abs(probe.lambda_min) <= tol;
  return cert;
}

LevelElement random_J_level(const QuotientSystem& q, int n, std::uint64_t seed) {
  Rng rng(seed);
  const JSubspace jn = amplify_J(q.J(), n);
  const int nd = n * q.system().ambient_dim();
  CMatrix m = CMatrix::Zero(nd, nd);
  for (const CMatrix& b : jn.basis) m += standard_normal(rng) * b;
  return LevelElement::from_block(q.system(), hermitian_part(m));
}

IsoReport compression_iso_check(const QuotientSystem& q, int n_max, int trials, std::uint64_t seed, double tol,
                                int j_trials, double margin_filter, QuotientPath path) {
  const ContractionData& c = q.contraction();
  if (!c.is_projection()) throw Error(ErrorKind::NotAProjection, "compression_iso_check needs a projection");
  const OperatorSystemSpace& v = q.system();
  Rng rng(seed);
  std::uniform_real_distribution<double> offset(-1.0, 1.0);
  IsoReport r;
  r.worst_margin = std::numeric_limits<double>::infinity();

  for (int t = 0; t < trials; ++t) {
    const int n = 1 + t % n_max;
    LevelElement x = random_hermitian_level(v, n, rng);
    // center the compressed spectrum so both verdicts occur
    const double lam0 = compressed_lambda_min(c, x);
    if (std::isfinite(lam0)) x = x + LevelElement::unit(v, n) * (offset(rng) - lam0);
    const double lam = compressed_lambda_min(c, x);
    ++r.instances;
    if (std::abs(lam) <= margin_filter) continue;
    ++r.evaluated;
    r.worst_margin = std::min(r.worst_margin, std::abs(lam));
    SubgradientOptions sg;
    sg.seed = seed + static_cast<std::uint64_t>(t);
    const bool quotient = quotient_cone_membership(q, coset_reduce(q, x), tol, path, default_eps_schedule(), sg).member();
    if (quotient == (lam >= -tol)) ++r.agreements;
  }
  for (int t = 0; t < j_trials; ++t) {
    const int n = 1 + t % n_max;
    const LevelElement x = random_J_level(q, n, seed + 1000003u + static_cast<std::uint64_t>(t));
    const CMatrix w = kron(identity(n), range_isometry(c.p()));
    const double compressed = w.cols() == 0 ? 0.0 : spectral_norm_hermitian(w.adjoint() * x.block() * w);
    ++r.j_instances;
    r.j_max_compressed = std::max(r.j_max_compressed, compressed);
    const bool quotient = quotient_cone_membership(q, coset_reduce(q, x), tol, path).member();
    if (quotient && compressed <= 1e-8) ++r.j_agreements;
  }
  return r;
}

UcpReport quotient_map_ucp_check(const QuotientSystem& q, int n_max, int trials, std::uint64_t seed, double tol) {
  const OperatorSystemSpace& v = q.system();
  Rng rng(seed);
  UcpReport r;
  auto check = [&](const LevelElement& x) {
    ++r.trials;
    if (!quotient_cone_membership(q, coset_reduce(q, x), tol).member()) ++r.failures;
  };
  for (int n = 1; n <= n_max; ++n) {
    check(LevelElement::unit(v, n));
    check(LevelElement::from_block(v, q.contraction().p_level(n)));
    for (int t = 0; t < trials; ++t) {
      const LevelElement h = random_hermitian_level(v, n, rng);
      const double shift = -lambda_min(h.block()) + 1e-3;
      check(h + LevelElement::unit(v, n) * shift);
    }
  }
  return r;
}

}  // namespace opsys
