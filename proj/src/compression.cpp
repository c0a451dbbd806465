#include "opsys/compression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "opsys/error.hpp"

namespace opsys {
namespace {

constexpr double kTernaryRelWidth = 1e-10;
constexpr double kWitnessT = 1e8;
constexpr double kFunctionalNullTol = 1e-6;

RVector real_vec(const CMatrix& m) {
  RVector out(2 * m.size());
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      out(k++) = m(i, j).real();
      out(k++) = m(i, j).imag();
    }
  return out;
}

// Columns of the returned matrix span {c : a c = 0} up to the relative threshold.
RMatrix null_space(const RMatrix& a, double rel_tol) {
  const Eigen::Index cols = a.cols();
  if (a.rows() == 0) return RMatrix::Identity(cols, cols);
  Eigen::JacobiSVD<RMatrix> svd(a, Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  const double top = s.size() > 0 ? std::max(1.0, s(0)) : 1.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * top) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

std::vector<CMatrix> orthonormalize(const std::vector<CMatrix>& mats, double drop_tol) {
  std::vector<CMatrix> out;
  for (const CMatrix& m : mats) {
    CMatrix r = m;
    for (int pass = 0; pass < 2; ++pass)
      for (const CMatrix& o : out) r -= real_inner(o, r) * o;
    const double nrm = r.norm();
    if (nrm > drop_tol) out.push_back(r / nrm);
  }
  return out;
}

std::vector<CMatrix> combine_directions(const std::vector<CMatrix>& ortho, const RMatrix& coords) {
  std::vector<CMatrix> out;
  for (Eigen::Index c = 0; c < coords.cols(); ++c) {
    CMatrix h = CMatrix::Zero(ortho.front().rows(), ortho.front().cols());
    for (std::size_t k = 0; k < ortho.size(); ++k) h += coords(static_cast<Eigen::Index>(k), c) * ortho[k];
    out.push_back(hermitian_part(h));
  }
  return out;
}

void validate_schedule(const std::vector<double>& eps) {
  if (eps.empty()) throw Error(ErrorKind::InvalidArgument, "epsilon schedule is empty");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0)) throw Error(ErrorKind::InvalidArgument, "epsilon schedule must be positive");
    if (i > 0 && !(eps[i] < eps[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "epsilon schedule must be strictly decreasing");
  }
}

JSubspace concrete_J(const ContractionData& c) {
  const auto& ortho = c.system().orthonormal_basis();
  const CMatrix& p = c.p();
  RMatrix a(2 * p.size(), static_cast<Eigen::Index>(ortho.size()));
  for (std::size_t k = 0; k < ortho.size(); ++k) a.col(static_cast<Eigen::Index>(k)) = real_vec(p * ortho[k] * p);
  JSubspace j;
  j.basis = orthonormalize(combine_directions(ortho, null_space(a, 1e-9)), 1e-9);
  return j;
}

// Lineality space of C(p) found only through the membership test: every
// failing direction contributes the functional h ↦ <v, h v> of its
// minimizing eigenvector, and J is where all collected functionals vanish.
JSubspace abstract_J(const ContractionData& c, const std::vector<double>& eps_schedule) {
  const OperatorSystemSpace& v = c.system();
  const auto& ortho = v.orthonormal_basis();
  const auto m = static_cast<Eigen::Index>(ortho.size());
  const double eps_final = eps_schedule.back();
  std::vector<CVector> functionals;
  std::vector<CMatrix> dirs = ortho;

  for (Eigen::Index iter = 0; iter <= m; ++iter) {
    if (!functionals.empty()) {
      RMatrix f(static_cast<Eigen::Index>(functionals.size()), m);
      for (std::size_t r = 0; r < functionals.size(); ++r) {
        const CVector& w = functionals[r];
        for (Eigen::Index k = 0; k < m; ++k)
          f(static_cast<Eigen::Index>(r), k) = w.dot(ortho[static_cast<std::size_t>(k)] * w).real();
      }
      dirs = orthonormalize(combine_directions(ortho, null_space(f, kFunctionalNullTol)), 1e-9);
    }
    std::size_t failures = 0;
    for (const CMatrix& s : dirs) {
      for (double sign : {1.0, -1.0}) {
        const LevelElement x = LevelElement::from_block(v, s * sign);
        const ConeCertificate cert = abstract_cone_membership(c, x, kDefaultPsdTol, eps_schedule);
        if (cert.member()) continue;
        const CMatrix probe = s * sign + eps_final * c.p() + kWitnessT * c.q();
        functionals.push_back(lambda_min_with_vector(probe).second);
        ++failures;
        break;
      }
    }
    if (failures == 0) break;
  }
  JSubspace j;
  j.basis = dirs;
  j.heuristic = true;
  return j;
}

}  // namespace

std::vector<double> default_eps_schedule() { return {1e-1, 1e-3, 1e-6}; }

ContractionData::ContractionData(SpacePtr system, const CMatrix& p) : system_(std::move(system)) {
  if (!system_) throw Error(ErrorKind::InvalidArgument, "null operator system");
  require_hermitian(p);
  const ContainsResult in = system_->contains(p);
  if (!in.inside) throw Error(ErrorKind::EntryNotInSystem, "p is not an element of V");
  p_ = hermitian_part(p);
  q_ = identity(system_->ambient_dim()) - p_;
  const double lo = lambda_min(p_);
  const double lo_q = lambda_min(q_);
  if (lo < -kContractionTol || lo_q < -kContractionTol) {
    throw Error(ErrorKind::NonContraction, "need 0 <= p <= e; got lambda_min(p) = " + std::to_string(lo) +
                                               ", lambda_min(e - p) = " + std::to_string(lo_q));
  }
}

bool ContractionData::is_projection(double tol) const { return (p_ * p_ - p_).norm() < tol; }

TSearchResult maximize_min_eig_along(const CMatrix& base, const CMatrix& direction, double t_cap) {
  TSearchResult r;
  r.best_value = -std::numeric_limits<double>::infinity();
  auto g = [&](double t) {
    ++r.evaluations;
    const double val = lambda_min(base + t * direction);
    if (val > r.best_value) {
      r.best_value = val;
      r.best_t = t;
    }
    return val;
  };

  g(0.0);
  double upper = 1.0;
  double half = g(0.5);
  double at_upper = g(upper);
  while (at_upper > half && upper < t_cap) {
    upper *= 2.0;
    half = at_upper;
    at_upper = g(upper);
  }
  if (upper >= t_cap && at_upper > half) r.cap_reached = true;

  double lo = 0.0;
  double hi = upper;
  const double width = kTernaryRelWidth * std::max(upper, 1.0);
  while (hi - lo > width) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (g(m1) < g(m2)) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  return r;
}

ConeCertificate abstract_cone_membership(const ContractionData& c, const LevelElement& x, double tol,
                                         const std::vector<double>& eps_schedule) {
  validate_schedule(eps_schedule);
  require_entries_in(c.system(), x.block());
  require_hermitian(x.block());
  const int n = x.level();
  const CMatrix pn = c.p_level(n);
  const CMatrix qn = c.q_level(n);

  ConeCertificate cert;
  cert.tol = tol;
  cert.method = "abstract";
  for (double eps : eps_schedule) {
    const TSearchResult s = maximize_min_eig_along(x.block() + eps * pn, qn);
    EpsilonProbe probe;
    probe.epsilon = eps;
    probe.best_t = s.best_t;
    probe.lambda_min = s.best_value;
    probe.cap_reached = s.cap_reached;
    probe.iterations = s.evaluations;
    cert.probes.push_back(probe);
  }
  const double last = cert.margin();
  cert.decision = last >= -tol ? Decision::Member : Decision::NotMember;
  cert.marginal = std::abs(last) <= tol;
  return cert;
}

bool concrete_cone_membership(const ContractionData& c, const LevelElement& x, double tol) {
  if (!c.is_projection()) throw Error(ErrorKind::NotAProjection, "p^2 != p");
  require_entries_in(c.system(), x.block());
  require_hermitian(x.block());
  const CMatrix pn = c.p_level(x.level());
  return is_psd(pn * x.block() * pn, tol);
}

double compressed_lambda_min(const ContractionData& c, const LevelElement& x) {
  if (!c.is_projection()) throw Error(ErrorKind::NotAProjection, "p^2 != p");
  require_hermitian(x.block());
  const CMatrix w = kron(identity(x.level()), range_isometry(c.p()));
  if (w.cols() == 0) return std::numeric_limits<double>::infinity();
  return lambda_min(w.adjoint() * x.block() * w);
}

EquivalenceReport equivalence_check(const ContractionData& c, const LevelElement& x, double tol, double witness_eps,
                                    const std::vector<double>& eps_schedule) {
  EquivalenceReport r;
  r.abstract_cert = abstract_cone_membership(c, x, tol, eps_schedule);
  r.concrete = concrete_cone_membership(c, x, tol);
  r.agree = r.abstract_cert.member() == r.concrete;

  const double nx = spectral_norm_hermitian(x.block());
  const int n = x.level();
  r.witness.epsilon = witness_eps;
  r.witness.t = nx + 10.0 * nx * nx / witness_eps + 1.0;
  r.witness.lambda_min = lambda_min(x.block() + witness_eps * c.p_level(n) + r.witness.t * c.q_level(n));
  r.witness.applicable = r.concrete;
  r.witness.verified = r.witness.lambda_min >= -tol;
  return r;
}

CMatrix JSubspace::project(const CMatrix& x) const {
  CMatrix out = CMatrix::Zero(x.rows(), x.cols());
  for (const CMatrix& b : basis) out += (b.conjugate().cwiseProduct(x)).sum() * b;
  return out;
}

double JSubspace::residual(const CMatrix& x) const { return (x - project(x)).norm(); }

JSubspace compute_J(const ContractionData& c, JPath path, const std::vector<double>& eps_schedule) {
  validate_schedule(eps_schedule);
  if (path == JPath::Auto) path = c.is_projection() ? JPath::Concrete : JPath::Abstract;
  if (path == JPath::Concrete) {
    if (!c.is_projection()) throw Error(ErrorKind::NotAProjection, "concrete J_p needs a projection");
    return concrete_J(c);
  }
  return abstract_J(c, eps_schedule);
}

JSubspace amplify_J(const JSubspace& j, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "amplification level must be positive");
  if (n == 1) return j;
  JSubspace out;
  out.level = j.level * n;
  out.heuristic = j.heuristic;
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    for (const CMatrix& b : j.basis) out.basis.push_back(kron(matrix_unit(n, i, i), b));
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k) {
      const CMatrix sym = (matrix_unit(n, i, k) + matrix_unit(n, k, i)) * s;
      const CMatrix asym = (matrix_unit(n, i, k) - matrix_unit(n, k, i)) * cplx(0.0, s);
      for (const CMatrix& b : j.basis) {
        out.basis.push_back(kron(sym, b));
        out.basis.push_back(kron(asym, b));
      }
    }
  return out;
}

AmplificationReport verify_amplification(const ContractionData& c, const JSubspace& j, int n) {
  const JSubspace amplified = amplify_J(j, n);
  const ContractionData cn(make_space(c.system().amplify(n)), c.p_level(n));
  const JSubspace direct = compute_J(cn);
  AmplificationReport r;
  r.dim_amplified = amplified.dim();
  r.dim_direct = direct.dim();
  for (const CMatrix& b : amplified.basis) r.amplified_in_direct = std::max(r.amplified_in_direct, direct.residual(b));
  for (const CMatrix& b : direct.basis) r.direct_in_amplified = std::max(r.direct_in_amplified, amplified.residual(b));
  return r;
}

ContractionData direct_sum_contraction(const ContractionData& c) {
  return ContractionData(make_space(c.system().amplify(2)), direct_sum(c.p(), c.q()));
}

ConeCertificate shuffled_direct_sum_membership(const ContractionData& c, const LevelElement& x_m2v, double tol,
                                               const std::vector<double>& eps_schedule) {
  const int n = x_m2v.level();
  const int d = c.system().ambient_dim();
  if (x_m2v.entry_dim() != 2 * d) throw Error(ErrorKind::ShapeMismatch, "expected a level element of M_2(V)");
  const CMatrix shuffled = canonical_shuffle(x_m2v.block(), n, 2, d);
  const ContractionData pn_qn(make_space(c.system().amplify(2 * n)), direct_sum(c.p_level(n), c.q_level(n)));
  const LevelElement y = LevelElement::from_block(pn_qn.system(), shuffled);
  return abstract_cone_membership(pn_qn, y, tol, eps_schedule);
}

ContractionData family_compression(const SpacePtr& v, const std::vector<CMatrix>& family) {
  if (family.empty()) throw Error(ErrorKind::EmptyFamily, "family of projections is empty");
  const int d = v->ambient_dim();
  const int count = static_cast<int>(family.size());
  bool all_zero = true;
  CMatrix big_p = CMatrix::Zero(count * d, count * d);
  CMatrix big_q = CMatrix::Zero(count * d, count * d);
  for (int i = 0; i < count; ++i) {
    const CMatrix& p = family[static_cast<std::size_t>(i)];
    if (p.rows() != d || p.cols() != d) throw Error(ErrorKind::ShapeMismatch, "family member has wrong size");
    if (!is_hermitian(p) || (p * p - p).norm() >= kProjectionTol) {
      throw Error(ErrorKind::NotAProjection, "family member " + std::to_string(i + 1) + " is not a projection");
    }
    if (!v->contains(p).inside) throw Error(ErrorKind::EntryNotInSystem, "family member is not in V");
    if (p.norm() > kProjectionTol) all_zero = false;
    big_p.block(i * d, i * d, d, d) = p;
    big_q.block(i * d, i * d, d, d) = identity(d) - p;
  }
  if (all_zero) throw Error(ErrorKind::TrivialUnit, "every member of the family is zero");
  return ContractionData(make_space(v->amplify(2 * count)), direct_sum(big_p, big_q));
}

}  // namespace opsys
