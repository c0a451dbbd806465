#include "opsys/ucp.hpp"

#include <algorithm>
#include <cmath>

#include "opsys/error.hpp"

namespace opsys {
namespace {

constexpr double kIllConditioned = 1e-10;

CMatrix corner(const CMatrix& x, int d, int r, int c) {
  CMatrix out = CMatrix::Zero(2 * d, 2 * d);
  out.block(r * d, c * d, d, d) = x.block(r * d, c * d, d, d);
  return out;
}

CMatrix embed(const CMatrix& x, int d, int r, int c) {
  CMatrix out = CMatrix::Zero(2 * d, 2 * d);
  out.block(r * d, c * d, d, d) = x;
  return out;
}

}  // namespace

QuotientMap::QuotientMap(int in_dim, int out_dim, CMatrix choi)
    : in_dim_(in_dim), out_dim_(out_dim), choi_(std::move(choi)) {
  if (in_dim <= 0 || out_dim <= 0 || choi_.rows() != in_dim * out_dim || choi_.cols() != in_dim * out_dim)
    throw Error(ErrorKind::ShapeMismatch, "Choi matrix has the wrong size");
}

QuotientMap QuotientMap::from_function(int in_dim, int out_dim, const std::function<CMatrix(const CMatrix&)>& f) {
  CMatrix choi = CMatrix::Zero(in_dim * out_dim, in_dim * out_dim);
  for (int i = 0; i < in_dim; ++i)
    for (int j = 0; j < in_dim; ++j) {
      const CMatrix image = f(matrix_unit(in_dim, i, j));
      if (image.rows() != out_dim || image.cols() != out_dim)
        throw Error(ErrorKind::ShapeMismatch, "map returned a matrix of the wrong size");
      choi.block(i * out_dim, j * out_dim, out_dim, out_dim) = image;
    }
  return QuotientMap(in_dim, out_dim, std::move(choi));
}

CMatrix QuotientMap::apply(const CMatrix& x) const {
  if (x.rows() != in_dim_ || x.cols() != in_dim_) throw Error(ErrorKind::ShapeMismatch, "input has the wrong size");
  CMatrix out = CMatrix::Zero(out_dim_, out_dim_);
  for (int i = 0; i < in_dim_; ++i)
    for (int j = 0; j < in_dim_; ++j)
      if (x(i, j) != cplx(0.0)) out += x(i, j) * choi_.block(i * out_dim_, j * out_dim_, out_dim_, out_dim_);
  return out;
}

CMatrix QuotientMap::apply_level(const CMatrix& x, int n) const {
  if (x.rows() != n * in_dim_ || x.cols() != n * in_dim_) throw Error(ErrorKind::ShapeMismatch, "input has the wrong size");
  CMatrix out(n * out_dim_, n * out_dim_);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      out.block(a * out_dim_, b * out_dim_, out_dim_, out_dim_) = apply(x.block(a * in_dim_, b * in_dim_, in_dim_, in_dim_));
  return out;
}

AdmissibilityReport check_ucp_admissible(const ProjectionContext& ctx, const QuotientMap& phi, double tol) {
  const ContractionData& pq = ctx.pq;
  if (phi.in_dim() != pq.system().ambient_dim()) throw Error(ErrorKind::ShapeMismatch, "map does not act on M_2(V)");
  AdmissibilityReport r;
  r.choi_lambda_min = lambda_min(hermitian_part(phi.choi()));
  r.unit_error = (phi.apply(pq.p()) - identity(phi.out_dim())).norm();
  r.complement_error = phi.apply(pq.q()).norm();
  for (const CMatrix& j : ctx.quotient.J().basis) r.j_leak = std::max(r.j_leak, phi.apply(j).norm());
  r.ok = is_hermitian(phi.choi()) && r.choi_lambda_min >= -tol && r.unit_error <= tol && r.complement_error <= tol &&
         r.j_leak <= tol;
  return r;
}

QuotientMap random_admissible_ucp(const ProjectionContext& ctx, int out_dim, Rng& rng) {
  if (!ctx.c.is_projection()) throw Error(ErrorKind::NotAProjection, "random admissible maps need a projection");
  if (out_dim <= 0) throw Error(ErrorKind::InvalidArgument, "output dimension must be positive");
  const CMatrix w = range_isometry(ctx.pq.p());
  const int r = static_cast<int>(w.cols());
  const int kraus = (out_dim + r - 1) / r + 1;
  const CMatrix g = random_complex_matrix(kraus * r, out_dim, rng);
  const CMatrix stack = Eigen::HouseholderQR<CMatrix>(g).householderQ() * CMatrix::Identity(kraus * r, out_dim);
  std::vector<CMatrix> ks;
  for (int l = 0; l < kraus; ++l) ks.push_back(w * stack.block(l * r, 0, r, out_dim));
  const int in_dim = static_cast<int>(w.rows());
  return QuotientMap::from_function(in_dim, out_dim, [&](const CMatrix& x) {
    CMatrix out = CMatrix::Zero(out_dim, out_dim);
    for (const CMatrix& k : ks) out += k.adjoint() * x * k;
    return out;
  });
}

RescaledMap rescale_ucp(const ProjectionContext& ctx, const QuotientMap& phi, double tol) {
  const int d = ctx.c.system().ambient_dim();
  const int n = phi.out_dim();
  if (phi.in_dim() != 2 * d) throw Error(ErrorKind::ShapeMismatch, "map does not act on M_2(V)");
  const CMatrix zero = CMatrix::Zero(d, d);
  const CMatrix p_tilde = hermitian_part(phi.apply(direct_sum(ctx.c.p(), zero)));
  const CMatrix q_tilde = hermitian_part(phi.apply(direct_sum(zero, ctx.c.q())));
  if ((p_tilde + q_tilde - identity(n)).norm() > std::max(tol, 1e-9) * n)
    throw Error(ErrorKind::InvariantViolation, "map is not unital on p ⊕ q");

  const Spectrum s = eigen_decompose(p_tilde);
  std::vector<int> ones, interior, zeros;
  for (int i = n - 1; i >= 0; --i) {
    const double x = s.values(i);
    if (std::abs(x - 1.0) <= tol) {
      ones.push_back(i);
    } else if (std::abs(x) <= tol) {
      zeros.push_back(i);
    } else {
      if (x < kIllConditioned || 1.0 - x < kIllConditioned)
        throw Error(ErrorKind::IllConditioned, "eigenvalue of φ(p ⊕ 0) too close to 0 or 1");
      interior.push_back(i);
    }
  }
  const int m = static_cast<int>(ones.size());
  const int mi = static_cast<int>(interior.size());
  const int m_prime = m + mi;

  RescaledMap out{QuotientMap(1, 1, CMatrix::Zero(1, 1)), m, mi, n, RVector(mi), CMatrix(n, n)};
  int col = 0;
  for (const auto* group : {&ones, &interior, &zeros})
    for (const int i : *group) out.eigenbasis.col(col++) = s.vectors.col(i);
  for (int k = 0; k < mi; ++k) out.interior_values(k) = s.values(interior[static_cast<std::size_t>(k)]);

  // D = diag(V, W)(I_2 ⊗ U*) with V = [diag(I_m, x^{-1/2}), 0], W = [0, diag(y^{-1/2}, I)]
  CMatrix vmat = CMatrix::Zero(m_prime, n);
  CMatrix wmat = CMatrix::Zero(n - m, n);
  for (int i = 0; i < m; ++i) vmat(i, i) = 1.0;
  for (int k = 0; k < mi; ++k) {
    const double x = out.interior_values(k);
    vmat(m + k, m + k) = 1.0 / std::sqrt(x);
    wmat(k, m + k) = 1.0 / std::sqrt(1.0 - x);
  }
  for (int k = mi; k < n - m; ++k) wmat(k, m + k) = 1.0;
  const CMatrix u_adj = out.eigenbasis.adjoint();
  const CMatrix left = direct_sum(vmat * u_adj, wmat * u_adj);
  const int out_dim = m_prime + n - m;

  out.psi = QuotientMap::from_function(2 * d, out_dim, [&](const CMatrix& x) {
    CMatrix big(2 * n, 2 * n);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) big.block(r * n, c * n, n, n) = phi.apply(corner(x, d, r, c));
    return CMatrix(left * big * left.adjoint());
  });
  return out;
}

TransferSample positivity_transfer(const ProjectionContext& ctx, const QuotientMap& phi, const RescaledMap& psi,
                                   const LevelElement& a, const LevelElement& b, const LevelElement& c) {
  const int k = a.level();
  const int d = ctx.c.system().ambient_dim();
  if (b.level() != k || c.level() != k) throw Error(ErrorKind::ShapeMismatch, "entries differ in level");
  if (!a.is_hermitian() || !c.is_hermitian()) throw Error(ErrorKind::NonHermitianInput, "a and c must be Hermitian");

  // [[a, b], [b*, c]] ∈ M_2(M_k(V)) read as an element of M_k(M_2(V))
  auto lift = [&](const CMatrix& x, int r, int col) { return canonical_shuffle(embed(x, k * d, r, col), 2, k, d); };
  TransferSample s;
  const CMatrix z = lift(a.block(), 0, 0) + lift(b.block(), 0, 1) + lift(b.block().adjoint(), 1, 0) + lift(c.block(), 1, 1);
  s.psi_lambda_min = lambda_min(hermitian_part(psi.psi.apply_level(z, k)));

  const int kn = k * phi.out_dim();
  CMatrix big(2 * kn, 2 * kn);
  big << phi.apply_level(lift(a.block(), 0, 0), k), phi.apply_level(lift(b.block(), 0, 1), k),
      phi.apply_level(lift(b.block().adjoint(), 1, 0), k), phi.apply_level(lift(c.block(), 1, 1), k);
  s.phi_lambda_min = lambda_min(hermitian_part(big));
  return s;
}

CMatrix Representation::apply(const LevelElement& x) const {
  const int n = x.level();
  const int d = x.entry_dim();
  const CMatrix doubled = canonical_shuffle(kron(CMatrix::Ones(2, 2), x.block()), 2, n, d);
  CMatrix out(0, 0);
  for (const RescaledMap& part : parts) out = direct_sum(out, part.psi.apply_level(doubled, n));
  return out;
}

Representation projectionizing_representation(const ProjectionContext& ctx, const std::vector<QuotientMap>& phis,
                                              double tol) {
  if (phis.empty()) throw Error(ErrorKind::EmptyFamily, "no ucp maps given");
  Representation rep;
  for (const QuotientMap& phi : phis) {
    rep.parts.push_back(rescale_ucp(ctx, phi, tol));
    rep.dim += rep.parts.back().psi.out_dim();
  }
  const OperatorSystemSpace& v = ctx.c.system();
  const CMatrix unit = rep.apply(LevelElement::unit(v, 1));
  const CMatrix image_p = rep.apply(LevelElement::from_block(v, ctx.c.p()));
  if ((unit - identity(rep.dim)).norm() > 1e-9 * std::max(1, rep.dim))
    throw Error(ErrorKind::InvariantViolation, "representation is not unital");
  if ((image_p * image_p - image_p).norm() > 1e-9 * std::max(1, rep.dim))
    throw Error(ErrorKind::InvariantViolation, "image of p is not a projection");
  return rep;
}

}  // namespace opsys
