#include "opsys/system.hpp"

#include <cmath>
#include <string>

#include "opsys/error.hpp"
#include "opsys/sampling.hpp"

namespace opsys {
namespace {

constexpr double kIndependenceTol = 1e-10;
constexpr double kUnitResidualTol = 1e-10;

std::vector<CMatrix> gram_schmidt(const std::vector<CMatrix>& mats) {
  std::vector<CMatrix> out;
  out.reserve(mats.size());
  for (const CMatrix& m : mats) {
    CMatrix r = m;
    for (int pass = 0; pass < 2; ++pass)
      for (const CMatrix& o : out) r -= real_inner(o, r) * o;
    const double nrm = r.norm();
    out.push_back(r / nrm);
  }
  return out;
}

}  // namespace

OperatorSystemSpace::OperatorSystemSpace(std::vector<CMatrix> basis) : basis_(std::move(basis)) {
  if (basis_.empty()) throw Error(ErrorKind::InvariantViolation, "operator system basis is empty");
  d_ = static_cast<int>(basis_.front().rows());
  if (d_ < 1) throw Error(ErrorKind::InvariantViolation, "ambient dimension must be positive");
  for (std::size_t k = 0; k < basis_.size(); ++k) {
    const CMatrix& b = basis_[k];
    if (b.rows() != d_ || b.cols() != d_) {
      throw Error(ErrorKind::ShapeMismatch, "basis element " + std::to_string(k) + " is not " +
                                                std::to_string(d_) + "x" + std::to_string(d_));
    }
    require_hermitian(b);
    basis_[k] = hermitian_part(b);
  }

  const auto m = static_cast<Eigen::Index>(basis_.size());
  gram_.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) gram_(i, j) = real_inner(basis_[i], basis_[j]);

  Eigen::SelfAdjointEigenSolver<RMatrix> es(gram_, Eigen::EigenvaluesOnly);
  const double top = std::max(1.0, es.eigenvalues().maxCoeff());
  if (es.eigenvalues().minCoeff() <= kIndependenceTol * top) {
    throw Error(ErrorKind::InvariantViolation, "basis matrices are not linearly independent over R");
  }
  gram_solver_.compute(gram_);
  orthonormal_ = gram_schmidt(basis_);

  const CMatrix id = identity(d_);
  unit_coeffs_ = real_coefficients(id);
  const double residual = (combine(unit_coeffs_.cast<cplx>()) - id).norm();
  if (residual >= kUnitResidualTol) {
    throw Error(ErrorKind::InvariantViolation,
                "identity is not in the span of the basis (residual " + std::to_string(residual) + ")");
  }
}

OperatorSystemSpace OperatorSystemSpace::full_matrix_algebra(int d) {
  std::vector<CMatrix> basis;
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < d; ++i) basis.push_back(matrix_unit(d, i, i));
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      basis.push_back((matrix_unit(d, i, j) + matrix_unit(d, j, i)) * s);
      basis.push_back((matrix_unit(d, i, j) - matrix_unit(d, j, i)) * cplx(0.0, s));
    }
  }
  return OperatorSystemSpace(std::move(basis));
}

OperatorSystemSpace OperatorSystemSpace::from_spanning_set(int d, const std::vector<CMatrix>& elements) {
  std::vector<CMatrix> candidates{identity(d)};
  for (const CMatrix& e : elements) {
    if (e.rows() != d || e.cols() != d) throw Error(ErrorKind::ShapeMismatch, "spanning element has wrong size");
    auto [a, b] = hermitian_decompose(e);
    candidates.push_back(std::move(a));
    if (b.norm() > kContainsResidual) candidates.push_back(std::move(b));
  }
  std::vector<CMatrix> kept;
  std::vector<CMatrix> ortho;
  for (const CMatrix& c : candidates) {
    CMatrix r = c;
    for (int pass = 0; pass < 2; ++pass)
      for (const CMatrix& o : ortho) r -= real_inner(o, r) * o;
    if (r.norm() > 1e-9 * std::max(1.0, c.norm())) {
      kept.push_back(c);
      ortho.push_back(r / r.norm());
    }
  }
  return OperatorSystemSpace(std::move(kept));
}

RVector OperatorSystemSpace::real_coefficients(const CMatrix& hermitian) const {
  RVector rhs(dim());
  for (int k = 0; k < dim(); ++k) rhs(k) = real_inner(basis_[static_cast<std::size_t>(k)], hermitian);
  return gram_solver_.solve(rhs);
}

ContainsResult OperatorSystemSpace::contains(const CMatrix& x) const {
  if (x.rows() != d_ || x.cols() != d_) {
    throw Error(ErrorKind::ShapeMismatch, "expected a " + std::to_string(d_) + "x" + std::to_string(d_) + " matrix");
  }
  const auto [a, b] = hermitian_decompose(x);
  const RVector ca = real_coefficients(a);
  const RVector cb = real_coefficients(b);
  ContainsResult out;
  out.coeffs = ca.cast<cplx>() + cplx(0.0, 1.0) * cb.cast<cplx>();
  out.residual = (combine(out.coeffs) - x).norm();
  out.inside = out.residual < kContainsResidual;
  return out;
}

CMatrix OperatorSystemSpace::combine(const CVector& coeffs) const {
  CMatrix out = CMatrix::Zero(d_, d_);
  for (int k = 0; k < dim(); ++k) out += coeffs(k) * basis_[static_cast<std::size_t>(k)];
  return out;
}

OperatorSystemSpace OperatorSystemSpace::amplify(int n) const {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "amplification level must be positive");
  if (n == 1) return *this;
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<CMatrix> out;
  out.reserve(static_cast<std::size_t>(n * n) * basis_.size());
  for (int i = 0; i < n; ++i)
    for (const CMatrix& b : basis_) out.push_back(kron(matrix_unit(n, i, i), b));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const CMatrix sym = (matrix_unit(n, i, j) + matrix_unit(n, j, i)) * s;
      const CMatrix asym = (matrix_unit(n, i, j) - matrix_unit(n, j, i)) * cplx(0.0, s);
      for (const CMatrix& b : basis_) {
        out.push_back(kron(sym, b));
        out.push_back(kron(asym, b));
      }
    }
  }
  return OperatorSystemSpace(std::move(out));
}

// ---------------------------------------------------------------------------

LevelElement LevelElement::from_block(const OperatorSystemSpace& v, const CMatrix& block) {
  const int d = v.ambient_dim();
  if (block.rows() != block.cols() || block.rows() == 0 || block.rows() % d != 0) {
    throw Error(ErrorKind::ShapeMismatch, "block of size " + std::to_string(block.rows()) + "x" +
                                              std::to_string(block.cols()) + " is not a level of a system in M_" +
                                              std::to_string(d));
  }
  const int n = static_cast<int>(block.rows()) / d;
  std::vector<CVector> coeffs;
  coeffs.reserve(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      ContainsResult r = v.contains(block.block(i * d, j * d, d, d));
      if (!r.inside) {
        throw Error(ErrorKind::EntryNotInSystem,
                    "entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") has residual " +
                        std::to_string(r.residual));
      }
      coeffs.push_back(std::move(r.coeffs));
    }
  }
  return LevelElement(n, d, block, std::move(coeffs));
}

LevelElement LevelElement::from_coefficients(const OperatorSystemSpace& v, int n, std::vector<CVector> coeffs) {
  if (n < 1 || coeffs.size() != static_cast<std::size_t>(n * n)) {
    throw Error(ErrorKind::ShapeMismatch, "expected n*n coefficient vectors");
  }
  const int d = v.ambient_dim();
  CMatrix block(n * d, n * d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const CVector& c = coeffs[static_cast<std::size_t>(i * n + j)];
      if (c.size() != v.dim()) throw Error(ErrorKind::ShapeMismatch, "coefficient vector has wrong length");
      block.block(i * d, j * d, d, d) = v.combine(c);
    }
  }
  return LevelElement(n, d, std::move(block), std::move(coeffs));
}

LevelElement LevelElement::unit(const OperatorSystemSpace& v, int n) {
  std::vector<CVector> coeffs(static_cast<std::size_t>(n * n), CVector::Zero(v.dim()));
  for (int i = 0; i < n; ++i) coeffs[static_cast<std::size_t>(i * n + i)] = v.unit_coefficients().cast<cplx>();
  return LevelElement(n, v.ambient_dim(), identity(n * v.ambient_dim()), std::move(coeffs));
}

LevelElement LevelElement::zero(const OperatorSystemSpace& v, int n) {
  std::vector<CVector> coeffs(static_cast<std::size_t>(n * n), CVector::Zero(v.dim()));
  const int nd = n * v.ambient_dim();
  return LevelElement(n, v.ambient_dim(), CMatrix::Zero(nd, nd), std::move(coeffs));
}

LevelElement LevelElement::operator+(const LevelElement& o) const {
  if (o.n_ != n_ || o.d_ != d_) throw Error(ErrorKind::ShapeMismatch, "level elements differ in shape");
  std::vector<CVector> c(coeffs_.size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = coeffs_[k] + o.coeffs_[k];
  return LevelElement(n_, d_, block_ + o.block_, std::move(c));
}

LevelElement LevelElement::operator-(const LevelElement& o) const { return *this + o * -1.0; }

LevelElement LevelElement::operator*(double s) const {
  std::vector<CVector> c(coeffs_.size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = coeffs_[k] * s;
  return LevelElement(n_, d_, block_ * s, std::move(c));
}

LevelElement direct_sum(const OperatorSystemSpace& v, const LevelElement& x, const LevelElement& y) {
  const int n = x.level();
  const int m = y.level();
  const int t = n + m;
  std::vector<CVector> coeffs(static_cast<std::size_t>(t * t), CVector::Zero(v.dim()));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) coeffs[static_cast<std::size_t>(i * t + j)] = x.coeffs(i, j);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) coeffs[static_cast<std::size_t>((n + i) * t + n + j)] = y.coeffs(i, j);
  return LevelElement::from_coefficients(v, t, std::move(coeffs));
}

LevelElement compress_scalar(const OperatorSystemSpace& v, const LevelElement& x, const CMatrix& alpha) {
  const int n = x.level();
  if (alpha.rows() != n) throw Error(ErrorKind::ShapeMismatch, "scalar matrix must have n rows");
  const int m = static_cast<int>(alpha.cols());
  std::vector<CVector> coeffs(static_cast<std::size_t>(m * m), CVector::Zero(v.dim()));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      CVector& c = coeffs[static_cast<std::size_t>(i * m + j)];
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) c += std::conj(alpha(k, i)) * alpha(l, j) * x.coeffs(k, l);
    }
  return LevelElement::from_coefficients(v, m, std::move(coeffs));
}

void require_entries_in(const OperatorSystemSpace& v, const CMatrix& block) {
  (void)LevelElement::from_block(v, block);
}

ConeCertificate cone_membership(const OperatorSystemSpace& v, const LevelElement& x, double tol) {
  require_entries_in(v, x.block());
  require_hermitian(x.block());
  ConeCertificate cert;
  cert.tol = tol;
  cert.method = "ambient";
  EpsilonProbe probe;
  probe.lambda_min = lambda_min(x.block());
  cert.probes.push_back(probe);
  cert.decision = probe.lambda_min >= -tol ? Decision::Member : Decision::NotMember;
  cert.marginal = std::abs(probe.lambda_min) <= tol;
  return cert;
}

double order_norm_hermitian(const OperatorSystemSpace& v, const LevelElement& x) {
  require_entries_in(v, x.block());
  require_hermitian(x.block());
  return spectral_norm_hermitian(x.block());
}

double minimal_order_norm_hermitian(const OperatorSystemSpace& v, const LevelElement& x) {
  return order_norm_hermitian(v, x);
}

OrderUnitReport matrix_order_unit_check(const OperatorSystemSpace& v, int n_max, int trials, std::uint64_t seed) {
  if (n_max < 1) throw Error(ErrorKind::InvalidArgument, "n_max must be at least 1");
  Rng rng(seed);
  OrderUnitReport report;
  report.worst_lambda = std::numeric_limits<double>::infinity();
  auto check = [&](const LevelElement& x) {
    const double r = order_norm_hermitian(v, x);
    const LevelElement shifted = LevelElement::unit(v, x.level()) * r - x;
    const double lam = lambda_min(shifted.block());
    ++report.trials;
    report.worst_lambda = std::min(report.worst_lambda, lam);
    if (!cone_membership(v, shifted).member()) ++report.failures;
  };
  for (int n = 1; n <= n_max; ++n) {
    check(LevelElement::zero(v, n));
    check(LevelElement::unit(v, n));
    for (int t = 0; t < trials; ++t) check(random_hermitian_level(v, n, rng));
  }
  return report;
}

}  // namespace opsys
