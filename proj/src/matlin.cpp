#include "opsys/matlin.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "opsys/error.hpp"

namespace opsys {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonHermitianInput: return "NonHermitianInput";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::EntryNotInSystem: return "EntryNotInSystem";
    case ErrorKind::NonContraction: return "NonContraction";
    case ErrorKind::NotAProjection: return "NotAProjection";
    case ErrorKind::TrivialUnit: return "TrivialUnit";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::EmptyFamily: return "EmptyFamily";
    case ErrorKind::NotADistribution: return "NotADistribution";
    case ErrorKind::SignallingViolation: return "SignallingViolation";
    case ErrorKind::CommutationViolation: return "CommutationViolation";
    case ErrorKind::NotNonSignalling: return "NotNonSignalling";
    case ErrorKind::InvalidState: return "InvalidState";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

bool is_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

void require_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::NonHermitianInput,
                "matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  if (m.size() == 0) return;
  const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (dev > tol) {
    throw Error(ErrorKind::NonHermitianInput,
                "max |m - m*| = " + std::to_string(dev) + " exceeds " + std::to_string(tol));
  }
}

CMatrix hermitian_part(const CMatrix& m) { return (m + m.adjoint()) * 0.5; }

Spectrum eigen_decompose(const CMatrix& m) {
  require_hermitian(m);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(m), Eigen::ComputeEigenvectors);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

RVector eigenvalues(const CMatrix& m) {
  require_hermitian(m);
  if (m.size() == 0) return RVector(0);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double lambda_min(const CMatrix& m) {
  const RVector ev = eigenvalues(m);
  if (ev.size() == 0) return std::numeric_limits<double>::infinity();
  return ev(0);
}

double lambda_max(const CMatrix& m) {
  const RVector ev = eigenvalues(m);
  if (ev.size() == 0) return -std::numeric_limits<double>::infinity();
  return ev(ev.size() - 1);
}

std::pair<double, CVector> lambda_min_with_vector(const CMatrix& m) {
  const Spectrum s = eigen_decompose(m);
  return {s.values(0), s.vectors.col(0)};
}

double spectral_norm_hermitian(const CMatrix& m) {
  const RVector ev = eigenvalues(m);
  if (ev.size() == 0) return 0.0;
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

bool is_psd(const CMatrix& m, double tol) {
  if (tol < 0) throw Error(ErrorKind::InvalidArgument, "negative PSD tolerance");
  return lambda_min(m) >= -tol;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CMatrix canonical_shuffle(const CMatrix& x, int n, int m, int d) {
  const Eigen::Index size = static_cast<Eigen::Index>(n) * m * d;
  if (n < 1 || m < 1 || d < 1 || x.rows() != size || x.cols() != size) {
    throw Error(ErrorKind::ShapeMismatch, "canonical_shuffle expects a square matrix of size n*m*d = " +
                                              std::to_string(size));
  }
  // index (i, k, a) of M_n(M_m(M_d)) sits at (i*m + k)*d + a and moves to (k*n + i)*d + a
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(size));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < m; ++k)
      for (int a = 0; a < d; ++a)
        perm[static_cast<std::size_t>((i * m + k) * d + a)] = (static_cast<Eigen::Index>(k) * n + i) * d + a;

  CMatrix out(size, size);
  for (Eigen::Index r = 0; r < size; ++r)
    for (Eigen::Index c = 0; c < size; ++c)
      out(perm[static_cast<std::size_t>(r)], perm[static_cast<std::size_t>(c)]) = x(r, c);
  return out;
}

std::pair<CMatrix, CMatrix> hermitian_decompose(const CMatrix& x) {
  if (x.rows() != x.cols()) throw Error(ErrorKind::ShapeMismatch, "hermitian_decompose needs a square matrix");
  CMatrix a = (x + x.adjoint()) * 0.5;
  CMatrix b = (x - x.adjoint()) * cplx(0.0, -0.5);
  return {std::move(a), std::move(b)};
}

CMatrix identity(int d) { return CMatrix::Identity(d, d); }

CMatrix diag(std::initializer_list<double> entries) {
  RVector v(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (double e : entries) v(i++) = e;
  return diag(v);
}

CMatrix diag(const RVector& entries) {
  CMatrix out = CMatrix::Zero(entries.size(), entries.size());
  for (Eigen::Index i = 0; i < entries.size(); ++i) out(i, i) = entries(i);
  return out;
}

CMatrix matrix_unit(int d, int i, int j) {
  CMatrix out = CMatrix::Zero(d, d);
  out(i, j) = 1.0;
  return out;
}

CMatrix direct_sum(const CMatrix& a, const CMatrix& b) {
  CMatrix out = CMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

CMatrix range_isometry(const CMatrix& m, double tol) {
  const Spectrum s = eigen_decompose(m);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < s.values.size(); ++i)
    if (s.values(i) > tol) keep.push_back(i);
  CMatrix w(m.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) w.col(static_cast<Eigen::Index>(c)) = s.vectors.col(keep[c]);
  return w;
}

double real_inner(const CMatrix& a, const CMatrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

}  // namespace opsys
