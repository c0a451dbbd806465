#pragma once

// Dense Hermitian linear algebra used by every cone test in the library.

#include <complex>
#include <utility>

#include <Eigen/Dense>

namespace opsys {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kEntryTol = 1e-12;
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kDefaultPsdTol = 1e-8;

bool is_hermitian(const CMatrix& m, double tol = kHermitianTol);

/// Throws NonHermitianInput when `m` is not square or ‖m - m*‖_max > tol.
void require_hermitian(const CMatrix& m, double tol = kHermitianTol);

/// (m + m*)/2, used after the symmetry check so the solver sees exact data.
CMatrix hermitian_part(const CMatrix& m);

struct Spectrum {
  RVector values;   // ascending
  CMatrix vectors;  // columns match `values`
};

Spectrum eigen_decompose(const CMatrix& m);
RVector eigenvalues(const CMatrix& m);

double lambda_min(const CMatrix& m);
double lambda_max(const CMatrix& m);

/// Smallest eigenvalue together with a unit eigenvector.
std::pair<double, CVector> lambda_min_with_vector(const CMatrix& m);

/// max(|λ_min|, |λ_max|) of a Hermitian matrix.
double spectral_norm_hermitian(const CMatrix& m);

bool is_psd(const CMatrix& m, double tol = kDefaultPsdTol);

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Reads `x` as an element of M_n(M_m(M_d)) and returns the element of
/// M_m(M_n(M_d)) with the two outer tensor factors swapped:
/// |i><j| ⊗ |k><l| ⊗ a  ↦  |k><l| ⊗ |i><j| ⊗ a.
CMatrix canonical_shuffle(const CMatrix& x, int n, int m, int d);

/// Returns (a, b) Hermitian with x = a + i b.
std::pair<CMatrix, CMatrix> hermitian_decompose(const CMatrix& x);

CMatrix identity(int d);
CMatrix diag(std::initializer_list<double> entries);
CMatrix diag(const RVector& entries);

/// Matrix unit |i><j| of size d (0-based).
CMatrix matrix_unit(int d, int i, int j);

/// Block diagonal a ⊕ b.
CMatrix direct_sum(const CMatrix& a, const CMatrix& b);

/// Orthonormal basis (columns) of the range of a Hermitian PSD matrix,
/// keeping eigenvectors whose eigenvalue exceeds `tol`.
CMatrix range_isometry(const CMatrix& m, double tol = 1e-9);

/// Real inner product Re tr(a* b) on complex matrices.
double real_inner(const CMatrix& a, const CMatrix& b);

}  // namespace opsys
