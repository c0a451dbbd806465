#include "opsys/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace opsys {

double standard_normal(Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

cplx complex_normal(Rng& rng) {
  const double re = standard_normal(rng);
  const double im = standard_normal(rng);
  return {re / std::sqrt(2.0), im / std::sqrt(2.0)};
}

CMatrix random_complex_matrix(int rows, int cols, Rng& rng) {
  CMatrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = complex_normal(rng);
  return m;
}

CMatrix random_hermitian_matrix(int d, Rng& rng) {
  const CMatrix g = random_complex_matrix(d, d, rng);
  return (g + g.adjoint()) * 0.5;
}

CMatrix random_unitary(int d, Rng& rng) {
  const CMatrix g = random_complex_matrix(d, d, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(d, d);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // fix the phases so the distribution is Haar
  for (int i = 0; i < d; ++i) {
    const cplx rii = r(i, i);
    const double a = std::abs(rii);
    if (a > 0) q.col(i) *= rii / a;
  }
  return q;
}

CMatrix random_projection(int d, int rank, Rng& rng) {
  const CMatrix u = random_unitary(d, rng);
  const CMatrix w = u.leftCols(rank);
  CMatrix p = w * w.adjoint();
  return hermitian_part(p);
}

CMatrix random_density_matrix(int d, Rng& rng, int rank) {
  if (rank < 1) rank = d;
  const CMatrix g = random_complex_matrix(d, rank, rng);
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return hermitian_part(rho);
}

LevelElement random_hermitian_level(const OperatorSystemSpace& v, int n, Rng& rng) {
  const int m = v.dim();
  std::vector<CVector> coeffs(static_cast<std::size_t>(n * n), CVector::Zero(m));
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < m; ++k) coeffs[static_cast<std::size_t>(i * n + i)](k) = standard_normal(rng);
    for (int j = i + 1; j < n; ++j) {
      for (int k = 0; k < m; ++k) {
        const cplx c = complex_normal(rng);
        coeffs[static_cast<std::size_t>(i * n + j)](k) = c;
        coeffs[static_cast<std::size_t>(j * n + i)](k) = std::conj(c);
      }
    }
  }
  return LevelElement::from_coefficients(v, n, std::move(coeffs));
}

LevelElement random_level(const OperatorSystemSpace& v, int n, Rng& rng) {
  const int m = v.dim();
  std::vector<CVector> coeffs(static_cast<std::size_t>(n * n), CVector::Zero(m));
  for (auto& c : coeffs)
    for (int k = 0; k < m; ++k) c(k) = complex_normal(rng);
  return LevelElement::from_coefficients(v, n, std::move(coeffs));
}

OperatorSystemSpace random_system_containing(const CMatrix& p, int extra, Rng& rng) {
  const int d = static_cast<int>(p.rows());
  std::vector<CMatrix> elems{p};
  for (int i = 0; i < extra; ++i) elems.push_back(random_hermitian_matrix(d, rng));
  return OperatorSystemSpace::from_spanning_set(d, elems);
}

ProjectionInstance random_projection_instance(Rng& rng, int d_min, int d_max) {
  const int d = std::uniform_int_distribution<int>(d_min, d_max)(rng);
  const int rank = std::uniform_int_distribution<int>(1, std::max(1, d - 1))(rng);
  CMatrix p = random_projection(d, rank, rng);
  const int extra = std::uniform_int_distribution<int>(0, 2 * d + 1)(rng);
  SpacePtr v = extra > 2 * d ? make_space(OperatorSystemSpace::full_matrix_algebra(d))
                             : make_space(random_system_containing(p, extra, rng));
  return {std::move(v), std::move(p)};
}

}  // namespace opsys
