#pragma once

#include <gtest/gtest.h>

#include <string>

#include "opsys/error.hpp"
#include "opsys/sampling.hpp"

#define EXPECT_OPSYS_ERROR(stmt, expected_kind)                          \
  do {                                                                   \
    try {                                                                \
      stmt;                                                              \
      ADD_FAILURE() << "expected " << opsys::to_string(expected_kind);   \
    } catch (const opsys::Error& e) {                                    \
      EXPECT_EQ(e.kind(), expected_kind) << e.what();                    \
    }                                                                    \
  } while (0)

namespace testutil {

inline opsys::SpacePtr full(int d) { return opsys::make_space(opsys::OperatorSystemSpace::full_matrix_algebra(d)); }

inline std::string data(const std::string& name) { return std::string(OPSYS_TEST_DATA) + "/" + name; }

// Spectral projection of h onto eigenvalues within tol of 1.
inline opsys::CMatrix top_projection(const opsys::CMatrix& h, double tol = 1e-9) {
  Eigen::SelfAdjointEigenSolver<opsys::CMatrix> es(h);
  opsys::CMatrix out = opsys::CMatrix::Zero(h.rows(), h.cols());
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    if (std::abs(es.eigenvalues()(i) - 1.0) <= tol) out += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  return out;
}

// Smallest eigenvalue by the closed form for 2×2 Hermitian matrices.
inline double char_poly_min(const opsys::CMatrix& m) {
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  return 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + std::norm(m(0, 1)));
}

}  // namespace testutil
