#include "opsys/matlin.hpp"

#include "test_util.hpp"

using namespace opsys;

TEST(Matlin, TwoByTwoEigenvaluesMatchCharacteristicPolynomial) {
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    const CMatrix h = random_hermitian_matrix(2, rng);
    EXPECT_NEAR(lambda_min(h), testutil::char_poly_min(h), 1e-12);
    const double trace = h.trace().real();
    EXPECT_NEAR(lambda_max(h), trace - testutil::char_poly_min(h), 1e-12);
  }
}

TEST(Matlin, SpectrumIsAscending) {
  const RVector v = eigenvalues(diag({3, -1, 2}));
  EXPECT_DOUBLE_EQ(v(0), -1);
  EXPECT_DOUBLE_EQ(v(1), 2);
  EXPECT_DOUBLE_EQ(v(2), 3);
}

TEST(Matlin, MinEigenvectorAttainsMinimum) {
  Rng rng(2);
  const CMatrix h = random_hermitian_matrix(5, rng);
  const auto [lam, v] = lambda_min_with_vector(h);
  EXPECT_NEAR((h * v - lam * v).norm(), 0.0, 1e-10);
  EXPECT_NEAR(v.norm(), 1.0, 1e-12);
}

TEST(Matlin, NonHermitianRejected) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  EXPECT_OPSYS_ERROR(require_hermitian(m), ErrorKind::NonHermitianInput);
  EXPECT_FALSE(is_hermitian(m));
}

TEST(Matlin, PsdToleranceMustBeNonNegative) {
  EXPECT_OPSYS_ERROR(is_psd(identity(2), -1.0), ErrorKind::InvalidArgument);
  EXPECT_TRUE(is_psd(diag({1, -1e-10})));
  EXPECT_FALSE(is_psd(diag({1, -1e-6})));
}

TEST(Matlin, KroneckerMatchesEntryFormula) {
  Rng rng(5);
  const CMatrix a = random_complex_matrix(2, 3, rng);
  const CMatrix b = random_complex_matrix(3, 2, rng);
  const CMatrix k = kron(a, b);
  ASSERT_EQ(k.rows(), 6);
  ASSERT_EQ(k.cols(), 6);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j)
      for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 2; ++s) EXPECT_EQ(k(i * 3 + r, j * 2 + s), a(i, j) * b(r, s));
}

TEST(Matlin, CanonicalShuffleSwapsOuterFactors) {
  Rng rng(7);
  const int n = 2, m = 3, d = 2;
  const CMatrix x = random_complex_matrix(n * m * d, n * m * d, rng);
  const CMatrix y = canonical_shuffle(x, n, m, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l)
          for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
              EXPECT_EQ(y((k * n + i) * d + a, (l * n + j) * d + b), x((i * m + k) * d + a, (j * m + l) * d + b));
  EXPECT_EQ(canonical_shuffle(y, m, n, d), x);
}

TEST(Matlin, CanonicalShuffleOfKroneckerSwapsFactors) {
  Rng rng(8);
  const CMatrix a = random_complex_matrix(2, 2, rng);
  const CMatrix b = random_complex_matrix(3, 3, rng);
  const CMatrix c = random_complex_matrix(2, 2, rng);
  const CMatrix shuffled = canonical_shuffle(kron(a, kron(b, c)), 2, 3, 2);
  EXPECT_NEAR((shuffled - kron(b, kron(a, c))).norm(), 0.0, 1e-14);
}

TEST(Matlin, CanonicalShuffleShapeMismatch) {
  EXPECT_OPSYS_ERROR(canonical_shuffle(identity(5), 2, 2, 1), ErrorKind::ShapeMismatch);
}

TEST(Matlin, HermitianDecomposition) {
  Rng rng(9);
  const CMatrix x = random_complex_matrix(3, 3, rng);
  const auto [a, b] = hermitian_decompose(x);
  EXPECT_TRUE(is_hermitian(a, 1e-14));
  EXPECT_TRUE(is_hermitian(b, 1e-14));
  EXPECT_NEAR((a + cplx(0, 1) * b - x).norm(), 0.0, 1e-14);
}

TEST(Matlin, RangeIsometry) {
  Rng rng(3);
  const CMatrix p = random_projection(5, 2, rng);
  const CMatrix w = range_isometry(p);
  ASSERT_EQ(w.cols(), 2);
  EXPECT_NEAR((w.adjoint() * w - identity(2)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((w * w.adjoint() - p).norm(), 0.0, 1e-12);
  EXPECT_EQ(range_isometry(CMatrix::Zero(3, 3)).cols(), 0);
}

TEST(Matlin, DirectSumAndUnits) {
  const CMatrix s = direct_sum(identity(1), diag({2, 3}));
  EXPECT_EQ(s, diag({1, 2, 3}));
  const CMatrix e = matrix_unit(3, 0, 2);
  EXPECT_EQ(e(0, 2), cplx(1));
  EXPECT_EQ(e.norm(), 1.0);
  EXPECT_DOUBLE_EQ(real_inner(diag({1, 2}), diag({3, 4})), 11.0);
}

TEST(Matlin, LambdaMinOfEmptyIsInfinite) {
  EXPECT_TRUE(std::isinf(lambda_min(CMatrix(0, 0))));
}
