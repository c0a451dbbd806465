#include "opsys/ucp.hpp"

#include "test_util.hpp"

using namespace opsys;

namespace {

struct Fixture {
  ProjectionContext ctx;
  QuotientMap phi;
};

Fixture make_fixture(Rng& rng, int d, int rank, int out_dim) {
  ProjectionContext ctx = make_projection_context(ContractionData(testutil::full(d), random_projection(d, rank, rng)));
  QuotientMap phi = random_admissible_ucp(ctx, out_dim, rng);
  return {std::move(ctx), std::move(phi)};
}

}  // namespace

TEST(Ucp, ChoiRoundTrip) {
  Rng rng(61);
  const CMatrix k = random_complex_matrix(3, 2, rng);
  const QuotientMap m = QuotientMap::from_function(3, 2, [&](const CMatrix& x) { return CMatrix(k.adjoint() * x * k); });
  const CMatrix x = random_complex_matrix(3, 3, rng);
  EXPECT_NEAR((m.apply(x) - k.adjoint() * x * k).norm(), 0.0, 1e-12);
  const CMatrix x2 = random_complex_matrix(6, 6, rng);
  const CMatrix lifted = m.apply_level(x2, 2);
  EXPECT_NEAR((lifted - kron(identity(2), k).adjoint() * x2 * kron(identity(2), k)).norm(), 0.0, 1e-12);
  EXPECT_OPSYS_ERROR(QuotientMap(3, 2, identity(5)), ErrorKind::ShapeMismatch);
}

TEST(Ucp, RandomMapsAreAdmissible) {
  Rng rng(62);
  for (int t = 0; t < 5; ++t) {
    const Fixture f = make_fixture(rng, 2 + t % 2, 1, 2 + t % 3);
    const AdmissibilityReport r = check_ucp_admissible(f.ctx, f.phi);
    EXPECT_TRUE(r.ok) << r.choi_lambda_min << " " << r.unit_error << " " << r.j_leak;
  }
}

TEST(Ucp, MapLeakingIntoJIsNotAdmissible) {
  Rng rng(63);
  const ProjectionContext ctx = make_projection_context(ContractionData(testutil::full(2), diag({1, 0})));
  // normalized trace is ucp on M_4 but does not vanish on J
  const QuotientMap trace = QuotientMap::from_function(4, 1, [](const CMatrix& x) {
    return CMatrix::Constant(1, 1, x.trace() / 4.0);
  });
  EXPECT_FALSE(check_ucp_admissible(ctx, trace).ok);
}

TEST(Ucp, RandomMapNeedsProjection) {
  Rng rng(64);
  const ProjectionContext ctx = make_projection_context(ContractionData(testutil::full(2), diag({1, 0.5})));
  EXPECT_OPSYS_ERROR(random_admissible_ucp(ctx, 2, rng), ErrorKind::NotAProjection);
}

TEST(Ucp, RescaledImageOfPIsProjection) {
  Rng rng(65);
  for (int t = 0; t < 6; ++t) {
    const Fixture f = make_fixture(rng, 2 + t % 3, 1 + t % 2, 2 + t % 3);
    const RescaledMap r = rescale_ucp(f.ctx, f.phi);
    const int d = f.ctx.c.system().ambient_dim();
    const CMatrix zero = CMatrix::Zero(d, d);
    const CMatrix pp = r.psi.apply(direct_sum(f.ctx.c.p(), zero));
    const CMatrix qq = r.psi.apply(direct_sum(zero, f.ctx.c.q()));
    const int k = r.psi.out_dim();
    EXPECT_EQ(k, r.ones + r.interior + (r.n - r.ones));
    EXPECT_LT((pp * pp - pp).norm(), 1e-9);
    EXPECT_LT((pp + qq - identity(k)).norm(), 1e-9);
    EXPECT_LT((r.psi.apply(f.ctx.pq.p()) - identity(k)).norm(), 1e-9);
    // rank of ψ(p ⊕ 0) is m'
    EXPECT_NEAR(pp.trace().real(), r.ones + r.interior, 1e-9);
  }
}

TEST(Ucp, IllConditionedEigenvalue) {
  // L(X) = (1 - δ) X_33 + δ X_00 on M_2(M_2) with p = diag(1, 0): φ(p ⊕ 0) = δ
  const ProjectionContext ctx = make_projection_context(ContractionData(testutil::full(2), diag({1, 0})));
  const double delta = 1e-12;
  const QuotientMap phi = QuotientMap::from_function(4, 1, [&](const CMatrix& x) {
    return CMatrix::Constant(1, 1, (1.0 - delta) * x(3, 3) + delta * x(0, 0));
  });
  EXPECT_OPSYS_ERROR(rescale_ucp(ctx, phi, 1e-13), ErrorKind::IllConditioned);
  const RescaledMap r = rescale_ucp(ctx, phi, 1e-9);
  EXPECT_EQ(r.interior, 0);
}

TEST(Ucp, NonUnitalMapRejected) {
  const ProjectionContext ctx = make_projection_context(ContractionData(testutil::full(2), diag({1, 0})));
  const QuotientMap half = QuotientMap::from_function(4, 1, [](const CMatrix& x) { return CMatrix::Constant(1, 1, 0.5 * x(0, 0)); });
  EXPECT_OPSYS_ERROR(rescale_ucp(ctx, half), ErrorKind::InvariantViolation);
}

TEST(Ucp, PositivityTransferBiconditional) {
  Rng rng(66);
  int evaluated = 0, positive = 0;
  for (int t = 0; t < 4; ++t) {
    const Fixture f = make_fixture(rng, 2 + t % 2, 1, 2 + t % 2);
    const RescaledMap psi = rescale_ucp(f.ctx, f.phi);
    const OperatorSystemSpace& v = f.ctx.c.system();
    for (int s = 0; s < 20; ++s) {
      const int k = 1 + s % 2;
      const double shift = s % 2 ? 3.0 : 0.5;
      const LevelElement a = random_hermitian_level(v, k, rng) + LevelElement::unit(v, k) * shift;
      const LevelElement c = random_hermitian_level(v, k, rng) + LevelElement::unit(v, k) * shift;
      const LevelElement b = random_level(v, k, rng) * 0.5;
      const TransferSample ts = positivity_transfer(f.ctx, f.phi, psi, a, b, c);
      if (std::abs(ts.phi_lambda_min) <= 1e-6 || std::abs(ts.psi_lambda_min) <= 1e-6) continue;
      ++evaluated;
      positive += ts.phi_lambda_min > 0;
      EXPECT_EQ(ts.phi_lambda_min > 0, ts.psi_lambda_min > 0) << t << "/" << s;
    }
  }
  EXPECT_GT(evaluated, 50);
  EXPECT_GT(positive, 0);
  EXPECT_LT(positive, evaluated);
}

TEST(Ucp, ProjectionizingRepresentation) {
  Rng rng(67);
  const ProjectionContext ctx = make_projection_context(ContractionData(testutil::full(3), random_projection(3, 1, rng)));
  EXPECT_OPSYS_ERROR(projectionizing_representation(ctx, {}), ErrorKind::EmptyFamily);
  std::vector<QuotientMap> phis;
  for (int i = 0; i < 3; ++i) phis.push_back(random_admissible_ucp(ctx, 2 + i, rng));
  const Representation rep = projectionizing_representation(ctx, phis);
  const OperatorSystemSpace& v = ctx.c.system();
  const CMatrix pi_p = rep.apply(LevelElement::from_block(v, ctx.c.p()));
  EXPECT_EQ(pi_p.rows(), rep.dim);
  EXPECT_LT((pi_p * pi_p - pi_p).norm(), 1e-9);
  EXPECT_LT((rep.apply(LevelElement::unit(v, 1)) - identity(rep.dim)).norm(), 1e-9);
  // the representation is completely positive
  for (int t = 0; t < 10; ++t) {
    const LevelElement h = random_hermitian_level(v, 2, rng);
    const LevelElement x = h + LevelElement::unit(v, 2) * (1e-3 - lambda_min(h.block()));
    EXPECT_GE(lambda_min(hermitian_part(rep.apply(x))), -1e-9);
  }
}
