#include "opsys/kernels.hpp"

#include <cstring>

#include "test_util.hpp"

using namespace opsys;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST(Kernels, LambdaMinBatchParallelMatchesSerialBitwise) {
  Rng rng(51);
  std::vector<CMatrix> mats;
  for (int i = 0; i < 64; ++i) mats.push_back(random_hermitian_matrix(2 + i % 7, rng));
  const std::vector<double> s = kernels::lambda_min_batch_serial(mats);
  const std::vector<double> p = kernels::lambda_min_batch_parallel(mats);
  ASSERT_EQ(s.size(), p.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_TRUE(same_bits(s[i], p[i])) << i;
    EXPECT_EQ(s[i], lambda_min(mats[i]));
  }
}

TEST(Kernels, ScoreCandidatesParallelMatchesSerialBitwise) {
  Rng rng(52);
  for (const bool projection : {true, false}) {
    const SpacePtr v = testutil::full(2);
    const ContractionData c(v, projection ? diag({1, 0}) : diag({1, 0.4}));
    const ProjectionContext ctx = make_projection_context(c);
    std::vector<LevelElement> xs;
    for (int i = 0; i < 12; ++i) xs.push_back(random_hermitian_level(*v, 1 + i % 2, rng));
    const kernels::ScoreOptions o;
    const auto s = kernels::score_candidates_serial(ctx, xs, o);
    const auto p = kernels::score_candidates_parallel(ctx, xs, o);
    ASSERT_EQ(s.size(), p.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_TRUE(same_bits(s[i].ambient_lambda_min, p[i].ambient_lambda_min));
      EXPECT_EQ(s[i].quotient.decision, p[i].quotient.decision);
      EXPECT_TRUE(same_bits(s[i].quotient.margin(), p[i].quotient.margin())) << i;
    }
  }
}

TEST(Kernels, ParallelPropagatesErrors) {
  const SpacePtr v = testutil::full(2);
  const ProjectionContext ctx = make_projection_context(ContractionData(v, diag({1, 0})));
  const SpacePtr m3 = testutil::full(3);
  const std::vector<LevelElement> xs{LevelElement::unit(*m3, 1)};
  EXPECT_OPSYS_ERROR(kernels::score_candidates_parallel(ctx, xs, {}), ErrorKind::ShapeMismatch);
}

TEST(Kernels, ThreadCountPositive) { EXPECT_GE(kernels::max_threads(), 1); }
