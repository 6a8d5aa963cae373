#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "edmol/density.hpp"
#include "edmol/error.hpp"
#include "edmol/fsmiles.hpp"
#include "edmol/generate.hpp"
#include "edmol/point_cloud.hpp"
#include "edmol/sdf.hpp"
#include "edmol/vocab.hpp"
#include "test_data.hpp"

using namespace edmol;
using edmol::testing::data_path;

namespace {

LabeledPointCloud small_cloud() {
  const Molecule m = strip_hydrogens(read_sdf_file(data_path("train20.sdf")).at(1));
  return sample_point_cloud(molecule_density(m), m, 10, 3);
}

ModelParams<float> small_model(std::uint64_t seed) {
  ModelConfig c = ModelConfig::toy();
  c.n_layer = 1;
  c.n_embd = 32;
  c.n_ctx = 64;
  return init_params<float>(c, seed);
}

GenerationConfig small_config() {
  GenerationConfig g;
  g.n_samples = 6;
  g.max_tokens = 24;
  g.temperature = 1.0;
  g.seed = 5;
  return g;
}

}  // namespace

TEST(SampleCategorical, ArgmaxAtTinyTemperature) {
  const std::vector<double> logits = {0.1, 2.5, -1.0, 2.5, 0.0};
  Rng rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_categorical(logits, 1e-6, rng), 1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_categorical(logits, 1e-9, rng), 1);
}

TEST(SampleCategorical, EqualLogitsSplitEvenly) {
  const std::vector<double> logits = {3.0, 3.0};
  Rng rng(2);
  int first = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) first += sample_categorical(logits, 1.0, rng) == 0;
  EXPECT_NEAR(static_cast<double>(first) / n, 0.5, 0.02);
}

TEST(SampleCategorical, MatchesSoftmaxFrequencies) {
  const std::vector<double> logits = {0.0, std::log(3.0), -std::numeric_limits<double>::infinity()};
  Rng rng(3);
  int second = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const int k = sample_categorical(logits, 1.0, rng);
    ASSERT_NE(k, 2);
    second += k == 1;
  }
  EXPECT_NEAR(static_cast<double>(second) / n, 0.75, 0.015);
}

TEST(SampleCategorical, SeededAndErrors) {
  const std::vector<double> logits = {0.3, 0.1, 0.9, -0.2};
  Rng a(7), b(7);
  for (int i = 0; i < 200; ++i) EXPECT_EQ(sample_categorical(logits, 0.8, a), sample_categorical(logits, 0.8, b));
  Rng r(0);
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_THROW(sample_categorical(std::vector<double>{0.0, std::nan("")}, 1.0, r), NumericError);
  EXPECT_THROW(sample_categorical(std::vector<double>{0.0, inf}, 1.0, r), NumericError);
  EXPECT_THROW(sample_categorical(std::vector<double>{-inf, -inf}, 1.0, r), NumericError);
  EXPECT_THROW(sample_categorical(logits, 0.0, r), ParameterError);
}

TEST(WithinSlack, Bounds) {
  const ToleranceConfig tol;
  const DiscretizationParams dp;
  EXPECT_TRUE(within_slack({0.2, 15.0, 15.0}, tol, dp));
  EXPECT_TRUE(within_slack({-1, -1, -1}, tol, dp));
  EXPECT_FALSE(within_slack({0.21, 1, 1}, tol, dp));
  EXPECT_FALSE(within_slack({0.0, 15.1, 1}, tol, dp));
  EXPECT_FALSE(within_slack({0.0, 1, 15.1}, tol, dp));
}

TEST(Generate, DeterministicPerSeed) {
  const auto cloud = small_cloud();
  const auto params = small_model(1);
  const auto cfg = small_config();
  const auto a = generate(cloud, params, cfg);
  const auto b = generate(cloud, params, cfg);
  EXPECT_EQ(generation_report_json(a), generation_report_json(b));
  ASSERT_EQ(a.size(), 6u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].seed, cfg.seed + i);
    EXPECT_EQ(a[i].sequence.tokens, b[i].sequence.tokens);
  }
  // A rollout depends only on its own seed.
  const Vec3 center = cloud.centroid();
  const auto one = generate_one(encode_cloud(cloud, center), center, params, cfg, cfg.seed + 3);
  EXPECT_EQ(one.sequence.tokens, a[3].sequence.tokens);
}

TEST(Generate, ArgmaxRolloutsAreIdentical) {
  const auto cloud = small_cloud();
  const auto params = small_model(2);
  auto cfg = small_config();
  cfg.temperature = 1e-7;
  const auto r = generate(cloud, params, cfg);
  for (const auto& x : r) EXPECT_EQ(x.sequence.tokens, r[0].sequence.tokens);
}

TEST(Generate, OutputsStayInVocabAndRange) {
  const auto cloud = small_cloud();
  const auto cfg = small_config();
  const Vocab& v = Vocab::instance();
  for (std::uint64_t s = 0; s < 3; ++s) {
    for (const auto& r : generate(cloud, small_model(10 + s), cfg)) {
      ASSERT_FALSE(r.sequence.tokens.empty());
      EXPECT_EQ(r.sequence.tokens.front(), v.start());
      EXPECT_LE(r.sequence.size(), cfg.max_tokens);
      int atoms = 0;
      for (int k = 0; k < r.sequence.size(); ++k) {
        EXPECT_GE(r.sequence.tokens[k], 0);
        EXPECT_LT(r.sequence.tokens[k], v.size());
        if (v.kind(r.sequence.tokens[k]) == TokenKind::Atom) {
          ++atoms;
          for (int d = 0; d < 3; ++d) {
            EXPECT_GE(r.sequence.coords[k][d], cfg.discretization.coord_min);
            EXPECT_LE(r.sequence.coords[k][d], cfg.discretization.coord_max);
          }
        }
      }
      EXPECT_EQ(static_cast<int>(r.residuals.size()), atoms);
      if (r.status == GenerationStatus::Complete) {
        EXPECT_EQ(r.sequence.tokens.back(), v.end());
        EXPECT_EQ(static_cast<int>(r.molecule.size()), atoms);
        for (const auto& res : r.residuals) EXPECT_TRUE(within_slack(res, cfg.tolerances, cfg.discretization));
      } else {
        EXPECT_EQ(r.molecule.size(), 0u);
        EXPECT_FALSE(r.message.empty());
      }
    }
  }
}

TEST(Generate, ConfigErrors) {
  const auto cloud = small_cloud();
  const auto params = small_model(1);
  auto cfg = small_config();
  cfg.temperature = 0;
  EXPECT_THROW(generate(cloud, params, cfg), ParameterError);
  cfg = small_config();
  cfg.n_samples = 0;
  EXPECT_THROW(generate(cloud, params, cfg), ParameterError);
  EXPECT_THROW(generate(LabeledPointCloud{}, params, small_config()), InputError);
  ModelConfig tiny = params.config;
  tiny.n_ctx = 11;
  EXPECT_THROW(generate(cloud, init_params<float>(tiny, 0), small_config()), ParameterError);
}
