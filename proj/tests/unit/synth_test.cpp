#include <gtest/gtest.h>

#include <cmath>

#include "core/errors.hpp"
#include "core/synth.hpp"

using namespace convergema;

TEST(Scheme, UniformPositions) {
  const LearningScheme s = LearningScheme::uniform(5000, 5000);
  EXPECT_EQ(s.position(1), 5000);
  EXPECT_EQ(s.position(4), 20000);
  EXPECT_EQ(s.positions(3), (std::vector<std::int64_t>{5000, 10000, 15000}));
  const LearningScheme g = LearningScheme::uniform(1000, 250);
  EXPECT_EQ(g.position(3), 1500);
}

TEST(Scheme, LogRejectsBadEntries) {
  ObservationLog log(LearningScheme::uniform(5000, 5000));
  log.append({1, 5000, 80});
  auto code = [&](const Observation& o) {
    try {
      log.append(o);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInternal;
  };
  EXPECT_EQ(code({3, 15000, 81}), ErrorCode::kLevelGap);
  EXPECT_EQ(code({2, 11000, 81}), ErrorCode::kInvalidArgument);  // off scheme
  EXPECT_EQ(code({2, 10000, 0.0}), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code({2, 10000, 100.1}), ErrorCode::kInvalidArgument);
  log.append({2, 10000, 81});
  EXPECT_EQ(log.prefix(1).size(), 1u);
  EXPECT_TRUE(log.prefix(1).scheme());

  ObservationLog free_sizes;
  free_sizes.append({1, 10, 50});
  try {
    free_sizes.append({2, 10, 51});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(Generate, NoiselessFollowsTruth) {
  GeneratorSpec s;
  s.truth = {300, 0.45, 97.5};
  s.levels = 10;
  const ObservationLog log = generate(s);
  ASSERT_EQ(log.size(), 10u);
  for (const auto& o : log.entries()) {
    EXPECT_DOUBLE_EQ(o.x, 5000.0 * o.level);
    EXPECT_DOUBLE_EQ(o.accuracy, evaluate(s.truth, o.x));
  }
}

TEST(Generate, SeedIsReproducibleAndNoiseVaries) {
  GeneratorSpec s;
  s.levels = 30;
  s.noise_sd = 0.5;
  s.seed = 42;
  const ObservationLog a = generate(s);
  const ObservationLog b = generate(s);
  s.seed = 43;
  const ObservationLog c = generate(s);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].accuracy, b[i].accuracy);
    differs = differs || a[i].accuracy != c[i].accuracy;
  }
  EXPECT_TRUE(differs);
}

TEST(Generate, SpikesBiasAndClamp) {
  GeneratorSpec s;
  s.truth = {300, 0.45, 97.5};
  s.levels = 5;
  s.spikes = {{2, -3.0}, {4, 50.0}};
  s.bias_terms = {{1000.0, 1.0}};
  const ObservationLog log = generate(s);
  const double x2 = 10000.0;
  EXPECT_NEAR(log[1].accuracy, evaluate(s.truth, x2) + 1000.0 / x2 - 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(log[3].accuracy, 100.0);
}
