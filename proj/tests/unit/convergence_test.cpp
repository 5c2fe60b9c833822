#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "core/convergence.hpp"
#include "core/errors.hpp"
#include "support/synthetic.hpp"

using namespace convergema;
using convergema::testing::power_law;
using convergema::testing::trace_of;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

EpsilonRecord rec(int level, double eps, bool rupture = false) {
  EpsilonRecord r;
  r.level = level;
  r.epsilon = eps;
  r.is_rupture = rupture;
  r.intersections = 1;
  return r;
}

}  // namespace

TEST(Intersect, KnownPairHasTwoClosedFormRoots) {
  // 1/x + 10 = 2/sqrt(x) + 10.5 with t = 1/sqrt(x): t^2 - 2t - 0.5 = 0 ... solved
  // in x: roots 6 -+ 4 sqrt 2.
  const IntersectionSet s = intersect({1, 1, 10}, {2, 0.5, 10.5}, 0.1, 100.0);
  ASSERT_EQ(s.count, 2);
  EXPECT_NEAR(s.first->x, 6.0 - 4.0 * std::sqrt(2.0), 1e-11);
  EXPECT_NEAR(s.last->x, 11.656854249492381, 1e-10);
  EXPECT_NEAR(s.last->y, 9.914213562373096, 1e-10);
  EXPECT_NEAR(10.5 - s.last->y, 0.5857864376269049, 1e-10);
}

TEST(Intersect, SingleCrossingAndNone) {
  // Same exponent, different scale and limit: one crossing where
  // (a1 - a2) x^-b = c1 - c2.
  const IntersectionSet one = intersect({4, 0.5, 12}, {2, 0.5, 11}, 0.5, 1e4);
  ASSERT_EQ(one.count, 1);
  EXPECT_NEAR(one.first->x, 4.0, 1e-10);
  EXPECT_EQ(one.first->x, one.last->x);

  const IntersectionSet none = intersect({1, 0.5, 12}, {1, 0.5, 10}, 1.0, 100.0);
  EXPECT_EQ(none.count, 0);
  EXPECT_FALSE(none.first);
}

TEST(Intersect, CoincidentAndInvalidRange) {
  EXPECT_EQ(code_of([] { intersect({1, 1, 10}, {1, 1, 10}, 1, 10); }), ErrorCode::kCoincidentCurves);
  EXPECT_EQ(code_of([] { intersect({1, 1, 10}, {1, 1, 10 + 1e-14}, 1, 10); }),
            ErrorCode::kCoincidentCurves);
  EXPECT_EQ(code_of([] { intersect({1, 1, 10}, {2, 1, 10}, 0, 10); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { intersect({1, 1, 10}, {2, 1, 10}, 5, 5); }), ErrorCode::kInvalidArgument);
}

TEST(EpsilonSequence, StartsAfterWLevelAndCarriesRuptures) {
  const LearningTrace tr = trace_of(power_law(300, 0.45, 97.5, 40, 0.02, 5), AnchoringStrategy::fixed(100));
  const auto eps = epsilon_sequence(tr);
  ASSERT_FALSE(eps.empty());
  EXPECT_EQ(eps.front().level, std::max(4, *tr.wlevel() + 2));
  for (const auto& r : eps) {
    EXPECT_GE(r.epsilon, 0.0);
    if (!r.is_rupture) {
      ASSERT_TRUE(r.q);
      EXPECT_NEAR(r.epsilon, std::abs(r.q->y - tr.trend(r.level)->curve.c), 1e-12);
    }
    if (tr.anchor_events().count(r.level)) EXPECT_TRUE(r.is_rupture);
  }
}

TEST(EpsilonSequence, EmptyWithoutWLevel) {
  LearningTrace tr{TraceOptions{}};
  for (int l = 1; l <= 3; ++l) tr.extend({l, 5000.0 * l, 70.0 + 5 * l});
  EXPECT_TRUE(epsilon_sequence(tr).empty());
}

TEST(EpsilonSequence, IncreasingBackboneRejectedForNonFixed) {
  GeneratorSpec s = power_law(300, 0.4, 96, 40);
  s.bias_terms.push_back({-2500.0, 0.8});
  const LearningTrace plain = trace_of(s, AnchoringStrategy::none());
  ASSERT_TRUE(plain.wlevel());
  EXPECT_EQ(code_of([&] { epsilon_sequence(plain); }), ErrorCode::kNotDecreasing);
  EpsilonOptions lenient;
  lenient.require_decreasing = false;
  EXPECT_NO_THROW(epsilon_sequence(plain, lenient));
  EXPECT_NO_THROW(epsilon_sequence(plain.with_strategy(AnchoringStrategy::fixed(100))));
}

TEST(Rules, ConditionValidation) {
  EXPECT_THROW(validate(ProximityCondition{ConditionKind::kAbsolute, 0.0}), Error);
  EXPECT_THROW(validate(ProximityCondition{ConditionKind::kRelative, -1.0}), Error);
  EXPECT_NO_THROW(validate(ProximityCondition{}));
}

TEST(Rules, AbsoluteStopsAtFirstRegularRecordWithinTau) {
  const LearningTrace tr = trace_of(power_law(20, 0.45, 99.97, 80), AnchoringStrategy::fixed(100));
  const double tau = 1.0;
  const auto eps = epsilon_sequence(tr);
  std::optional<int> want;
  for (const auto& r : eps) {
    if (!r.is_rupture && r.epsilon <= tau) {
      want = r.level;
      break;
    }
  }
  ASSERT_TRUE(want);
  EXPECT_EQ(clevel(tr, {ConditionKind::kAbsolute, tau}), want);
  EXPECT_EQ(AbsoluteRule(tau).stop_level(tr), want);
}

TEST(Rules, RelativeNeedsLambdaPlusOneSmallSteps) {
  TraceParams p;
  p.lambda = 2;
  const LearningTrace tr = trace_of(power_law(300, 0.45, 97.5, 40), AnchoringStrategy::none(), p);
  const double tau = 0.01;
  const auto stop = RelativeRule(tau).stop_level(tr);
  ASSERT_TRUE(stop);
  EXPECT_GT(*stop, *tr.plevel());
  const auto bb = tr.backbone();
  auto idx = [&](int level) {
    for (std::size_t k = 0; k < bb.size(); ++k) if (bb[k].level == level) return k;
    return bb.size();
  };
  const std::size_t k = idx(*stop);
  ASSERT_LT(k + 2, bb.size());
  for (std::size_t j = k; j <= k + 2; ++j) EXPECT_LE(std::abs(bb[j].alpha - bb[j - 1].alpha), tau);
}

TEST(Rules, NormalizeThresholdNeedsRelativeStop) {
  const LearningTrace tr = trace_of(power_law(300, 0.45, 97.5, 12), AnchoringStrategy::none());
  EXPECT_EQ(code_of([&] { normalize_threshold(tr, 1e-12); }), ErrorCode::kUnresolvedCLevel);
  const LearningTrace longer = trace_of(power_law(300, 0.45, 97.5, 60), AnchoringStrategy::none());
  const double ta = normalize_threshold(longer, 0.05);
  EXPECT_GT(ta, 0.0);
}

TEST(Put, DistanceIsRunningMinimumIgnoringLateRuptures) {
  const std::vector<EpsilonRecord> eps = {rec(5, 3.0, true), rec(6, 2.0), rec(7, 0.5, true),
                                          rec(8, 1.5), rec(9, 1.8)};
  EXPECT_EQ(put_distance(eps, 4), std::nullopt);
  EXPECT_DOUBLE_EQ(*put_distance(eps, 5), 3.0);
  EXPECT_DOUBLE_EQ(*put_distance(eps, 6), 2.0);
  EXPECT_DOUBLE_EQ(*put_distance(eps, 7), 2.0);
  EXPECT_DOUBLE_EQ(*put_distance(eps, 9), 1.5);
}

TEST(Put, PercentOfUncoveredThreshold) {
  const LearningTrace tr = trace_of(power_law(300, 0.45, 97.5, 20), AnchoringStrategy::fixed(100));
  const int p = *tr.plevel();
  std::vector<EpsilonRecord> eps;
  for (int l = p + 2; l <= p + 6; ++l) eps.push_back(rec(l, 5.0 - (l - p - 2)));  // 5,4,3,2,1
  EXPECT_DOUBLE_EQ(put(tr, eps, 1.0, p + 2), 100.0);
  EXPECT_DOUBLE_EQ(put(tr, eps, 1.0, p + 3), 75.0);
  EXPECT_DOUBLE_EQ(put(tr, eps, 1.0, p + 5), 25.0);
  EXPECT_DOUBLE_EQ(put(tr, eps, 1.0, p + 6), 0.0);
  EXPECT_DOUBLE_EQ(put(tr, eps, 6.0, p + 3), 0.0);  // already within tau
  EXPECT_EQ(code_of([&] { put(tr, eps, 1.0, p + 1); }), ErrorCode::kInvalidArgument);
}

TEST(Put, LookAheadShrinksWithLooserZeta) {
  const LearningTrace tr = trace_of(power_law(20, 0.45, 99.97, 80), AnchoringStrategy::fixed(100));
  const int strict = minimal_look_ahead(tr, 0.5, 0.0);
  const int loose = minimal_look_ahead(tr, 0.5, 100.0);
  EXPECT_EQ(loose, 2);
  EXPECT_GE(strict, loose);
  EXPECT_EQ(code_of([&] { minimal_look_ahead(tr, 1e-9, 0.0); }), ErrorCode::kNotReached);
}
