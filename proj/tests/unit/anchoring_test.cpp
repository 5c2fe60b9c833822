#include <gtest/gtest.h>

#include <functional>

#include "core/anchoring.hpp"
#include "core/errors.hpp"
#include "core/trace_engine.hpp"
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

}  // namespace

TEST(Strategy, ParseAndPrintRoundTrip) {
  for (const char* text : {"none", "canonical", "fixed:100", "fixed:101.5", "fixed:100+7"}) {
    EXPECT_EQ(parse_strategy(text).to_string(), text);
  }
  const auto s = parse_strategy("fixed:102+3");
  EXPECT_EQ(s.kind, AnchorKind::kFixedLookAhead);
  EXPECT_DOUBLE_EQ(s.beta, 102.0);
  EXPECT_EQ(s.look_ahead, 3);
  EXPECT_TRUE(s.is_fixed());
  EXPECT_FALSE(AnchoringStrategy::canonical().is_fixed());
}

TEST(Strategy, ParseErrors) {
  EXPECT_EQ(code_of([] { parse_strategy("fixd:100"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { parse_strategy("fixed:"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { parse_strategy("fixed:100+"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { parse_strategy("fixed:abc"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { parse_strategy("fixed:99.9"); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { parse_strategy("fixed:100+-1"); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { AnchoringStrategy::fixed_look_ahead(100, -1); }),
            ErrorCode::kInvalidArgument);
}

TEST(AnchorForLevel, FixedIsConstantPastWLevel) {
  const LearningTrace tr = trace_of(power_law(300, 0.45, 97.5, 20), AnchoringStrategy::fixed(101));
  const int w = *tr.wlevel();
  EXPECT_EQ(anchor_for_level(tr.options().strategy, w, tr), std::nullopt);
  for (int l = w + 1; l <= 20; ++l) EXPECT_EQ(anchor_for_level(tr.options().strategy, l, tr), 101.0);
}

TEST(AnchorForLevel, CanonicalChainsPreviousAsymptote) {
  const LearningTrace tr =
      trace_of(power_law(300, 0.45, 97.5, 20, 0.05, 2), AnchoringStrategy::canonical());
  const int w = *tr.wlevel();
  EXPECT_DOUBLE_EQ(*tr.anchor(w + 1), tr.reference_trends().at(w).curve.c);
  for (int l = w + 2; l <= 20; ++l) {
    EXPECT_DOUBLE_EQ(*tr.anchor(l), *tr.anchored_alpha(l - 1)) << l;
  }
  EXPECT_EQ(tr.anchor_events(), std::set<int>{w + 1});
}

TEST(AnchorForLevel, LookAheadFreezesAfterPLevelPlusL) {
  const int la = 4;
  const LearningTrace tr = trace_of(power_law(300, 0.45, 97.5, 25, 0.05, 3),
                                    AnchoringStrategy::fixed_look_ahead(100.0, la));
  const int w = *tr.wlevel();
  const int freeze = std::max(*tr.plevel() + la, w + 1);
  for (int l = w + 1; l <= freeze; ++l) EXPECT_EQ(*tr.anchor(l), 100.0);
  for (int l = freeze + 1; l <= 25; ++l) {
    EXPECT_DOUBLE_EQ(*tr.anchor(l), *tr.anchored_alpha(freeze)) << l;
  }
  EXPECT_TRUE(tr.anchor_events().count(w + 1));
  EXPECT_TRUE(tr.anchor_events().count(freeze + 1));
}

TEST(AnchorForLevel, MissingLevels) {
  LearningTrace tr{TraceOptions{}};
  for (int l = 1; l <= 3; ++l) tr.extend({l, 5000.0 * l, 80.0 + l});
  ASSERT_FALSE(tr.wlevel());
  EXPECT_EQ(code_of([&] { anchor_for_level(AnchoringStrategy::fixed(100), 5, tr); }),
            ErrorCode::kMissingWLevel);
  EXPECT_EQ(anchor_for_level(AnchoringStrategy::none(), 5, tr), std::nullopt);
}

TEST(Sufficiency, FixedAnchorsPassOnCleanCurve) {
  const LearningTrace tr = trace_of(power_law(300, 0.45, 97.5, 20), AnchoringStrategy::none());
  std::map<int, double> anchors;
  for (int l = *tr.wlevel() + 1; l <= 20; ++l) anchors[l] = 100.0;
  const SufficiencyReport r = verify_sufficiency(tr, anchors);
  EXPECT_FALSE(r.levels.empty());
  EXPECT_TRUE(r.all_pass);
}

TEST(Sufficiency, AnchorBelowPlainAsymptoteFailsPastPLevel) {
  const LearningTrace tr = trace_of(power_law(300, 0.45, 97.5, 20), AnchoringStrategy::none());
  std::map<int, double> anchors;
  for (int l = *tr.plevel() + 1; l <= 20; ++l) anchors[l] = 90.0;
  const SufficiencyReport r = verify_sufficiency(tr, anchors);
  EXPECT_FALSE(r.all_pass);
  for (const auto& row : r.levels) {
    EXPECT_TRUE(row.gated);
    EXPECT_LT(row.bound_margin, 0.0);
  }
}
