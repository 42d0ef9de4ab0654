#include <gtest/gtest.h>

#include <set>

#include "support.hpp"

namespace loggran {
namespace {

using testing::Gen;

FbemGranule uniform_granule(const TrapezoidalSet& s, int c) {
  FbemGranule g;
  g.sets.fill(s);
  g.class_label = c;
  return g;
}

Vec fill(double v) {
  Vec x{};
  x.fill(v);
  return x;
}

TEST(FbemActivation, InsideEveryCoreIsOne) {
  const FbemGranule g = uniform_granule({0.1, 0.3, 0.6, 0.9}, 1);
  EXPECT_DOUBLE_EQ(activation(g, fill(0.5)), 1.0);
}

TEST(FbemActivation, OutsideOneSupportIsZero) {
  const FbemGranule g = uniform_granule({0.1, 0.3, 0.6, 0.9}, 1);
  Vec x = fill(0.5);
  x[3] = 0.95;
  EXPECT_DOUBLE_EQ(activation(g, x), 0.0);
}

TEST(FbemActivation, MinOfMemberships) {
  FbemGranule g = uniform_granule({0.0, 0.25, 0.5, 0.75}, 1);
  g.sets[4] = {0.0, 0.5, 0.6, 1.0};
  const Vec x{0.3, 0.125, 0.4, 0.25, 0.4};  // memberships 1, 0.5, 1, 1, 0.8
  EXPECT_DOUBLE_EQ(membership(g.sets[4], x[4]), 0.8);
  EXPECT_DOUBLE_EQ(activation(g, x), 0.5);
}

TEST(FbemClassify, SingleGranule) {
  FbemModel m;
  m.create_granule(fill(0.5), 3);
  EXPECT_EQ(m.classify(fill(0.5)).label, 3);
}

TEST(FbemClassify, ArgmaxActivation) {
  FbemModel m;
  m.mutable_granules().push_back(uniform_granule({0.0, 0.4, 0.4, 0.5}, 1));
  m.mutable_granules().push_back(uniform_granule({0.2, 0.3, 0.3, 0.5}, 2));
  // 0.7 for granule 1, (0.28 - 0.2)/0.1 = 0.8 for granule 2
  const Vec x = fill(0.28);
  EXPECT_NEAR(activation(m.granules()[0], x), 0.7, 1e-12);
  EXPECT_NEAR(activation(m.granules()[1], x), 0.8, 1e-12);
  const Classification c = m.classify(x);
  EXPECT_EQ(c.label, 2);
  EXPECT_EQ(c.winner, 1u);

  std::vector<FbemGranule> gs{uniform_granule({0.0, 0.5, 0.5, 1.0}, 1), uniform_granule({0.0, 0.5, 0.5, 1.0}, 2)};
  const Classification tie = select_winner(gs, {0.4, 0.4}, fill(0.2));
  EXPECT_EQ(tie.winner, 0u) << "ties go to the oldest granule";
}

TEST(FbemClassify, ZeroActivationFallsBackToNearestMidpoint) {
  FbemModel m;
  m.create_granule(fill(0.3), 1);
  m.create_granule(fill(0.9), 2);
  const Vec x = fill(0.4);
  EXPECT_DOUBLE_EQ(activation(m.granules()[0], x), 0.0);
  EXPECT_DOUBLE_EQ(activation(m.granules()[1], x), 0.0);
  EXPECT_EQ(m.classify(x).label, 1);
  EXPECT_EQ(m.classify(fill(0.7)).label, 2);
}

TEST(FbemClassify, EmptyModelThrows) {
  FbemModel m;
  EXPECT_THROW(m.classify(fill(0.5)), EmptyModelError);
  EXPECT_EQ(m.predict(fill(1.0)), kNoEstimate);
}

TEST(FbemClassify, ArgmaxInvariantUnderMonotoneRescaling) {
  Gen gen(21);
  for (int t = 0; t < 500; ++t) {
    std::vector<FbemGranule> gs;
    const int n = gen.integer(1, 8);
    for (int i = 0; i < n; ++i) {
      FbemGranule g;
      for (auto& s : g.sets) s = gen.trapezoid(0.6);
      g.class_label = gen.integer(1, 4);
      gs.push_back(g);
    }
    const Vec x = gen.vec();
    std::vector<double> a, b;
    for (const auto& g : gs) {
      a.push_back(activation(g, x));
      b.push_back(std::pow(activation(g, x), 3.0) * 0.25);
    }
    ASSERT_EQ(select_winner(gs, a, x).winner, select_winner(gs, b, x).winner);
  }
}

TEST(FbemCreate, PointGranule) {
  FbemModel m;
  const std::size_t i = m.create_granule(fill(0.7), 2);
  for (const auto& s : m.granules()[i].sets) EXPECT_EQ(s, TrapezoidalSet::point(0.7));
  EXPECT_EQ(m.granules()[i].class_label, 2);
  EXPECT_EQ(m.granularity().rules_created_this_period, 1u);
}

TEST(FbemUpdate, LowerSupportCase) {
  const TrapezoidalSet s = fbem_update_set({0.4, 0.5, 0.5, 0.6}, 0.35, 0.4);
  EXPECT_EQ(s, (TrapezoidalSet{0.35, 0.5, 0.5, 0.6}));
}

TEST(FbemUpdate, MidpointMovesLowerCoreOnly) {
  const TrapezoidalSet s = fbem_update_set({0.4, 0.45, 0.55, 0.6}, 0.5, 0.4);
  EXPECT_EQ(s, (TrapezoidalSet{0.4, 0.5, 0.55, 0.6}));
}

TEST(FbemUpdate, LowerSupportPointCollapsesCoreLeft) {
  const TrapezoidalSet s = fbem_update_set({0.4, 0.45, 0.55, 0.6}, 0.4, 0.4);
  EXPECT_EQ(s, (TrapezoidalSet{0.4, 0.4, 0.55, 0.6}));
}

TEST(FbemUpdate, EachCaseMovesOneParameter) {
  const TrapezoidalSet s{0.4, 0.45, 0.55, 0.6};  // mp 0.5, region [0.3, 0.7] at rho 0.4
  EXPECT_EQ(fbem_update_set(s, 0.35, 0.4), (TrapezoidalSet{0.35, 0.45, 0.55, 0.6}));
  EXPECT_EQ(fbem_update_set(s, 0.42, 0.4), (TrapezoidalSet{0.4, 0.42, 0.55, 0.6}));
  EXPECT_EQ(fbem_update_set(s, 0.48, 0.4), (TrapezoidalSet{0.4, 0.48, 0.55, 0.6}));
  EXPECT_EQ(fbem_update_set(s, 0.52, 0.4), (TrapezoidalSet{0.4, 0.45, 0.52, 0.6}));
  EXPECT_EQ(fbem_update_set(s, 0.58, 0.4), (TrapezoidalSet{0.4, 0.45, 0.58, 0.6}));
  EXPECT_EQ(fbem_update_set(s, 0.6, 0.4), (TrapezoidalSet{0.4, 0.45, 0.6, 0.6}));
  EXPECT_EQ(fbem_update_set(s, 0.65, 0.4), (TrapezoidalSet{0.4, 0.45, 0.55, 0.65}));
  EXPECT_EQ(fbem_update_set(s, 0.75, 0.4), s) << "outside the expansion region";
}

TEST(FbemUpdate, StaysInsidePriorExpansionRegion) {
  Gen gen(22);
  for (int t = 0; t < 20000; ++t) {
    const double rho = gen.uniform(0.01, 1.0);
    const TrapezoidalSet s = contract_to_rho(gen.trapezoid(), rho);
    const Interval e = expansion_region(s, rho);
    const double x = gen.uniform(e.lo, e.hi);
    const TrapezoidalSet n = fbem_update_set(s, x, rho);
    ASSERT_TRUE(n.is_ordered());
    ASSERT_LE(n.width(), rho + 1e-12);
    for (double p : n.params()) {
      ASSERT_GE(p, e.lo - 1e-12);
      ASSERT_LE(p, e.hi + 1e-12);
    }
  }
}

TEST(FbemMerge, IdenticalGranulesMerge) {
  std::vector<FbemGranule> gs{uniform_granule({0.3, 0.4, 0.5, 0.6}, 1), uniform_granule({0.3, 0.4, 0.5, 0.6}, 1)};
  EXPECT_TRUE(merge_similar(gs, 0.5));
  ASSERT_EQ(gs.size(), 1u);
  EXPECT_EQ(gs[0].sets[0], (TrapezoidalSet{0.3, 0.4, 0.5, 0.6}));
}

TEST(FbemMerge, DistanceAtRhoDoesNotMerge) {
  std::vector<FbemGranule> gs{uniform_granule(TrapezoidalSet::point(0.2), 1),
                              uniform_granule(TrapezoidalSet::point(0.5), 1)};
  EXPECT_FALSE(merge_similar(gs, 0.3));
  EXPECT_EQ(gs.size(), 2u);
}

TEST(FbemMerge, HullOfNearbyGranules) {
  std::vector<FbemGranule> gs{uniform_granule({0.1, 0.2, 0.3, 0.4}, 1), uniform_granule({0.2, 0.3, 0.4, 0.5}, 1)};
  EXPECT_TRUE(merge_similar(gs, 0.5));
  ASSERT_EQ(gs.size(), 1u);
  for (const auto& s : gs[0].sets) EXPECT_EQ(s, (TrapezoidalSet{0.1, 0.2, 0.4, 0.5}));
}

TEST(FbemMerge, OnlySameClassAndOnePairPerCall) {
  std::vector<FbemGranule> gs{uniform_granule(TrapezoidalSet::point(0.5), 1),
                              uniform_granule(TrapezoidalSet::point(0.5), 2),
                              uniform_granule(TrapezoidalSet::point(0.2), 3),
                              uniform_granule(TrapezoidalSet::point(0.21), 3),
                              uniform_granule(TrapezoidalSet::point(0.8), 4),
                              uniform_granule(TrapezoidalSet::point(0.85), 4)};
  EXPECT_TRUE(merge_similar(gs, 0.5));
  ASSERT_EQ(gs.size(), 5u);
  EXPECT_EQ(gs[2].sets[0], (TrapezoidalSet{0.2, 0.2, 0.21, 0.21})) << "closest pair merged first";
  EXPECT_EQ(gs[3].class_label, 4);
}

TEST(FbemDelete, Examples) {
  std::vector<FbemGranule> gs{uniform_granule(TrapezoidalSet::point(0.1), 1),
                              uniform_granule(TrapezoidalSet::point(0.2), 1),
                              uniform_granule(TrapezoidalSet::point(0.3), 1),
                              uniform_granule(TrapezoidalSet::point(0.9), 4)};
  gs[0].last_win_at = 300;  // current winner
  gs[1].last_win_at = 150;  // inside the horizon
  gs[2].last_win_at = 10;   // inactive, class has others
  gs[3].last_win_at = 5;    // inactive, sole class-4 granule
  EXPECT_EQ(delete_inactive(gs, 300, 200), 1u);
  ASSERT_EQ(gs.size(), 3u);
  EXPECT_DOUBLE_EQ(gs[1].sets[0].lower_core, 0.2);
  EXPECT_EQ(gs[2].class_label, 4);
}

TEST(FbemLearn, ColdStartCreatesAndReportsNoEstimate) {
  FbemModel m;
  const StepResult r = m.learn_step({1, 2, 3, 4, 5}, 2);
  EXPECT_EQ(r.estimate, kNoEstimate);
  EXPECT_TRUE(r.created);
  EXPECT_EQ(m.size(), 1u);
}

TEST(FbemLearn, MatchingInstanceInsideRegionUpdates) {
  FbemModel m(FbemConfig{0.5, 100, 3});
  m.learn_step(fill(0.0), 1);
  m.learn_step(fill(10.0), 1);  // first granule sits at 0.5, the second at 1.0
  ASSERT_EQ(m.size(), 2u);
  const StepResult r = m.learn_step(fill(4.0), 1);  // normalized 0.4, inside [0.25, 0.75]
  EXPECT_FALSE(r.created);
  EXPECT_EQ(r.estimate, 1);
  EXPECT_EQ(m.size(), 2u);
  EXPECT_EQ(m.granules()[0].sets[0], (TrapezoidalSet{0.4, 0.5, 0.5, 0.5}));
}

TEST(FbemLearn, NewClassInsideRegionCreates) {
  FbemModel m(FbemConfig{0.5, 100, 3});
  m.learn_step(fill(0.0), 1);
  m.learn_step(fill(10.0), 1);
  const StepResult r = m.learn_step(fill(4.0), 4);
  EXPECT_EQ(r.estimate, 1);
  EXPECT_TRUE(r.created);
  EXPECT_EQ(m.size(), 3u);
  EXPECT_EQ(m.granules()[2].class_label, 4);
}

TEST(FbemLearn, LabelIsRequestedAfterTheEstimate) {
  Gen gen(23);
  FbemModel m(FbemConfig{0.3, 20, 3});
  for (int t = 0; t < 500; ++t) {
    const Vec raw = gen.vec(0, 10);
    const FbemModel before = m;
    Normalizer n = before.normalizer();
    const int expected = before.empty() ? kNoEstimate : before.classify(n.normalize(raw)).label;
    int calls = 0;
    const StepResult r = m.learn_step(raw, [&](int estimate) {
      ++calls;
      EXPECT_EQ(estimate, expected);
      EXPECT_EQ(m.size(), before.size()) << "no learning before the label is revealed";
      return gen.integer(1, 4);
    });
    ASSERT_EQ(calls, 1);
    ASSERT_EQ(r.estimate, expected);
  }
}

TEST(FbemLearn, InvariantsOverRandomStreams) {
  Gen gen(24);
  for (int run = 0; run < 5; ++run) {
    FbemModel m(FbemConfig{gen.uniform(0.1, 0.9), static_cast<std::uint64_t>(gen.integer(20, 120)), 3});
    std::set<int> seen;
    for (int h = 1; h <= 3000; ++h) {
      const int c = gen.integer(1, 4);
      Vec raw = gen.vec(0, 5);
      raw[0] += c;  // weakly separable
      m.learn_step(raw, c);
      seen.insert(c);
      ASSERT_LE(m.size(), static_cast<std::size_t>(h));
      for (const auto& g : m.granules()) {
        ASSERT_TRUE(testing::sets_ordered(g.sets));
        ASSERT_LE(testing::max_width(g.sets), m.rho() + 1e-12);
      }
      for (int k : seen) ASSERT_TRUE(has_class(m.granules(), k));
    }
  }
}

TEST(FbemLearn, DeterministicReplay) {
  auto run = [] {
    Gen gen(25);
    FbemModel m(FbemConfig{0.4, 50, 3});
    std::vector<int> est;
    for (int h = 0; h < 2000; ++h) est.push_back(m.learn_step(gen.vec(0, 3), gen.integer(1, 4)).estimate);
    return std::pair{est, m.granules()};
  };
  const auto a = run();
  const auto b = run();
  EXPECT_EQ(a.first, b.first);
  ASSERT_EQ(a.second.size(), b.second.size());
  for (std::size_t i = 0; i < a.second.size(); ++i) EXPECT_EQ(a.second[i].sets, b.second[i].sets);
}

TEST(FbemLearn, HousekeepingAdaptsRhoAtPeriodEnd) {
  FbemModel m(FbemConfig{0.5, 10, 3});
  for (int h = 1; h <= 10; ++h) m.learn_step(fill(0.0), 1);  // one rule created in the period
  EXPECT_NEAR(m.rho(), 0.5 * (1.0 - 2.0 / 10.0), 1e-15);
  EXPECT_EQ(m.granularity().rules_created_this_period, 0u);
}

}  // namespace
}  // namespace loggran
