#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "maskrefine/fusion.hpp"
#include "support.hpp"

using namespace maskrefine;
using testing_support::from_ref;
using testing_support::rand_int;
using testing_support::to_ref;

namespace {

constexpr ClassId kRoad = 0, kSidewalk = 1, kBuilding = 2, kPole = 5, kLight = 6, kSign = 7;

LabelMap one(ClassId v) { return LabelMap({1, 1}, v); }

ConfidenceMap conf1(double v) { return ConfidenceMap({1, 1}, v); }

}  // namespace

TEST(Fuse1, Identities) {
  std::mt19937_64 g(41);
  const ClassRegistry reg = cityscapes_registry();
  const LabelMap uda = testing_support::random_labels(g, {9, 9}, reg, false);
  EXPECT_EQ(fuse1(LabelMap(uda.size(), kVoid), uda), uda);
  const LabelMap dense = testing_support::random_labels(g, {9, 9}, reg, false);
  EXPECT_EQ(fuse1(dense, uda), dense);
}

TEST(Fuse1, CheckerboardMatchesPerPixelSelect) {
  std::mt19937_64 g(42);
  const ClassRegistry reg = cityscapes_registry();
  const LabelMap uda = testing_support::random_labels(g, {10, 8}, reg, false);
  LabelMap sam = testing_support::random_labels(g, {10, 8}, reg, false);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 10; ++x)
      if ((x + y) % 2) sam.at(x, y) = kVoid;
  const LabelMap out = fuse1(sam, uda);
  EXPECT_EQ(out, from_ref(uda.size(), ref::fusion1(to_ref(sam), to_ref(uda))));
  for (ClassId v : out.data()) EXPECT_NE(v, kVoid);
  EXPECT_EQ(fuse1(out, uda), out);  // idempotent
}

TEST(Fuse1, Errors) {
  EXPECT_THROW(fuse1(LabelMap({2, 2}, 0), LabelMap({2, 3}, 0)), DimensionError);
  LabelMap uda({2, 2}, 0);
  uda[1] = kVoid;
  EXPECT_THROW(fuse1(LabelMap({2, 2}, 0), uda), ValueError);
}

TEST(Fuse2, Identities) {
  std::mt19937_64 g(43);
  const ClassRegistry reg = cityscapes_registry();
  const LabelMap uda = testing_support::random_labels(g, {9, 9}, reg, false);
  LabelMap sam(uda.size(), kRoad);  // road is large-area
  sam[4] = kVoid;
  EXPECT_EQ(fuse2(uda, sam, reg), uda);
  EXPECT_EQ(fuse2(uda, LabelMap(uda.size(), kPole), reg), LabelMap(uda.size(), kPole));
  EXPECT_THROW(fuse2(uda, LabelMap({1, 1}, 0), reg), DimensionError);
}

TEST(Fuse2, MatchesPerPixelOracle) {
  std::mt19937_64 g(44);
  ClassRegistry reg = cityscapes_registry();
  reg.small_classes = {kPole, kSign};
  reg.validate();
  for (int k = 0; k < 50; ++k) {
    const LabelMap uda = testing_support::random_labels(g, {12, 12}, reg, false);
    const LabelMap sam = testing_support::random_labels(g, {12, 12}, reg, true);
    EXPECT_EQ(fuse2(uda, sam, reg),
              from_ref(uda.size(), ref::fusion2(to_ref(uda), to_ref(sam), {kPole, kSign})));
  }
}

TEST(Fuse3, SinglePixelCases) {
  const ClassRegistry reg = cityscapes_registry();  // beta 0.99
  EXPECT_EQ(fuse3(one(kSidewalk), one(kRoad), conf1(0.995), reg)[0], kRoad);
  EXPECT_EQ(fuse3(one(kSidewalk), one(kRoad), conf1(0.98), reg)[0], kSidewalk);
  EXPECT_EQ(fuse3(one(kSidewalk), one(kRoad), conf1(0.99), reg)[0], kSidewalk);  // strict
  // sidewalk -> road is not a listed pair
  EXPECT_EQ(fuse3(one(kRoad), one(kSidewalk), conf1(0.999), reg)[0], kRoad);
  EXPECT_EQ(fuse3(one(kPole), one(kSign), conf1(0.999), reg)[0], kSign);
  EXPECT_EQ(fuse3(one(kBuilding), one(kLight), conf1(0.999), reg)[0], kLight);
  EXPECT_EQ(fuse3(one(kBuilding), one(kPole), conf1(1.0), reg)[0], kPole);
}

TEST(Fuse3, ConfidenceAtSixteenBitStep) {
  const ClassRegistry reg = cityscapes_registry();
  EXPECT_EQ(fuse3(one(kSidewalk), one(kRoad), conf1(64880.0 / 65535.0), reg)[0], kRoad);
  EXPECT_EQ(fuse3(one(kSidewalk), one(kRoad), conf1(64879.0 / 65535.0), reg)[0], kSidewalk);
}

TEST(Fuse3, BetaOneIsIdentity) {
  std::mt19937_64 g(45);
  for (int k = 0; k < 50; ++k) {
    ClassRegistry reg = testing_support::random_registry(g, rand_int(g, 1, 8));
    reg.beta = 1.0;
    const Size s{rand_int(g, 1, 16), rand_int(g, 1, 16)};
    const LabelMap y1 = testing_support::random_labels(g, s, reg, false);
    const LabelMap uda = testing_support::random_labels(g, s, reg, false);
    EXPECT_EQ(fuse3(y1, uda, ConfidenceMap(s, 1.0), reg), y1);
  }
}

TEST(Fuse3, MatchesOracleAndStaysWithinInputs) {
  std::mt19937_64 g(46);
  for (int k = 0; k < 200; ++k) {
    const ClassRegistry reg = testing_support::random_registry(g, rand_int(g, 1, 8));
    const Size s{rand_int(g, 1, 20), rand_int(g, 1, 20)};
    const LabelMap y1 = testing_support::random_labels(g, s, reg, false);
    const LabelMap uda = testing_support::random_labels(g, s, reg, false);
    const ConfidenceMap conf = testing_support::random_confidence(g, s);
    const LabelMap out = fuse3(y1, uda, conf, reg);
    const auto cfg = to_ref(reg);
    std::vector<double> c(conf.data().begin(), conf.data().end());
    ASSERT_EQ(out, from_ref(s, ref::fusion3(to_ref(y1), to_ref(uda), c, cfg.similar, cfg.beta)));
    for (std::size_t p = 0; p < out.pixels(); ++p) ASSERT_TRUE(out[p] == y1[p] || out[p] == uda[p]);
  }
}

TEST(Fuse3, MonotoneInBeta) {
  std::mt19937_64 g(47);
  ClassRegistry reg = testing_support::random_registry(g, 6);
  const Size s{24, 24};
  const LabelMap y1 = testing_support::random_labels(g, s, reg, false);
  const LabelMap uda = testing_support::random_labels(g, s, reg, false);
  const ConfidenceMap conf = testing_support::random_confidence(g, s);
  std::vector<bool> prev(s.pixels(), true);
  for (double beta : {0.0, 0.2, 0.5, 0.8, 0.9, 0.99, 1.0}) {
    reg.beta = beta;
    const LabelMap out = fuse3(y1, uda, conf, reg);
    for (std::size_t p = 0; p < s.pixels(); ++p) {
      const bool changed = out[p] != y1[p];
      EXPECT_TRUE(!changed || prev[p]);
      prev[p] = changed;
    }
  }
}

TEST(Fusion, PixelLocality) {
  std::mt19937_64 g(48);
  const ClassRegistry reg = cityscapes_registry();
  const Size s{17, 11};
  const LabelMap uda = testing_support::random_labels(g, s, reg, false);
  const LabelMap sam = testing_support::random_labels(g, s, reg, true);
  const ConfidenceMap conf = testing_support::random_confidence(g, s);
  std::vector<std::size_t> perm(s.pixels());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), g);
  auto scramble = [&](const auto& grid) {
    auto out = grid;
    for (std::size_t i = 0; i < perm.size(); ++i) out[i] = grid[perm[i]];
    return out;
  };
  auto unscramble = [&](const LabelMap& grid) {
    LabelMap out = grid;
    for (std::size_t i = 0; i < perm.size(); ++i) out[perm[i]] = grid[i];
    return out;
  };
  const LabelMap suda = scramble(uda), ssam = scramble(sam);
  EXPECT_EQ(unscramble(fuse1(ssam, suda)), fuse1(sam, uda));
  EXPECT_EQ(unscramble(fuse2(suda, ssam, reg)), fuse2(uda, sam, reg));
  const LabelMap y1 = fuse1(sam, uda);
  EXPECT_EQ(unscramble(fuse3(scramble(y1), suda, scramble(conf), reg)), fuse3(y1, uda, conf, reg));
}

TEST(Fusion, Fuse3ClassOrderIndependent) {
  // Apply the per-class rule one class at a time, ascending then descending.
  std::mt19937_64 g(49);
  for (int k = 0; k < 50; ++k) {
    const ClassRegistry reg = testing_support::random_registry(g, 8);
    const Size s{16, 16};
    const LabelMap y1 = testing_support::random_labels(g, s, reg, false);
    const LabelMap uda = testing_support::random_labels(g, s, reg, false);
    const ConfidenceMap conf = testing_support::random_confidence(g, s);
    auto run = [&](std::vector<ClassId> order) {
      LabelMap out = y1;
      for (ClassId ci : order)
        for (std::size_t p = 0; p < out.pixels(); ++p)
          if (uda[p] == ci && reg.similarity.contains(ci, y1[p]) && conf[p] > reg.beta) out[p] = ci;
      return out;
    };
    std::vector<ClassId> ids;
    for (const auto& c : reg.classes) ids.push_back(c.id);
    std::sort(ids.begin(), ids.end());
    const LabelMap asc = run(ids);
    std::reverse(ids.begin(), ids.end());
    EXPECT_EQ(asc, run(ids));
    EXPECT_EQ(asc, fuse3(y1, uda, conf, reg));
  }
}

TEST(Fuse3, Errors) {
  const ClassRegistry reg = cityscapes_registry();
  EXPECT_THROW(fuse3(LabelMap({2, 2}, 0), LabelMap({2, 2}, 0), ConfidenceMap({3, 2}, 1.0), reg),
               DimensionError);
  EXPECT_THROW(fuse3(LabelMap({2, 2}, 0), LabelMap({2, 1}, 0), ConfidenceMap({2, 2}, 1.0), reg),
               DimensionError);
}
