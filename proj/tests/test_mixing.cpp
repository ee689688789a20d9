#include <gtest/gtest.h>

#include <map>
#include <random>

#include "maskrefine/mixing.hpp"
#include "support.hpp"

using namespace maskrefine;
using testing_support::rand_int;

namespace {

ImageRaster solid(Size s, Rgb c) { return ImageRaster(s, c); }

}  // namespace

TEST(ClassMix, SelectsHalfRoundedUp) {
  LabelMap ys({4, 1}, 0);
  ys[1] = 13;
  ys[2] = kVoid;
  ys[3] = 13;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const MixMask m = classmix_select(ys, seed);
    ASSERT_EQ(m.selected_classes.size(), 1u);
    const ClassId c = *m.selected_classes.begin();
    EXPECT_TRUE(c == 0 || c == 13);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(m[i], ys[i] == c);
  }
  // single class: always chosen
  const MixMask one = classmix_select(LabelMap({3, 3}, 8), 7);
  EXPECT_EQ(one.selected_classes, (std::set<ClassId>{8}));
  for (std::size_t i = 0; i < 9; ++i) EXPECT_TRUE(one[i]);
}

TEST(ClassMix, OddCountRoundsUp) {
  LabelMap ys({5, 1}, 0);
  for (int i = 0; i < 5; ++i) ys[i] = static_cast<ClassId>(i);
  EXPECT_EQ(classmix_select(ys, 3).selected_classes.size(), 3u);
}

TEST(ClassMix, DeterministicPerSeed) {
  std::mt19937_64 g(61);
  const ClassRegistry reg = cityscapes_registry();
  const LabelMap ys = testing_support::random_labels(g, {20, 20}, reg, true);
  for (std::uint64_t seed : {0ull, 1ull, 42ull, 0xdeadbeefull})
    EXPECT_EQ(classmix_select(ys, seed), classmix_select(ys, seed));
}

TEST(ClassMix, FixedSequenceForSeed) {
  // mt19937_64 output is standardised, so this selection is the same everywhere.
  LabelMap ys({19, 1}, 0);
  for (int i = 0; i < 19; ++i) ys[i] = static_cast<ClassId>(i);
  std::mt19937_64 gen(2024);
  std::vector<ClassId> pool(19);
  for (int i = 0; i < 19; ++i) pool[i] = static_cast<ClassId>(i);
  for (std::size_t i = 0; i < 10; ++i) {
    const std::uint64_t bound = 19 - i;
    const std::uint64_t threshold = (0 - bound) % bound;
    std::uint64_t r;
    do r = gen(); while (r < threshold);
    std::swap(pool[i], pool[i + r % bound]);
  }
  const std::set<ClassId> expected(pool.begin(), pool.begin() + 10);
  EXPECT_EQ(classmix_select(ys, 2024).selected_classes, expected);
}

TEST(ClassMix, AllVoidIsAnError) {
  EXPECT_THROW(classmix_select(LabelMap({3, 3}, kVoid), 1), ValueError);
}

TEST(ClassMix, MaskAllOnesAndAllZeros) {
  const Size s{4, 3};
  const ImageRaster xs = solid(s, {200, 0, 0}), xt = solid(s, {0, 0, 200});
  const LabelMap ys(s, 2), yt(s, 9);
  MixMask ones{s, std::vector<std::uint8_t>(s.pixels(), 1), {2}};
  MixMask zeros{s, std::vector<std::uint8_t>(s.pixels(), 0), {}};
  const MixedPair a = classmix_apply(ones, xs, xt, ys, yt);
  EXPECT_EQ(a.image, xs);
  EXPECT_EQ(a.labels, ys);
  const MixedPair b = classmix_apply(zeros, xs, xt, ys, yt);
  EXPECT_EQ(b.image, xt);
  EXPECT_EQ(b.labels, yt);
  EXPECT_THROW(classmix_apply(ones, xs, solid({4, 4}, {}), ys, yt), DimensionError);
}

TEST(ClassMix, CompositeMatchesPerPixelOracle) {
  std::mt19937_64 g(62);
  const ClassRegistry reg = cityscapes_registry();
  for (int k = 0; k < 100; ++k) {
    const Size s{rand_int(g, 1, 24), rand_int(g, 1, 24)};
    LabelMap ys = testing_support::random_labels(g, s, reg, true);
    ys[0] = 3;  // never all void
    const LabelMap yt = testing_support::random_labels(g, s, reg, true);
    ImageRaster xs(s, Rgb{}), xt(s, Rgb{});
    for (std::size_t i = 0; i < s.pixels(); ++i) {
      xs[i] = {static_cast<std::uint8_t>(g()), 1, 2};
      xt[i] = {static_cast<std::uint8_t>(g()), 3, 4};
    }
    const MixMask m = classmix_select(ys, g());
    const MixedPair out = classmix_apply(m, xs, xt, ys, yt);
    for (std::size_t i = 0; i < s.pixels(); ++i) {
      const bool from_src = ys[i] != kVoid && m.selected_classes.count(ys[i]) > 0;
      ASSERT_EQ(out.image[i], from_src ? xs[i] : xt[i]);
      ASSERT_EQ(out.labels[i], from_src ? ys[i] : yt[i]);
    }
  }
}

TEST(ClassMix, SelectionIsRoughlyUniform) {
  LabelMap ys({4, 1}, 0);
  for (int i = 0; i < 4; ++i) ys[i] = static_cast<ClassId>(i);
  std::map<ClassId, int> hits;
  const int draws = 4000;
  for (int seed = 0; seed < draws; ++seed)
    for (ClassId c : classmix_select(ys, seed).selected_classes) ++hits[c];
  for (ClassId c = 0; c < 4; ++c) EXPECT_NEAR(hits[c] / double(draws), 0.5, 0.05);
}

TEST(BoundedDraw, StaysInRange) {
  std::mt19937_64 gen(5);
  for (std::uint64_t bound : {1ull, 2ull, 3ull, 7ull, 1000ull})
    for (int i = 0; i < 200; ++i) EXPECT_LT(bounded_draw(gen, bound), bound);
}
