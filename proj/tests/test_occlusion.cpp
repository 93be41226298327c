#include "isolume/occlusion.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace isolume;

namespace {

// Sprite with the given opaque run per row: (row, start, length).
struct RowRun {
  int row, start, length;
};

Sprite runs_sprite(const std::vector<RowRun>& runs, int size = 128)
{
  Raster r(size, size, Rgba{0, 0, 0, 0});
  for (const auto& rr : runs)
    for (int x = rr.start; x < rr.start + rr.length; ++x)
      r(x, rr.row) = {255, 255, 255, 255};
  return Sprite(r);
}

// Naive reference for reduce_noise: count the clipped window cell by cell.
ObstacleMap naive_reduce(const ObstacleMap& in, int n)
{
  ObstacleMap out(in.size());
  for (int y = 0; y < in.height(); ++y)
    for (int x = 0; x < in.width(); ++x) {
      if (!in(x, y))
        continue;
      int count = 0;
      for (int wy = y; wy < y + n; ++wy)
        for (int wx = x; wx < x + n; ++wx)
          if (in.contains(wx, wy) && in(wx, wy))
            ++count;
      if (count >= n)
        out.set(x, y);
    }
  return out;
}

ObstacleMap random_map(std::mt19937& rng, int w, int h, double density)
{
  std::bernoulli_distribution bit(density);
  ObstacleMap m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (bit(rng))
        m.set(x, y);
  return m;
}

}  // namespace

TEST(SelectSegment, TransparentSpriteHasNone)
{
  const OpacityMap mask = extract_opacity_map(runs_sprite({}));
  EXPECT_FALSE(select_segment(mask, 25).has_value());
}

TEST(BuildObstacleMap, TransparentBlockAddsNothing)
{
  Atlas atlas;
  atlas.add("ghost", runs_sprite({}), "bush", true);
  const DrawList list{{"ghost", {10, 10}, 1, 0, 0}};
  EXPECT_EQ(build_obstacle_map(list, atlas, {300, 300}).count(), 0u);
}

TEST(BuildObstacleMap, FortyPixelBandGivesSegmentAndCross)
{
  std::vector<RowRun> runs;
  for (int y = 30; y < 60; ++y)
    runs.push_back({y, 20, 40});
  Atlas atlas;
  atlas.add("slab", runs_sprite(runs), "bush", true);

  const auto seg = select_segment(atlas.at("slab").opacity, 25);
  ASSERT_TRUE(seg);
  EXPECT_EQ(seg->row, 30);  // every row deviates by 0: topmost wins
  EXPECT_EQ(seg->run.length, 40);

  const DrawList list{{"slab", {100, 50}, 1, 0, 0}};
  const ObstacleMap map = build_obstacle_map(list, atlas, {400, 300});

  ObstacleMap expected(400, 300);
  const int y = 50 + 30;
  for (int x = 0; x < 40; ++x)
    expected.set(100 + 20 + x, y);
  const int cx = 100 + 20 + 20;
  for (int k = 1; k <= 10; ++k) {
    expected.set(cx, y - k);
    expected.set(cx, y + k);
  }
  EXPECT_EQ(map, expected);
  EXPECT_EQ(map.count(), 60u);
}

TEST(SelectSegment, BandIsExactlyDeltaYRows)
{
  // Rows 0..23 alternate 1/99 (mean 50), row 24 = 48, row 25 = 50.
  // Scanning 24 rows picks row 0 (all tie), 25 rows picks row 24, 26 rows
  // would pick row 25.
  std::vector<RowRun> runs;
  for (int y = 0; y < 24; ++y)
    runs.push_back({y, 0, y % 2 ? 99 : 1});
  runs.push_back({24, 0, 48});
  runs.push_back({25, 0, 50});
  const OpacityMap mask = extract_opacity_map(runs_sprite(runs));
  EXPECT_EQ(select_segment(mask, 24)->row, 0);
  EXPECT_EQ(select_segment(mask, 25)->row, 24);
  EXPECT_EQ(select_segment(mask, 26)->row, 25);
}

TEST(SelectSegment, LongestRunPerRowAndLeastDeviation)
{
  // Row 10: runs of 5 and 12 -> 12. Row 11: 30. Row 12: 14. Mean 56/3 ≈ 18.7
  // -> row 12 (|14-18.7| = 4.7) beats row 10 (6.7) and row 11 (11.3).
  const std::vector<RowRun> runs = {{10, 0, 5}, {10, 20, 12}, {11, 0, 30}, {12, 3, 14}};
  const auto seg = select_segment(extract_opacity_map(runs_sprite(runs)), 25);
  ASSERT_TRUE(seg);
  EXPECT_EQ(seg->row, 12);
  EXPECT_EQ(seg->run.start, 3);
  EXPECT_EQ(seg->run.length, 14);
}

TEST(SelectSegment, SpriteTopAnchorStartsAtRowZero)
{
  // Opaque rows begin at 30; a sprite-top band of 25 rows sees nothing.
  std::vector<RowRun> runs;
  for (int y = 30; y < 40; ++y)
    runs.push_back({y, 0, 10});
  const OpacityMap mask = extract_opacity_map(runs_sprite(runs));
  EXPECT_FALSE(select_segment(mask, 25, BandAnchor::SpriteTop));
  EXPECT_EQ(select_segment(mask, 25, BandAnchor::FirstOpaqueRow)->row, 30);
}

TEST(BuildObstacleMap, NonOccludingSpritesAreSkipped)
{
  std::vector<RowRun> runs;
  for (int y = 0; y < 10; ++y)
    runs.push_back({y, 0, 40});
  Atlas atlas;
  atlas.add("hero", runs_sprite(runs), "character", false);
  const DrawList list{{"hero", {0, 0}, 3, 0, 0}};
  EXPECT_EQ(build_obstacle_map(list, atlas, {200, 200}).count(), 0u);
}

TEST(BuildObstacleMap, OffsetAndClipping)
{
  std::vector<RowRun> runs = {{0, 0, 8}};
  Atlas atlas;
  atlas.add("s", runs_sprite(runs, 16), "bush", true);
  ObstacleOptions opts;
  opts.offset = {5, 5};
  const ObstacleMap m = build_obstacle_map({{"s", {-10, -5}, 1, 0, 0}}, atlas, {20, 20}, opts);
  // Segment x in [-5, 3) y = 0 after offset; only x 0..2 lands on the map.
  // Cross at x = -1 falls off entirely.
  EXPECT_EQ(m.count(), 3u);
  EXPECT_TRUE(m(0, 0) && m(1, 0) && m(2, 0));
}

TEST(BuildObstacleMap, PropertiesOnGeneratedScene)
{
  const Atlas atlas = default_atlas();
  const SceneMap smap = generate_map("paper-demo", 10, 6, default_palette());
  const auto scene = compose_scene(smap, atlas, IsoLayout{});
  const Size size{900, 600};
  const ObstacleMap ref = build_obstacle_map(scene.draw_list, atlas, size);
  EXPECT_GT(ref.count(), 0u);

  // Order independence.
  DrawList shuffled = scene.draw_list;
  std::mt19937 rng(7);
  for (int i = 0; i < 5; ++i) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(build_obstacle_map(shuffled, atlas, size), ref);
  }

  // Per-sprite bounds and containment of the horizontal run.
  for (const auto& p : scene.draw_list) {
    const AtlasEntry& e = atlas.at(p.sprite_id);
    if (!e.occluding)
      continue;
    const auto seg = select_segment(e.opacity, 25);
    if (!seg)
      continue;
    const ObstacleMap single = build_obstacle_map({p}, atlas, size);
    EXPECT_LE(single.count(), static_cast<std::size_t>(seg->run.length + 2 * (seg->run.length / 4)));
    for (int x = 0; x < seg->run.length; ++x)
      EXPECT_TRUE(e.opacity(seg->run.start + x, seg->row));
  }
}

TEST(ReduceNoise, AllFalseStaysFalse)
{
  EXPECT_EQ(reduce_noise(ObstacleMap(16, 16), 3).count(), 0u);
}

TEST(ReduceNoise, IsolatedPixelErased)
{
  ObstacleMap m(10, 10);
  m.set(0, 0);
  EXPECT_EQ(reduce_noise(m, 3).count(), 0u);
}

TEST(ReduceNoise, SolidSquareEdges)
{
  ObstacleMap m(20, 20);
  for (int y = 5; y < 8; ++y)
    for (int x = 5; x < 8; ++x)
      m.set(x, y);
  const ObstacleMap out = reduce_noise(m, 3);
  // Window count at (x, y) is (8 - x) * (8 - y): cells with count < 3 go.
  EXPECT_TRUE(out(5, 5));   // 9
  EXPECT_TRUE(out(7, 5));   // 3
  EXPECT_TRUE(out(6, 6));   // 4
  EXPECT_FALSE(out(7, 6));  // 2
  EXPECT_FALSE(out(6, 7));  // 2
  EXPECT_FALSE(out(7, 7));  // 1
  EXPECT_EQ(out.count(), 6u);
  EXPECT_EQ(out, naive_reduce(m, 3));
}

TEST(ReduceNoise, MatchesNaiveOracleAndNeverSets)
{
  std::mt19937 rng(1234);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 5;
    const ObstacleMap in = random_map(rng, 13 + trial % 7, 9 + trial % 11, 0.1 + 0.02 * (trial % 20));
    const ObstacleMap out = reduce_noise(in, n);
    ASSERT_EQ(out, naive_reduce(in, n)) << "trial " << trial;
    for (int y = 0; y < in.height(); ++y)
      for (int x = 0; x < in.width(); ++x)
        ASSERT_FALSE(out(x, y) && !in(x, y));
  }
}

TEST(ReduceNoise, WindowOfOneIsIdentity)
{
  std::mt19937 rng(99);
  const ObstacleMap in = random_map(rng, 17, 12, 0.3);
  EXPECT_EQ(reduce_noise(in, 1), in);
  EXPECT_THROW(reduce_noise(in, 0), std::invalid_argument);
}
