#include "isolume/scene.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace isolume;

namespace {

Atlas flat_atlas()
{
  Atlas atlas;
  atlas.add("red", Sprite(Raster(128, 128, Rgba{200, 0, 0, 255})), "floor-block", true);
  atlas.add("blue", Sprite(Raster(128, 128, Rgba{0, 0, 200, 255})), "floor-block", true);
  atlas.add("ghost", Sprite(Raster(128, 128, Rgba{9, 9, 9, 0})), "bush", true);
  return atlas;
}

SceneMap one_cell(std::string block, std::vector<std::string> overlays = {})
{
  return {"t", 1, 1, {{std::move(block), std::move(overlays)}}};
}

}  // namespace

TEST(BlockScreenPosition, StaggeredRows)
{
  const IsoLayout layout{128, 128, 32, {0, 0}};
  EXPECT_EQ(block_screen_position(0, 0, layout), (Point{0, 0}));
  EXPECT_EQ(block_screen_position(1, 0, layout), (Point{64, 32}));
  EXPECT_EQ(block_screen_position(2, 3, layout), (Point{384, 64}));
  static_assert(block_screen_position(1, 1, IsoLayout{}) == Point{192, 32});
}

TEST(BlockScreenPosition, OddRowSitsBetweenNeighboursAbove)
{
  // Block (r+1, c) is centred between (r, c) and (r, c+1) when r+1 is odd.
  const IsoLayout layout{};
  for (int c = 0; c < 5; ++c) {
    const Point below = block_screen_position(1, c, layout);
    const Point p = block_screen_position(0, c, layout);
    const Point q = block_screen_position(0, c + 1, layout);
    EXPECT_EQ(2 * below.x, p.x + q.x);
    EXPECT_EQ(below.y, p.y + layout.face_h);
  }
}

TEST(IsoLayout, Validation)
{
  EXPECT_THROW((IsoLayout{127, 128, 32, {}}).validate(), std::invalid_argument);
  EXPECT_THROW((IsoLayout{128, 128, 0, {}}).validate(), std::invalid_argument);
  EXPECT_THROW((IsoLayout{128, 128, 129, {}}).validate(), std::invalid_argument);
  EXPECT_NO_THROW((IsoLayout{128, 128, 128, {}}).validate());
}

TEST(BlendChannel, IntegerAlphaOver)
{
  EXPECT_EQ(blend_channel(200, 0, 255), 200);
  EXPECT_EQ(blend_channel(200, 50, 0), 50);
  // (100*128 + 0*127 + 127) / 255 = 50
  EXPECT_EQ(blend_channel(100, 0, 128), 50);
}

TEST(ComposeScene, SingleOpaqueBlock)
{
  const Atlas atlas = flat_atlas();
  const auto scene = compose_scene(one_cell("red"), atlas, IsoLayout{});
  EXPECT_EQ(scene.raster.size(), (Size{128, 128}));
  EXPECT_EQ(scene.raster, atlas.at("red").sprite.image);
  ASSERT_EQ(scene.draw_list.size(), 1u);
}

TEST(ComposeScene, TransparentOverlayIsIdentity)
{
  const Atlas atlas = flat_atlas();
  const auto a = compose_scene(one_cell("red"), atlas, IsoLayout{});
  const auto b = compose_scene(one_cell("red", {"ghost"}), atlas, IsoLayout{});
  EXPECT_EQ(a.raster, b.raster);
  EXPECT_EQ(b.draw_list.size(), 2u);
  EXPECT_EQ(b.draw_list[1].layer, 1);
}

TEST(ComposeScene, LaterRowOverdrawsOverlapBand)
{
  const Atlas atlas = flat_atlas();
  const SceneMap m{"t", 2, 1, {{"red", {}}, {"blue", {}}}};
  const auto scene = compose_scene(m, atlas, IsoLayout{});
  // Row 1 starts at (64, 32); the band y in [32, 128) x in [64, 128) is shared.
  EXPECT_EQ(scene.raster(100, 50), (Rgba{0, 0, 200, 255}));
  EXPECT_EQ(scene.raster(10, 50), (Rgba{200, 0, 0, 255}));
  EXPECT_EQ(scene.raster(10, 140), (Rgba{0, 0, 0, 255}));  // background
  EXPECT_EQ(scene.raster.size(), (Size{192, 160}));
}

TEST(ComposeScene, FullFaceHeightMeansNoRowOverlap)
{
  const Atlas atlas = flat_atlas();
  const IsoLayout layout{128, 128, 128, {}};
  const SceneMap m{"t", 2, 1, {{"red", {}}, {"blue", {}}}};
  const auto scene = compose_scene(m, atlas, layout);
  for (int y = 0; y < 128; ++y)
    EXPECT_EQ(scene.raster(100, y), (Rgba{200, 0, 0, 255}));
  for (int y = 128; y < 256; ++y)
    EXPECT_EQ(scene.raster(100, y), (Rgba{0, 0, 200, 255}));
}

TEST(ComposeScene, PainterOrderAndPlacement)
{
  const Atlas atlas = default_atlas();
  const SceneMap m = generate_map("paper-demo", 6, 5, default_palette());
  const IsoLayout layout{};
  const auto scene = compose_scene(m, atlas, layout);
  EXPECT_TRUE(std::is_sorted(scene.draw_list.begin(), scene.draw_list.end(), painter_less));
  for (const auto& p : scene.draw_list) {
    EXPECT_GE(p.layer, 0);
    EXPECT_LE(p.layer, 3);
    EXPECT_EQ(p.position, block_screen_position(p.row, p.col, layout) + atlas.at(p.sprite_id).sprite.anchor);
  }
}

TEST(ComposeScene, AnchorOffsetsPlacement)
{
  Atlas atlas = flat_atlas();
  atlas.add("offset", Sprite(Raster(8, 8, Rgba{1, 2, 3, 255}), Point{2, 5}), "bush", true);
  const auto scene = compose_scene(one_cell("red", {"offset"}), atlas, IsoLayout{});
  EXPECT_EQ(scene.draw_list[1].position, (Point{2, 5}));
  EXPECT_EQ(scene.raster(2, 5), (Rgba{1, 2, 3, 255}));
}

TEST(ComposeScene, DeterministicAndViewportClamped)
{
  const Atlas atlas = default_atlas();
  const SceneMap m = generate_map("paper-demo", 32, 12, default_palette());
  ComposeOptions opts;
  opts.viewport = Size{1280, 720};
  const auto a = compose_scene(m, atlas, IsoLayout{}, opts);
  const auto b = compose_scene(m, atlas, IsoLayout{}, opts);
  EXPECT_EQ(a.raster, b.raster);
  EXPECT_EQ(a.raster.size(), (Size{1280, 720}));
}

TEST(ComposeScene, UnknownSprite)
{
  EXPECT_THROW(compose_scene(one_cell("nope"), flat_atlas(), IsoLayout{}), UnknownSpriteError);
  EXPECT_THROW(compose_scene(one_cell("red", {"nope"}), flat_atlas(), IsoLayout{}), UnknownSpriteError);
}
