#pragma once

// Isometric placement and painter's-order composition of a SceneMap.

#include "isolume/assets.hpp"
#include "isolume/procgen.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace isolume {

struct IsoLayout {
  int tile_w = 128;
  int tile_h = 128;
  int face_h = 32;  // vertical step between successive rows
  Point origin{};

  void validate() const
  {
    if (tile_w <= 0 || tile_w % 2 != 0)
      throw std::invalid_argument("tile_w must be positive and even");
    if (face_h <= 0 || face_h > tile_h)
      throw std::invalid_argument("face_h must lie in (0, tile_h]");
  }
};

// Row r+1 starts half a tile to the right of row r's first block when r+1 is
// odd, so each block sits between the two blocks of the row above.
constexpr Point block_screen_position(int row, int col, const IsoLayout& layout)
{
  return {layout.origin.x + col * layout.tile_w + (row % 2) * (layout.tile_w / 2),
          layout.origin.y + row * layout.face_h};
}

struct PlacedSprite {
  std::string sprite_id;
  Point position;  // top-left of the sprite image in screen space
  int layer = 0;   // 0 = block, 1..3 = overlays
  int row = 0;
  int col = 0;

  friend bool operator==(const PlacedSprite&, const PlacedSprite&) = default;
};

// Painter's order: (row, col, layer) ascending.
using DrawList = std::vector<PlacedSprite>;

inline bool painter_less(const PlacedSprite& a, const PlacedSprite& b)
{
  return std::tie(a.row, a.col, a.layer) < std::tie(b.row, b.col, b.layer);
}

inline DrawList build_draw_list(const SceneMap& map, const Atlas& atlas, const IsoLayout& layout)
{
  layout.validate();
  DrawList list;
  for (int r = 0; r < map.rows; ++r)
    for (int c = 0; c < map.cols; ++c) {
      const Point cell = block_screen_position(r, c, layout);
      const CellSpec& spec = map.at(r, c);
      list.push_back({spec.block, cell + atlas.at(spec.block).sprite.anchor, 0, r, c});
      for (std::size_t k = 0; k < spec.overlays.size(); ++k) {
        const auto& id = spec.overlays[k];
        list.push_back({id, cell + atlas.at(id).sprite.anchor, static_cast<int>(k) + 1, r, c});
      }
    }
  return list;
}

// Integer alpha-over with round-half-up: (s*a + d*(255-a) + 127) / 255.
constexpr std::uint8_t blend_channel(std::uint8_t src, std::uint8_t dst, std::uint8_t alpha)
{
  return static_cast<std::uint8_t>((src * alpha + dst * (255 - alpha) + 127) / 255);
}

inline void blit_over(Raster& dst, const Raster& src, Point at)
{
  const int x0 = std::max(0, at.x), x1 = std::min(dst.width(), at.x + src.width());
  const int y0 = std::max(0, at.y), y1 = std::min(dst.height(), at.y + src.height());
  for (int y = y0; y < y1; ++y) {
    const Rgba* s = src.row(y - at.y);
    Rgba* d = dst.row(y);
    for (int x = x0; x < x1; ++x) {
      const Rgba sp = s[x - at.x];
      if (sp.a == 0)
        continue;
      Rgba& dp = d[x];
      if (sp.a == 255) {
        dp = sp;
        continue;
      }
      dp = {blend_channel(sp.r, dp.r, sp.a), blend_channel(sp.g, dp.g, sp.a), blend_channel(sp.b, dp.b, sp.a),
            blend_channel(255, dp.a, sp.a)};
    }
  }
}

struct ComposeOptions {
  std::optional<Size> viewport;     // clamp for the output raster
  Rgba background{0, 0, 0, 255};
};

struct ComposedScene {
  DrawList draw_list;
  Raster raster;
};

// Screen-space extent [0, max x) x [0, max y) of all placements.
inline Size placement_extent(const DrawList& list, const Atlas& atlas)
{
  Size s{1, 1};
  for (const auto& p : list) {
    const Raster& img = atlas.at(p.sprite_id).sprite.image;
    s.width = std::max(s.width, p.position.x + img.width());
    s.height = std::max(s.height, p.position.y + img.height());
  }
  return s;
}

inline ComposedScene compose_scene(const SceneMap& map, const Atlas& atlas, const IsoLayout& layout,
                                   const ComposeOptions& opts = {})
{
  DrawList list = build_draw_list(map, atlas, layout);
  Size size = placement_extent(list, atlas);
  if (opts.viewport) {
    if (opts.viewport->width <= 0 || opts.viewport->height <= 0)
      throw std::invalid_argument("viewport must be positive");
    size = {std::min(size.width, opts.viewport->width), std::min(size.height, opts.viewport->height)};
  }
  Raster raster(size, opts.background);
  for (const auto& p : list)
    blit_over(raster, atlas.at(p.sprite_id).sprite.image, p.position);
  return {std::move(list), std::move(raster)};
}

// Draws a free-standing entity (e.g. a light-carrying character) on top of
// the composed map. Entities sort after every map cell.
inline void add_entity(ComposedScene& scene, const Atlas& atlas, const std::string& id, Point position)
{
  const Sprite& sprite = atlas.at(id).sprite;
  const int row = scene.draw_list.empty() ? 0 : scene.draw_list.back().row + 1;
  scene.draw_list.push_back({id, position, 3, row, 0});
  blit_over(scene.raster, sprite.image, position);
}

}  // namespace isolume
