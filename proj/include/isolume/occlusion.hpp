#pragma once

// Screen-space obstacle map estimated from sprite silhouettes.
//
// Each occluding sprite contributes a horizontal segment taken from a thin
// band of rows near its top, plus a vertical cross through the segment's
// centre. The result approximates the footprint a 3D object would have on
// the light plane.

#include "isolume/assets.hpp"
#include "isolume/scene.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace isolume {

struct ObstacleTag;
using ObstacleMap = BitGrid<ObstacleTag>;

enum class BandAnchor { FirstOpaqueRow, SpriteTop };

struct ObstacleOptions {
  int delta_y = 25;                      // band height in rows
  BandAnchor anchor = BandAnchor::FirstOpaqueRow;
  Point offset{};                        // screen -> map translation (texture margin)
};

struct Run {
  int start = 0;
  int length = 0;
};

// Longest run of true cells in one mask row; ties keep the leftmost.
inline Run longest_run(const OpacityMap& mask, int y)
{
  Run best, cur;
  const std::uint8_t* row = mask.row(y);
  for (int x = 0; x < mask.width(); ++x) {
    if (row[x]) {
      if (cur.length == 0)
        cur.start = x;
      ++cur.length;
      if (cur.length > best.length)
        best = cur;
    } else {
      cur.length = 0;
    }
  }
  return best;
}

struct SpriteSegment {
  int row = 0;  // sprite-local row of the chosen run
  Run run;
};

// Picks the band row whose longest run deviates least from the band's mean
// run length (topmost on ties). Rows without any opaque pixel are ignored.
inline std::optional<SpriteSegment> select_segment(const OpacityMap& mask, int delta_y,
                                                   BandAnchor anchor = BandAnchor::FirstOpaqueRow)
{
  int first = 0;
  if (anchor == BandAnchor::FirstOpaqueRow) {
    first = -1;
    for (int y = 0; y < mask.height() && first < 0; ++y)
      if (longest_run(mask, y).length > 0)
        first = y;
    if (first < 0)
      return std::nullopt;
  }
  const int last = std::min(mask.height(), first + delta_y);

  std::vector<SpriteSegment> rows;
  for (int y = first; y < last; ++y)
    if (Run r = longest_run(mask, y); r.length > 0)
      rows.push_back({y, r});
  if (rows.empty())
    return std::nullopt;

  // Compare |len - sum/n| as |n*len - sum| to stay in integers.
  long long sum = 0;
  for (const auto& r : rows)
    sum += r.run.length;
  const auto n = static_cast<long long>(rows.size());
  const SpriteSegment* best = &rows.front();
  long long best_dev = std::llabs(n * best->run.length - sum);
  for (const auto& r : rows) {
    const long long dev = std::llabs(n * r.run.length - sum);
    if (dev < best_dev) {
      best_dev = dev;
      best = &r;
    }
  }
  return *best;
}

// Marks the segment and its vertical cross. `origin` is the map position of
// the sprite's top-left pixel.
inline void mark_segment(ObstacleMap& map, const SpriteSegment& seg, Point origin)
{
  const int y = origin.y + seg.row;
  for (int x = 0; x < seg.run.length; ++x)
    map.set_clipped(origin.x + seg.run.start + x, y);
  const int cx = origin.x + seg.run.start + seg.run.length / 2;
  const int arm = seg.run.length / 4;
  for (int k = 1; k <= arm; ++k) {
    map.set_clipped(cx, y - k);
    map.set_clipped(cx, y + k);
  }
}

inline ObstacleMap build_obstacle_map(const DrawList& draw_list, const Atlas& atlas, Size out_size,
                                      const ObstacleOptions& opts = {})
{
  if (opts.delta_y < 1)
    throw std::invalid_argument("delta_y must be at least 1");
  ObstacleMap map(out_size);
  for (const auto& placed : draw_list) {
    const AtlasEntry& entry = atlas.at(placed.sprite_id);
    if (!entry.occluding)
      continue;
    if (auto seg = select_segment(entry.opacity, opts.delta_y, opts.anchor))
      mark_segment(map, *seg, placed.position + opts.offset);
  }
  return map;
}

// Box-shaped noise reduction: a blocked cell survives only if the n x n
// window anchored at it (clipped to the map) holds at least n blocked cells.
// Reads the input and writes a fresh map, so one pass never cascades.
inline ObstacleMap reduce_noise(const ObstacleMap& in, int n = 3)
{
  if (n < 1)
    throw std::invalid_argument("noise window must be at least 1");
  const int w = in.width(), h = in.height();
  // Summed-area table with a zero border row/column.
  std::vector<int> sat(static_cast<std::size_t>(w + 1) * (h + 1), 0);
  auto at = [&](int x, int y) -> int& { return sat[static_cast<std::size_t>(y) * (w + 1) + x]; };
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* row = in.row(y);
    int acc = 0;
    for (int x = 0; x < w; ++x) {
      acc += row[x];
      at(x + 1, y + 1) = at(x + 1, y) + acc;
    }
  }

  ObstacleMap out(in.size());
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* row = in.row(y);
    const int y1 = std::min(h, y + n);
    for (int x = 0; x < w; ++x) {
      if (!row[x])
        continue;
      const int x1 = std::min(w, x + n);
      const int count = at(x1, y1) - at(x, y1) - at(x1, y) + at(x, y);
      if (count >= n)
        out.set(x, y);
    }
  }
  return out;
}

}  // namespace isolume
