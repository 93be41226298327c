#pragma once

// CPU light tracing into an 8-bit intensity texture.
//
// Every light fires one Bresenham ray from its centre to each (strided)
// border pixel of its a x b half-extent rectangle. Rays stop at the first
// obstacle and deposit a Chebyshev falloff 255 / (1 + max(|dx|, |dy|)).
// Each light is traced into its own patch, corrected against the sprite
// opacity maps, and merged into the shared texture with max(), so the final
// texture does not depend on light order or thread schedule.

#include "isolume/assets.hpp"
#include "isolume/grid.hpp"
#include "isolume/occlusion.hpp"
#include "isolume/scene.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

namespace isolume {

struct LightSource {
  Point center;  // screen space
  int a = 256;   // half-extent along x
  int b = 256;   // half-extent along y
  bool enabled = true;

  friend bool operator==(const LightSource&, const LightSource&) = default;
};

enum class TraceMode { Light, Shadow };

// Which point of an overlay sprite decides whether it is above or below a
// light centre during opacity correction.
enum class ReferencePoint { FootprintCenter, Anchor };

struct TraceConfig {
  int skip = 2;      // border-pixel stride
  int interval = 3;  // frames between full retraces
  TraceMode mode = TraceMode::Light;
  bool correction = true;
  ReferencePoint reference = ReferencePoint::FootprintCenter;
  int threads = 1;

  void validate() const
  {
    if (skip < 1)
      throw std::invalid_argument("skip must be at least 1");
    if (interval < 1)
      throw std::invalid_argument("update interval must be at least 1");
    if (threads < 1)
      throw std::invalid_argument("threads must be at least 1");
  }
};

inline constexpr int kDefaultMargin = 128;

// Viewport-plus-margin intensity field. Screen pixel (x, y) lives at texture
// cell (x + margin, y + margin).
struct LightTexture {
  Grid<std::uint8_t> intensity;
  int margin = kDefaultMargin;
  Point offset{};  // displacement accumulated since the last retrace

  LightTexture(Size viewport, int margin_px = kDefaultMargin)
      : intensity(viewport.width + 2 * margin_px, viewport.height + 2 * margin_px, 0), margin(margin_px)
  {
    if (margin_px < 0)
      throw std::invalid_argument("texture margin must be non-negative");
  }

  int width() const { return intensity.width(); }
  int height() const { return intensity.height(); }
  Size size() const { return intensity.size(); }
  Point to_texture(Point screen) const { return {screen.x + margin, screen.y + margin}; }
  Size viewport() const { return {width() - 2 * margin, height() - 2 * margin}; }

  friend bool operator==(const LightTexture&, const LightTexture&) = default;
};

// Distance falloff for an 8-bit texture.
constexpr std::uint8_t intensity(int dj, int di)
{
  return static_cast<std::uint8_t>(255 / (1 + std::max(dj, di)));
}

// Integer Bresenham walk with ties stepping diagonally: visits pixels from org towards dst, calling
// `visit(Point)` until it returns false or dst has been visited.
template <class Visitor>
constexpr void walk_bresenham(Point org, Point dst, Visitor&& visit)
{
  const int w = dst.x - org.x;
  const int h = dst.y - org.y;
  int dx1 = 0, dy1 = 0, dx2 = 0, dy2 = 0;
  if (w < 0) {
    dx1 = -1;
    dx2 = -1;
  } else if (w > 0) {
    dx1 = 1;
    dx2 = 1;
  }
  if (h < 0)
    dy1 = -1;
  else if (h > 0)
    dy1 = 1;
  int longest = std::abs(w);
  int shortest = std::abs(h);
  if (!(longest > shortest)) {
    longest = std::abs(h);
    shortest = std::abs(w);
    dx2 = 0;
    if (h < 0)
      dy2 = -1;
    else if (h > 0)
      dy2 = 1;
  }
  int numerator = longest >> 1;
  Point p = org;
  for (int i = 0; i <= longest; ++i) {
    if (!visit(p))
      return;
    numerator += shortest;
    if (!(numerator < longest)) {
      numerator -= longest;
      p.x += dx1;
      p.y += dy1;
    } else {
      p.x += dx2;
      p.y += dy2;
    }
  }
}

// A rectangular window onto texture space. `origin` is the texture
// coordinate of values(0, 0).
struct LightPatch {
  Grid<std::uint8_t> values;
  Point origin{};

  bool contains(Point t) const { return values.contains(t.x - origin.x, t.y - origin.y); }
  std::uint8_t& at(Point t) { return values(t.x - origin.x, t.y - origin.y); }
};

// Traces one light ray into `patch` (all points in texture space). Returns
// the number of pixels written.
inline long trace_ray(LightPatch& patch, const ObstacleMap& obstacles, Point org, Point dst, Point center)
{
  long writes = 0;
  walk_bresenham(org, dst, [&](Point p) {
    if (!patch.contains(p) || !obstacles.contains(p.x, p.y) || obstacles(p.x, p.y))
      return false;
    auto& v = patch.at(p);
    v = std::max(v, intensity(std::abs(p.x - center.x), std::abs(p.y - center.y)));
    ++writes;
    return true;
  });
  return writes;
}

inline long trace_ray(LightTexture& tex, const ObstacleMap& obstacles, Point org, Point dst, Point center)
{
  LightPatch whole{std::move(tex.intensity), {0, 0}};
  const long writes = trace_ray(whole, obstacles, org, dst, center);
  tex.intensity = std::move(whole.values);
  return writes;
}

// Inverted ray: everything from the first blocked pixel (inclusive) to dst
// is forced to 0; pixels before it are untouched.
inline void trace_shadow_ray(LightPatch& patch, const ObstacleMap& obstacles, Point org, Point dst)
{
  bool shadowed = false;
  walk_bresenham(org, dst, [&](Point p) {
    if (!patch.contains(p) || !obstacles.contains(p.x, p.y))
      return false;
    shadowed = shadowed || obstacles(p.x, p.y);
    if (shadowed)
      patch.at(p) = 0;
    return true;
  });
}

inline void trace_shadow_ray(LightTexture& tex, const ObstacleMap& obstacles, Point org, Point dst)
{
  LightPatch whole{std::move(tex.intensity), {0, 0}};
  trace_shadow_ray(whole, obstacles, org, dst);
  tex.intensity = std::move(whole.values);
}

// Border pixels of the (2a+1) x (2b+1) rectangle around `center`, clockwise
// from the top-left corner. Each side contributes its starting corner plus
// every skip-th interior pixel, so corners are always present.
inline std::vector<Point> border_targets(Point center, int a, int b, int skip)
{
  if (a < 1 || b < 1)
    throw std::invalid_argument("light half-extents must be at least 1");
  if (skip < 1)
    throw std::invalid_argument("skip must be at least 1");
  const Point corners[4] = {{center.x - a, center.y - b},
                            {center.x + a, center.y - b},
                            {center.x + a, center.y + b},
                            {center.x - a, center.y + b}};
  const Point steps[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const int interior[4] = {2 * a - 1, 2 * b - 1, 2 * a - 1, 2 * b - 1};
  std::vector<Point> out;
  out.reserve(4 + 2 * ((2 * a - 1) / skip + 1) + 2 * ((2 * b - 1) / skip + 1));
  for (int side = 0; side < 4; ++side) {
    out.push_back(corners[side]);
    for (int k = 0; k < interior[side]; k += skip)
      out.push_back({corners[side].x + steps[side].x * (k + 1), corners[side].y + steps[side].y * (k + 1)});
  }
  return out;
}

struct TraceStats {
  long rays = 0;
  long pixel_writes = 0;

  TraceStats& operator+=(const TraceStats& o)
  {
    rays += o.rays;
    pixel_writes += o.pixel_writes;
    return *this;
  }
  friend bool operator==(const TraceStats&, const TraceStats&) = default;
};

// The light's rectangle clipped to the texture, or nullopt when disjoint.
inline std::optional<LightPatch> make_patch(Size texture, Point center, int a, int b)
{
  const int x0 = std::max(0, center.x - a), x1 = std::min(texture.width, center.x + a + 1);
  const int y0 = std::max(0, center.y - b), y1 = std::min(texture.height, center.y + b + 1);
  if (x0 >= x1 || y0 >= y1)
    return std::nullopt;
  return LightPatch{Grid<std::uint8_t>(x1 - x0, y1 - y0, 0), {x0, y0}};
}

// Traces a single light into a fresh patch. In shadow mode the lit pass runs
// first and the inverted rays are painted over it.
inline std::optional<LightPatch> trace_light_patch(Size texture, const LightSource& light, Point center,
                                                   const ObstacleMap& obstacles, const TraceConfig& cfg,
                                                   TraceStats* stats = nullptr)
{
  if (!light.enabled)
    return std::nullopt;
  auto patch = make_patch(texture, center, light.a, light.b);
  if (!patch)
    return std::nullopt;
  TraceStats local;
  const auto targets = border_targets(center, light.a, light.b, cfg.skip);
  for (const Point dst : targets) {
    local.pixel_writes += trace_ray(*patch, obstacles, center, dst, center);
    ++local.rays;
  }
  if (cfg.mode == TraceMode::Shadow)
    for (const Point dst : targets)
      trace_shadow_ray(*patch, obstacles, center, dst);
  if (stats)
    *stats += local;
  return patch;
}

inline void merge_max(LightTexture& tex, const LightPatch& patch)
{
  for (int y = 0; y < patch.values.height(); ++y) {
    const std::uint8_t* src = patch.values.row(y);
    std::uint8_t* dst = tex.intensity.row(y + patch.origin.y) + patch.origin.x;
    for (int x = 0; x < patch.values.width(); ++x)
      dst[x] = std::max(dst[x], src[x]);
  }
}

// Traces one light straight into the texture (no opacity correction).
inline TraceStats render_light(LightTexture& tex, const LightSource& light, const ObstacleMap& obstacles,
                               const TraceConfig& cfg)
{
  cfg.validate();
  TraceStats stats;
  if (auto patch = trace_light_patch(tex.size(), light, tex.to_texture(light.center), obstacles, cfg, &stats))
    merge_max(tex, *patch);
  return stats;
}

// Opacity correction --------------------------------------------------------

namespace detail {

// First and last rows holding any opaque cell, or nullopt for an empty mask.
inline std::optional<std::pair<int, int>> opaque_rows(const OpacityMap& mask)
{
  int first = -1, last = -1;
  for (int y = 0; y < mask.height(); ++y) {
    const std::uint8_t* row = mask.row(y);
    if (std::any_of(row, row + mask.width(), [](std::uint8_t v) { return v != 0; })) {
      if (first < 0)
        first = y;
      last = y;
    }
  }
  if (first < 0)
    return std::nullopt;
  return std::pair{first, last};
}

}  // namespace detail

// Sprite-space y used for the above/below test, or nullopt if the sprite has
// no opaque pixel.
inline std::optional<int> reference_row(const AtlasEntry& entry, ReferencePoint ref)
{
  auto rows = detail::opaque_rows(entry.opacity);
  if (!rows)
    return std::nullopt;
  if (ref == ReferencePoint::Anchor)
    return 0;
  return (rows->first + rows->second) / 2;
}

// Adds (sprite above the light centre) or subtracts (at or below it) each
// overlay sprite's opacity map within the patch. Floor blocks (layer 0) are
// skipped. Sprites are visited in painter's order so nearer ones win.
inline void correct_patch(LightPatch& patch, Point center, const DrawList& placed, const Atlas& atlas,
                          Point screen_to_texture, ReferencePoint ref = ReferencePoint::FootprintCenter)
{
  const int px1 = patch.origin.x + patch.values.width();
  const int py1 = patch.origin.y + patch.values.height();
  for (const auto& p : placed) {
    if (p.layer == 0)
      continue;
    const AtlasEntry& entry = atlas.at(p.sprite_id);
    const OpacityMap& mask = entry.opacity;
    const Point pos = p.position + screen_to_texture;
    const int x0 = std::max(pos.x, patch.origin.x), x1 = std::min(pos.x + mask.width(), px1);
    const int y0 = std::max(pos.y, patch.origin.y), y1 = std::min(pos.y + mask.height(), py1);
    if (x0 >= x1 || y0 >= y1)
      continue;
    const auto ref_row = reference_row(entry, ref);
    if (!ref_row)
      continue;
    const bool above = pos.y + *ref_row < center.y;
    for (int y = y0; y < y1; ++y) {
      const std::uint8_t* m = mask.row(y - pos.y);
      std::uint8_t* out = patch.values.row(y - patch.origin.y);
      for (int x = x0; x < x1; ++x) {
        if (!m[x - pos.x])
          continue;
        std::uint8_t& v = out[x - patch.origin.x];
        v = above ? std::max(v, intensity(std::abs(x - center.x), std::abs(y - center.y))) : std::uint8_t{0};
      }
    }
  }
}

// Applies the correction for each light in turn over its rectangle of the
// shared texture. Lights are processed in the given order; render_lights()
// instead corrects each light's own patch before merging, which makes the
// result independent of light order.
inline void apply_opacity_correction(LightTexture& tex, const DrawList& placed, const Atlas& atlas,
                                     std::span<const LightSource> lights,
                                     ReferencePoint ref = ReferencePoint::FootprintCenter)
{
  const Point shift{tex.margin, tex.margin};
  for (const auto& light : lights) {
    if (!light.enabled)
      continue;
    const Point center = tex.to_texture(light.center);
    auto window = make_patch(tex.size(), center, light.a, light.b);
    if (!window)
      continue;
    // Correct a copy of the rectangle, then write it back.
    for (int y = 0; y < window->values.height(); ++y)
      std::memcpy(window->values.row(y), tex.intensity.row(y + window->origin.y) + window->origin.x,
                  static_cast<std::size_t>(window->values.width()));
    correct_patch(*window, center, placed, atlas, shift, ref);
    for (int y = 0; y < window->values.height(); ++y)
      std::memcpy(tex.intensity.row(y + window->origin.y) + window->origin.x, window->values.row(y),
                  static_cast<std::size_t>(window->values.width()));
  }
}

// Displacement --------------------------------------------------------------

// Moves every intensity by `delta`; vacated cells become 0. A shift as large
// as the texture clears it.
inline LightTexture displace_texture(const LightTexture& tex, Point delta)
{
  LightTexture out = tex;
  out.offset = tex.offset + delta;
  out.intensity.fill(0);
  const int w = tex.width(), h = tex.height();
  if (std::abs(delta.x) >= w || std::abs(delta.y) >= h)
    return out;
  const int x0 = std::max(0, delta.x), x1 = std::min(w, w + delta.x);
  const int count = x1 - x0;
  for (int y = std::max(0, delta.y); y < std::min(h, h + delta.y); ++y)
    std::memcpy(out.intensity.row(y) + x0, tex.intensity.row(y - delta.y) + (x0 - delta.x),
                static_cast<std::size_t>(count));
  return out;
}

// Frame loop ----------------------------------------------------------------

// Scene data consulted by the opacity correction.
struct CorrectionScene {
  const DrawList* placed = nullptr;
  const Atlas* atlas = nullptr;
};

struct FrameLightStats {
  bool retraced = false;
  TraceStats trace;
  double trace_us = 0;       // summed over lights
  double correction_us = 0;  // summed over lights
};

// Owns the cached texture and applies the retrace cadence: frames with
// index % interval == 0 retrace every light; the others reuse the cached
// texture shifted by -camera_delta.
class LightRenderer {
public:
  LightRenderer(Size viewport, TraceConfig cfg, int margin = kDefaultMargin) : cfg_(cfg), texture_(viewport, margin)
  {
    cfg_.validate();
  }

  const TraceConfig& config() const { return cfg_; }
  const LightTexture& texture() const { return texture_; }

  const LightTexture& render(long frame_index, std::span<const LightSource> lights, const ObstacleMap& obstacles,
                             CorrectionScene scene = {}, Point camera_delta = {}, FrameLightStats* stats = nullptr)
  {
    if (frame_index < 0)
      throw std::invalid_argument("frame index must be non-negative");
    if (obstacles.size() != texture_.size())
      throw std::invalid_argument("obstacle map must match the light texture size");
    FrameLightStats local;
    if (!traced_ || frame_index % cfg_.interval == 0) {
      retrace(lights, obstacles, scene, local);
      local.retraced = true;
      traced_ = true;
    } else {
      texture_ = displace_texture(texture_, -camera_delta);
    }
    if (stats)
      *stats = local;
    return texture_;
  }

private:
  void retrace(std::span<const LightSource> lights, const ObstacleMap& obstacles, CorrectionScene scene,
               FrameLightStats& stats)
  {
    using clock = std::chrono::steady_clock;
    texture_.intensity.fill(0);
    texture_.offset = {};
    std::vector<std::optional<LightPatch>> patches(lights.size());
    std::vector<TraceStats> per_light(lights.size());
    std::vector<double> trace_us(lights.size(), 0.0), correction_us(lights.size(), 0.0);
    const Point shift{texture_.margin, texture_.margin};

    auto work = [&](std::size_t i) {
      const Point center = texture_.to_texture(lights[i].center);
      const auto t0 = clock::now();
      patches[i] = trace_light_patch(texture_.size(), lights[i], center, obstacles, cfg_, &per_light[i]);
      const auto t1 = clock::now();
      if (patches[i] && cfg_.correction && scene.placed && scene.atlas)
        correct_patch(*patches[i], center, *scene.placed, *scene.atlas, shift, cfg_.reference);
      const auto t2 = clock::now();
      trace_us[i] = std::chrono::duration<double, std::micro>(t1 - t0).count();
      correction_us[i] = std::chrono::duration<double, std::micro>(t2 - t1).count();
    };

    const auto n = lights.size();
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(cfg_.threads), n);
    if (workers <= 1) {
      for (std::size_t i = 0; i < n; ++i)
        work(i);
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t t = 0; t < workers; ++t)
        pool.emplace_back([&, t] {
          for (std::size_t i = t; i < n; i += workers)
            work(i);
        });
    }

    for (std::size_t i = 0; i < n; ++i) {
      if (patches[i])
        merge_max(texture_, *patches[i]);
      stats.trace += per_light[i];
      stats.trace_us += trace_us[i];
      stats.correction_us += correction_us[i];
    }
  }

  TraceConfig cfg_;
  LightTexture texture_;
  bool traced_ = false;
};

}  // namespace isolume
