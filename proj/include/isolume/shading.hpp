#pragma once

// Final frame: blur the light texture and blend it into the unlit scene.

#include "isolume/grid.hpp"
#include "isolume/lighting.hpp"
#include "isolume/png_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

namespace isolume {

struct ShadeParams {
  double ambient_clarity = 0.4;
  int blur_radius = 2;
  bool dark_outside = false;  // scale the texture term by the light as well
  int threads = 1;

  void validate() const
  {
    if (!(ambient_clarity >= 0.0 && ambient_clarity <= 1.0))
      throw std::invalid_argument("ambient clarity must lie in [0, 1]");
    if (blur_radius < 0)
      throw std::invalid_argument("blur radius must be non-negative");
    if (threads < 1)
      throw std::invalid_argument("threads must be at least 1");
  }
};

// Mean over the (2r+1)^2 window with clamp-to-edge sampling, rounded half
// up. Window sums are exact integers; rounding happens once per cell.
inline Grid<std::uint8_t> box_blur(const Grid<std::uint8_t>& in, int radius)
{
  if (radius < 0)
    throw std::invalid_argument("blur radius must be non-negative");
  if (radius == 0)
    return in;
  const int w = in.width(), h = in.height();

  // Horizontal sums over an edge-replicated copy of each row.
  Grid<std::uint32_t> rows(w, h, 0);
  std::vector<std::uint8_t> padded(static_cast<std::size_t>(w + 2 * radius));
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* src = in.row(y);
    std::fill(padded.begin(), padded.begin() + radius, src[0]);
    std::copy(src, src + w, padded.begin() + radius);
    std::fill(padded.begin() + radius + w, padded.end(), src[w - 1]);
    std::uint32_t* dst = rows.row(y);
    std::uint32_t acc = 0;
    for (int k = 0; k < 2 * radius + 1; ++k)
      acc += padded[k];
    dst[0] = acc;
    for (int x = 1; x < w; ++x) {
      acc += padded[x + 2 * radius];
      acc -= padded[x - 1];
      dst[x] = acc;
    }
  }

  const std::uint32_t n = static_cast<std::uint32_t>((2 * radius + 1) * (2 * radius + 1));
  // Rounded quotients for every reachable sum, when that table stays small.
  std::vector<std::uint8_t> quotient;
  if (n * 255u < (1u << 20)) {
    quotient.resize(n * 255u + 1);
    for (std::uint32_t s = 0; s < quotient.size(); ++s)
      quotient[s] = static_cast<std::uint8_t>((s + n / 2) / n);
  }

  auto clamp_row = [h](int y) { return std::clamp(y, 0, h - 1); };
  Grid<std::uint8_t> out(w, h, 0);
  std::vector<std::uint32_t> acc(static_cast<std::size_t>(w), 0);
  for (int k = -radius; k <= radius; ++k) {
    const std::uint32_t* r = rows.row(clamp_row(k));
    for (int x = 0; x < w; ++x)
      acc[x] += r[x];
  }
  for (int y = 0; y < h; ++y) {
    std::uint8_t* dst = out.row(y);
    if (!quotient.empty())
      for (int x = 0; x < w; ++x)
        dst[x] = quotient[acc[x]];
    else
      for (int x = 0; x < w; ++x)
        dst[x] = static_cast<std::uint8_t>((acc[x] + n / 2) / n);
    const std::uint32_t* add = rows.row(clamp_row(y + radius + 1));
    const std::uint32_t* sub = rows.row(clamp_row(y - radius));
    for (int x = 0; x < w; ++x)
      acc[x] = acc[x] + add[x] - sub[x];
  }
  return out;
}

inline LightTexture box_blur(const LightTexture& tex, int radius)
{
  LightTexture out = tex;
  out.intensity = box_blur(tex.intensity, radius);
  return out;
}

struct Color {
  double r = 0, g = 0, b = 0, a = 0;
};

inline constexpr double kLumR = 0.349;
inline constexpr double kLumG = 0.114;
inline constexpr double kLumB = 0.537;

// Per-fragment blend:
//   luminance = 0.349 r + 0.114 g + 0.537 b
//   light     = luminance * light_value / (ambient^2 + 0.1)
//   texture   = color * sqrt(ambient)          (times light_value if dark_outside)
// The sum is clamped to [0, 1]; alpha passes through.
class FragmentShader {
public:
  FragmentShader(double ambient_clarity, bool dark_outside)
      : tex_scale_(std::sqrt(ambient_clarity)), light_denom_(ambient_clarity * ambient_clarity + 0.1),
        dark_outside_(dark_outside)
  {
  }

  Color operator()(Color c, double light_value) const
  {
    const double luminance = c.r * kLumR + c.g * kLumG + c.b * kLumB;
    const double light = luminance * light_value / light_denom_;
    const double tex = dark_outside_ ? tex_scale_ * light_value : tex_scale_;
    auto mix = [&](double v) { return std::clamp(v * tex + light, 0.0, 1.0); };
    return {mix(c.r), mix(c.g), mix(c.b), c.a};
  }

private:
  double tex_scale_;
  double light_denom_;
  bool dark_outside_;
};

inline Color shade_fragment(Color c, double light_value, double ambient_clarity, bool dark_outside = false)
{
  return FragmentShader(ambient_clarity, dark_outside)(c, light_value);
}

namespace detail {

// The fragment blend evaluated in 0..255 units, with the per-light-level
// factors tabulated once. Matches FragmentShader up to floating-point
// rounding (at most one step per channel).
inline void shade_rows(const Raster& scene, const Grid<std::uint8_t>& light, int margin, const ShadeParams& p,
                       Raster& out, int y0, int y1)
{
  const double tex_scale = std::sqrt(p.ambient_clarity);
  const double denom = p.ambient_clarity * p.ambient_clarity + 0.1;
  std::array<double, 256> tex_mul{}, light_mul{};
  for (int lv = 0; lv < 256; ++lv) {
    const double l = lv / 255.0;
    tex_mul[lv] = p.dark_outside ? tex_scale * l : tex_scale;
    light_mul[lv] = l / denom;
  }
  for (int y = y0; y < y1; ++y) {
    const Rgba* src = scene.row(y);
    const std::uint8_t* lrow = light.row(y + margin) + margin;
    Rgba* dst = out.row(y);
    for (int x = 0; x < scene.width(); ++x) {
      const Rgba s = src[x];
      const double t = tex_mul[lrow[x]];
      const double lit = (kLumR * s.r + kLumG * s.g + kLumB * s.b) * light_mul[lrow[x]];
      auto mix = [&](std::uint8_t c) {
        const double v = std::clamp(c * t + lit, 0.0, 255.0);
        return static_cast<std::uint8_t>(v + 0.5);
      };
      dst[x] = {mix(s.r), mix(s.g), mix(s.b), s.a};
    }
  }
}

}  // namespace detail

// Shades every scene pixel against an already-blurred texture. Rows are
// independent, so the threaded path is bit-identical to the serial one.
inline Raster shade_frame(const Raster& scene, const LightTexture& blurred, const ShadeParams& params)
{
  params.validate();
  const Size vp = blurred.viewport();
  if (scene.width() > vp.width || scene.height() > vp.height)
    throw std::invalid_argument("scene exceeds the light texture's viewport coverage");

  Raster out(scene.size());
  const int h = scene.height();
  const int workers = std::min(params.threads, h);
  if (workers <= 1) {
    detail::shade_rows(scene, blurred.intensity, blurred.margin, params, out, 0, h);
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&, t] {
        detail::shade_rows(scene, blurred.intensity, blurred.margin, params, out, h * t / workers,
                           h * (t + 1) / workers);
      });
  }
  return out;
}

inline Raster composite_frame(const Raster& scene, const LightTexture& tex, const ShadeParams& params)
{
  params.validate();
  return shade_frame(scene, box_blur(tex, params.blur_radius), params);
}

}  // namespace isolume
