#pragma once

// Sprites, their opacity maps, and the atlas that names them.

#include "isolume/grid.hpp"
#include "isolume/png_io.hpp"
#include "isolume/procgen.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace isolume {

struct Sprite {
  Raster image;
  Point anchor;  // placement origin offset within the tile cell

  Sprite(Raster img, Point a = {}) : image(std::move(img)), anchor(a)
  {
    if (!image.contains(anchor.x, anchor.y))
      throw std::invalid_argument("sprite anchor lies outside the image");
  }
};

struct OpacityTag;
using OpacityMap = BitGrid<OpacityTag>;

inline Sprite load_sprite(const std::filesystem::path& path) { return Sprite(read_png(path)); }

// True where alpha strictly exceeds the threshold.
inline OpacityMap extract_opacity_map(const Sprite& sprite, std::uint8_t alpha_threshold = 0)
{
  const Raster& img = sprite.image;
  OpacityMap mask(img.size());
  for (int y = 0; y < img.height(); ++y) {
    const Rgba* px = img.row(y);
    for (int x = 0; x < img.width(); ++x)
      if (px[x].a > alpha_threshold)
        mask.set(x, y);
  }
  return mask;
}

// Synthetic test art --------------------------------------------------------

enum class SpriteKind { FloorBlock, Bush, Tree, Character };

inline std::string_view to_string(SpriteKind k)
{
  switch (k) {
    case SpriteKind::FloorBlock: return "floor-block";
    case SpriteKind::Bush: return "bush";
    case SpriteKind::Tree: return "tree";
    case SpriteKind::Character: return "character";
  }
  return "?";
}

inline SpriteKind parse_sprite_kind(std::string_view s)
{
  for (auto k : {SpriteKind::FloorBlock, SpriteKind::Bush, SpriteKind::Tree, SpriteKind::Character})
    if (to_string(k) == s)
      return k;
  throw std::invalid_argument("unknown sprite kind '" + std::string(s) + "'");
}

inline constexpr int kSpriteSize = 128;

namespace detail {

inline std::uint8_t clamp_u8(double v) { return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0)); }

inline Rgba shade(Rgba c, double f) { return {clamp_u8(c.r * f), clamp_u8(c.g * f), clamp_u8(c.b * f), c.a}; }

// Uniform in [0, 1) from the top 53 bits.
inline double unit(Prng& rng) { return static_cast<double>(rng.next() >> 11) * 0x1.0p-53; }

// Filled ellipse whose horizontal radius wobbles per row.
inline void blob(Raster& img, Prng& rng, double cx, double cy, double rx, double ry, Rgba color, double wobble)
{
  for (int y = 0; y < img.height(); ++y) {
    const double dy = (y + 0.5 - cy) / ry;
    if (dy * dy >= 1.0)
      continue;
    const double half = rx * std::sqrt(1.0 - dy * dy) * (1.0 + wobble * (unit(rng) - 0.5));
    const double jitter = 0.85 + 0.3 * unit(rng);
    for (int x = 0; x < img.width(); ++x)
      if (std::abs(x + 0.5 - cx) < half)
        img(x, y) = shade(color, jitter * (1.1 - 0.4 * (y + 0.5 - (cy - ry)) / (2 * ry)));
  }
}

}  // namespace detail

// Deterministic 128x128 stand-in art. Floor blocks carry a 128x64 diamond
// top face sitting in the lower half of the sprite; overlays stand on the
// centre of that face.
inline Sprite synth_sprite(SpriteKind kind, PrngState state)
{
  Prng rng(state);
  Raster img(kSpriteSize, kSpriteSize, Rgba{0, 0, 0, 0});
  switch (kind) {
    case SpriteKind::FloorBlock: {
      const Rgba base{static_cast<std::uint8_t>(70 + rng.below(60)), static_cast<std::uint8_t>(110 + rng.below(80)),
                      static_cast<std::uint8_t>(40 + rng.below(40)), 255};
      constexpr double cx = 63.5, cy = 87.5, hw = 64.0, hh = 32.0, side = 8.0;
      for (int y = 0; y < kSpriteSize; ++y)
        for (int x = 0; x < kSpriteSize; ++x) {
          const double ax = std::abs(x - cx) / hw;
          const double dy = y - cy;
          const double lower = hh * (1.0 - ax);
          if (ax + std::abs(dy) / hh <= 1.0) {
            img(x, y) = detail::shade(base, 0.9 + 0.2 * detail::unit(rng));
          } else if (dy > lower && dy <= lower + side) {
            img(x, y) = detail::shade(base, x < cx ? 0.65 : 0.45);
          }
        }
      break;
    }
    case SpriteKind::Bush: {
      const Rgba leaf{static_cast<std::uint8_t>(30 + rng.below(30)), static_cast<std::uint8_t>(120 + rng.below(60)),
                      static_cast<std::uint8_t>(30 + rng.below(30)), 255};
      detail::blob(img, rng, 64.0, 76.0, 26.0 + rng.below(8), 16.0 + rng.below(4), leaf, 0.15);
      break;
    }
    case SpriteKind::Tree: {
      const Rgba bark{110, 72, 40, 255};
      for (int y = 40; y < 92; ++y)
        for (int x = 59; x < 69; ++x)
          img(x, y) = detail::shade(bark, x < 64 ? 1.0 : 0.75);
      const Rgba leaf{static_cast<std::uint8_t>(20 + rng.below(30)), static_cast<std::uint8_t>(90 + rng.below(50)),
                      static_cast<std::uint8_t>(30 + rng.below(30)), 255};
      detail::blob(img, rng, 64.0, 34.0, 30.0 + rng.below(8), 28.0 + rng.below(6), leaf, 0.2);
      break;
    }
    case SpriteKind::Character: {
      const Rgba cloth{static_cast<std::uint8_t>(120 + rng.below(120)), static_cast<std::uint8_t>(40 + rng.below(60)),
                       static_cast<std::uint8_t>(60 + rng.below(120)), 255};
      detail::blob(img, rng, 64.0, 72.0, 10.0, 20.0, cloth, 0.0);
      detail::blob(img, rng, 64.0, 44.0, 9.0, 9.0, Rgba{230, 190, 150, 255}, 0.0);
      break;
    }
  }
  return Sprite(std::move(img));
}

// Atlas ---------------------------------------------------------------------

class UnknownSpriteError : public std::out_of_range {
public:
  explicit UnknownSpriteError(const std::string& id) : std::out_of_range("unknown sprite id '" + id + "'") {}
};

struct AtlasEntry {
  Sprite sprite;
  OpacityMap opacity;
  std::string kind;
  bool occluding = true;  // false for sprites tagged "non-occluding"
};

class Atlas {
public:
  void add(std::string id, Sprite sprite, std::string kind, bool occluding, std::uint8_t alpha_threshold = 0)
  {
    OpacityMap mask = extract_opacity_map(sprite, alpha_threshold);
    entries_.insert_or_assign(std::move(id),
                              AtlasEntry{std::move(sprite), std::move(mask), std::move(kind), occluding});
  }

  const AtlasEntry& at(const std::string& id) const
  {
    auto it = entries_.find(id);
    if (it == entries_.end())
      throw UnknownSpriteError(id);
    return it->second;
  }

  bool contains(const std::string& id) const { return entries_.count(id) != 0; }
  const std::map<std::string, AtlasEntry>& entries() const { return entries_; }

private:
  std::map<std::string, AtlasEntry> entries_;
};

// Reads `<dir>/<kind>/<name>.png`. An optional `<dir>/manifest.json` maps
// names to `{"ax": int, "ay": int, "tags": ["non-occluding"]}`.
inline Atlas load_atlas(const std::filesystem::path& dir, std::uint8_t alpha_threshold = 0)
{
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir))
    throw std::runtime_error("atlas directory not found: '" + dir.string() + "'");

  nlohmann::json manifest = nlohmann::json::object();
  if (fs::exists(dir / "manifest.json")) {
    std::ifstream in(dir / "manifest.json");
    manifest = nlohmann::json::parse(in);
  }

  std::vector<fs::path> files;
  for (const auto& kind_dir : fs::directory_iterator(dir))
    if (kind_dir.is_directory())
      for (const auto& f : fs::directory_iterator(kind_dir.path()))
        if (f.is_regular_file() && f.path().extension() == ".png")
          files.push_back(f.path());
  std::sort(files.begin(), files.end());

  Atlas atlas;
  for (const auto& file : files) {
    const std::string name = file.stem().string();
    const std::string kind = file.parent_path().filename().string();
    Raster img = read_png(file);
    Point anchor{};
    bool occluding = true;
    if (auto it = manifest.find(name); it != manifest.end()) {
      anchor = {it->value("ax", 0), it->value("ay", 0)};
      for (const auto& tag : it->value("tags", std::vector<std::string>{}))
        if (tag == "non-occluding")
          occluding = false;
    }
    atlas.add(name, Sprite(std::move(img), anchor), kind, occluding, alpha_threshold);
  }
  return atlas;
}

// The built-in atlas used when no art directory is supplied. Ground blocks
// are non-occluding so open floor never halts light; characters carry the
// lights and are non-occluding as well.
inline Atlas default_atlas()
{
  Atlas atlas;
  atlas.add("grass", synth_sprite(SpriteKind::FloorBlock, hash_seed("grass")), "floor-block", false);
  atlas.add("dirt", synth_sprite(SpriteKind::FloorBlock, hash_seed("dirt")), "floor-block", false);
  atlas.add("bush", synth_sprite(SpriteKind::Bush, hash_seed("bush")), "bush", true);
  atlas.add("shrub", synth_sprite(SpriteKind::Bush, hash_seed("shrub")), "bush", true);
  atlas.add("tree", synth_sprite(SpriteKind::Tree, hash_seed("tree")), "tree", true);
  atlas.add("character", synth_sprite(SpriteKind::Character, hash_seed("character")), "character", false);
  return atlas;
}

inline Palette default_palette()
{
  Palette p;
  p.blocks = {{"grass", 3}, {"dirt", 1}};
  p.overlays = {{"bush", 3}, {"shrub", 2}, {"tree", 2}};
  p.slot_probability = {0.3, 0.05, 0.0};
  return p;
}

}  // namespace isolume
