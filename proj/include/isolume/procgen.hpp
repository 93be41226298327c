#pragma once

// Seeded, platform-independent map generation. All randomness flows from a
// string seed through FNV-1a and xorshift64*; weighted choices use 64-bit
// fixed-point thresholds so no floating point touches a draw.

#include <nlohmann/json.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace isolume {

struct PrngState {
  std::uint64_t state = 0;

  friend constexpr bool operator==(PrngState, PrngState) = default;
};

inline constexpr std::uint64_t kFnvOffsetBasis = 14695981039346656037ULL;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

// FNV-1a over the seed bytes. A zero hash would be a fixed point of the
// generator, so it is remapped to the offset basis.
constexpr PrngState hash_seed(std::string_view seed)
{
  std::uint64_t h = kFnvOffsetBasis;
  for (char c : seed) {
    h ^= static_cast<std::uint8_t>(c);
    h *= kFnvPrime;
  }
  return {h == 0 ? kFnvOffsetBasis : h};
}

struct Draw {
  PrngState next;
  std::uint64_t value;
};

// One xorshift64* step.
constexpr Draw next_random(PrngState s)
{
  std::uint64_t x = s.state;
  x ^= x >> 12;
  x ^= x << 25;
  x ^= x >> 27;
  return {{x}, x * 2685821657736338717ULL};
}

// Convenience wrapper for call sites that just want a stream of values.
class Prng {
public:
  explicit Prng(PrngState s) : state_(s) {}
  explicit Prng(std::string_view seed) : state_(hash_seed(seed)) {}

  std::uint64_t next()
  {
    auto d = next_random(state_);
    state_ = d.next;
    return d.value;
  }

  // Uniform integer in [0, bound) via 128-bit multiply-high.
  std::uint32_t below(std::uint32_t bound)
  {
    return static_cast<std::uint32_t>((static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  PrngState state() const { return state_; }

private:
  PrngState state_;
};

class PaletteError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct WeightedId {
  std::string id;
  std::uint32_t weight = 0;
};

// Block/overlay weight table. slot_probability[k] is the chance that overlay
// slot k of a cell is filled.
struct Palette {
  std::vector<WeightedId> blocks;
  std::vector<WeightedId> overlays;
  std::array<double, 3> slot_probability{0.0, 0.0, 0.0};

  void validate() const
  {
    if (blocks.empty())
      throw PaletteError("palette has no blocks");
    std::uint64_t total = 0;
    for (const auto& b : blocks)
      total += b.weight;
    if (total == 0)
      throw PaletteError("palette block weights are all zero");
    std::uint64_t overlay_total = 0;
    for (const auto& o : overlays)
      overlay_total += o.weight;
    for (double p : slot_probability) {
      if (!(p >= 0.0 && p <= 1.0))
        throw PaletteError("overlay slot probability must lie in [0, 1]");
      if (p > 0.0 && overlay_total == 0)
        throw PaletteError("overlay slots can fill but no overlay has positive weight");
    }
  }
};

inline void to_json(nlohmann::json& j, const WeightedId& w) { j = {{"id", w.id}, {"weight", w.weight}}; }
inline void from_json(const nlohmann::json& j, WeightedId& w)
{
  j.at("id").get_to(w.id);
  j.at("weight").get_to(w.weight);
}

inline void to_json(nlohmann::json& j, const Palette& p)
{
  j = {{"blocks", p.blocks}, {"overlays", p.overlays}, {"slot_probability", p.slot_probability}};
}
inline void from_json(const nlohmann::json& j, Palette& p)
{
  j.at("blocks").get_to(p.blocks);
  if (j.contains("overlays"))
    j.at("overlays").get_to(p.overlays);
  if (j.contains("slot_probability"))
    j.at("slot_probability").get_to(p.slot_probability);
}

inline Palette parse_palette(const std::string& text)
{
  try {
    auto p = nlohmann::json::parse(text).get<Palette>();
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw PaletteError(std::string("bad palette: ") + e.what());
  }
}

struct CellSpec {
  std::string block;
  std::vector<std::string> overlays;  // at most 3

  friend bool operator==(const CellSpec&, const CellSpec&) = default;
};

struct SceneMap {
  std::string seed;
  int rows = 0;
  int cols = 0;
  std::vector<CellSpec> cells;  // row-major

  const CellSpec& at(int row, int col) const { return cells.at(static_cast<std::size_t>(row) * cols + col); }

  friend bool operator==(const SceneMap&, const SceneMap&) = default;
};

inline void to_json(nlohmann::json& j, const SceneMap& m)
{
  auto grid = nlohmann::json::array();
  for (int r = 0; r < m.rows; ++r) {
    auto row = nlohmann::json::array();
    for (int c = 0; c < m.cols; ++c) {
      const auto& cell = m.at(r, c);
      row.push_back({{"b", cell.block}, {"o", cell.overlays}});
    }
    grid.push_back(std::move(row));
  }
  j = {{"seed", m.seed}, {"rows", m.rows}, {"cols", m.cols}, {"cells", std::move(grid)}};
}

inline void from_json(const nlohmann::json& j, SceneMap& m)
{
  j.at("seed").get_to(m.seed);
  j.at("rows").get_to(m.rows);
  j.at("cols").get_to(m.cols);
  const auto& grid = j.at("cells");
  if (m.rows < 1 || m.cols < 1 || grid.size() != static_cast<std::size_t>(m.rows))
    throw std::invalid_argument("scene map: cell grid does not match rows/cols");
  m.cells.clear();
  for (const auto& row : grid) {
    if (row.size() != static_cast<std::size_t>(m.cols))
      throw std::invalid_argument("scene map: ragged cell row");
    for (const auto& cell : row) {
      CellSpec spec;
      cell.at("b").get_to(spec.block);
      cell.at("o").get_to(spec.overlays);
      if (spec.overlays.size() > 3)
        throw std::invalid_argument("scene map: more than 3 overlays in a cell");
      m.cells.push_back(std::move(spec));
    }
  }
}

namespace detail {

using u128 = unsigned __int128;
inline constexpr u128 kTwo64 = u128{1} << 64;

// Maps `value` (uniform over [0, span)) onto the cumulative weight intervals.
// Interval k covers [span*C(k-1)/T, span*C(k)/T); zero weights get empty
// intervals and are never chosen.
inline std::size_t weighted_index(const std::vector<WeightedId>& items, u128 value, u128 span)
{
  std::uint64_t total = 0;
  for (const auto& it : items)
    total += it.weight;
  std::uint64_t cumulative = 0;
  for (std::size_t k = 0; k < items.size(); ++k) {
    cumulative += items[k].weight;
    if (items[k].weight == 0)
      continue;
    // span <= 2^64 and cumulative <= 2^32 * count, so this fits in 128 bits.
    const u128 threshold = span * cumulative / total;
    if (value < threshold)
      return k;
  }
  // Unreachable: the final positive-weight threshold equals span.
  throw std::logic_error("weighted_index: value out of range");
}

inline u128 probability_threshold(double p)
{
  // p * 2^64 is exact in binary floating point; flooring it is portable.
  if (p >= 1.0)
    return kTwo64;
  return static_cast<u128>(std::ldexp(p, 64));
}

}  // namespace detail

// Each cell consumes exactly four draws in row-major order: one for the
// block, one per overlay slot. A slot draw below the slot threshold fills the
// slot and, rescaled onto that sub-interval, also selects the overlay.
// Consequently the first k cells in row-major order depend only on the seed
// and palette, never on rows/cols.
inline SceneMap generate_map(std::string_view seed, int rows, int cols, const Palette& palette)
{
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("map dimensions must be at least 1x1");
  palette.validate();

  std::array<detail::u128, 3> slot_threshold{};
  for (std::size_t k = 0; k < 3; ++k)
    slot_threshold[k] = detail::probability_threshold(palette.slot_probability[k]);

  SceneMap map{std::string(seed), rows, cols, {}};
  map.cells.reserve(static_cast<std::size_t>(rows) * cols);

  Prng rng(seed);
  for (int i = 0; i < rows * cols; ++i) {
    CellSpec cell;
    cell.block = palette.blocks[detail::weighted_index(palette.blocks, rng.next(), detail::kTwo64)].id;
    for (std::size_t k = 0; k < 3; ++k) {
      const detail::u128 v = rng.next();
      if (v < slot_threshold[k])
        cell.overlays.push_back(palette.overlays[detail::weighted_index(palette.overlays, v, slot_threshold[k])].id);
    }
    map.cells.push_back(std::move(cell));
  }
  return map;
}

}  // namespace isolume
