#pragma once

// Small value types shared by every stage of the pipeline: integer points,
// dense row-major grids and the RGBA raster.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace isolume {

struct Point {
  int x = 0;
  int y = 0;

  friend constexpr bool operator==(Point, Point) = default;
  friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point operator-(Point a) { return {-a.x, -a.y}; }
};

struct Size {
  int width = 0;
  int height = 0;

  friend constexpr bool operator==(Size, Size) = default;
};

// Dense row-major 2D array. Dimensions must be positive.
template <class T>
class Grid {
public:
  using value_type = T;

  Grid() = default;
  Grid(int width, int height, T fill = T{}) : width_(width), height_(height)
  {
    if (width <= 0 || height <= 0)
      throw std::invalid_argument("grid dimensions must be positive, got " + std::to_string(width) + "x" +
                                  std::to_string(height));
    cells_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }
  explicit Grid(Size s, T fill = T{}) : Grid(s.width, s.height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  Size size() const { return {width_, height_}; }
  bool empty() const { return cells_.empty(); }

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  bool contains(Point p) const { return contains(p.x, p.y); }

  T& operator()(int x, int y) { return cells_[index(x, y)]; }
  const T& operator()(int x, int y) const { return cells_[index(x, y)]; }
  T& operator[](Point p) { return (*this)(p.x, p.y); }
  const T& operator[](Point p) const { return (*this)(p.x, p.y); }

  std::vector<T>& data() { return cells_; }
  const std::vector<T>& data() const { return cells_; }

  T* row(int y) { return cells_.data() + static_cast<std::size_t>(y) * width_; }
  const T* row(int y) const { return cells_.data() + static_cast<std::size_t>(y) * width_; }

  void fill(T v) { std::fill(cells_.begin(), cells_.end(), v); }

  friend bool operator==(const Grid&, const Grid&) = default;

private:
  std::size_t index(int x, int y) const
  {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> cells_;
};

// Boolean grid tagged by role so an opacity map cannot be passed where an
// obstacle map is expected. Cells are stored as bytes (0/1).
template <class Tag>
class BitGrid {
public:
  BitGrid() = default;
  BitGrid(int width, int height) : grid_(width, height, 0) {}
  explicit BitGrid(Size s) : grid_(s, 0) {}

  int width() const { return grid_.width(); }
  int height() const { return grid_.height(); }
  Size size() const { return grid_.size(); }
  bool contains(int x, int y) const { return grid_.contains(x, y); }

  bool get(int x, int y) const { return grid_(x, y) != 0; }
  bool operator()(int x, int y) const { return get(x, y); }
  void set(int x, int y, bool v = true) { grid_(x, y) = v ? 1 : 0; }

  // Out-of-range writes are dropped.
  void set_clipped(int x, int y)
  {
    if (grid_.contains(x, y))
      grid_(x, y) = 1;
  }

  std::size_t count() const
  {
    return static_cast<std::size_t>(std::count(grid_.data().begin(), grid_.data().end(), std::uint8_t{1}));
  }

  const std::uint8_t* row(int y) const { return grid_.row(y); }

  friend bool operator==(const BitGrid&, const BitGrid&) = default;

private:
  Grid<std::uint8_t> grid_;
};

struct Rgba {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  std::uint8_t a = 0;

  friend constexpr bool operator==(Rgba, Rgba) = default;
};

// 8-bit RGBA image, row-major. Never empty.
class Raster {
public:
  Raster(int width, int height, Rgba fill = {}) : pixels_(width, height, fill) {}
  explicit Raster(Size s, Rgba fill = {}) : pixels_(s, fill) {}

  int width() const { return pixels_.width(); }
  int height() const { return pixels_.height(); }
  Size size() const { return pixels_.size(); }
  bool contains(int x, int y) const { return pixels_.contains(x, y); }

  Rgba& operator()(int x, int y) { return pixels_(x, y); }
  const Rgba& operator()(int x, int y) const { return pixels_(x, y); }

  const std::vector<Rgba>& pixels() const { return pixels_.data(); }
  std::vector<Rgba>& pixels() { return pixels_.data(); }
  Rgba* row(int y) { return pixels_.row(y); }
  const Rgba* row(int y) const { return pixels_.row(y); }

  friend bool operator==(const Raster&, const Raster&) = default;

private:
  Grid<Rgba> pixels_;
};

static_assert(sizeof(Rgba) == 4, "Rgba must be tightly packed for PNG I/O");

}  // namespace isolume
