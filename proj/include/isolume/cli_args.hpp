#pragma once

// Parsers for the compact textual flags used by the command-line tool:
// "WxH" sizes, "X,Y" points and "x,y,a,b;x2,y2,a2,b2" light lists.

#include "isolume/grid.hpp"
#include "isolume/lighting.hpp"

#include <charconv>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace isolume {

// Bad command-line input; the tool maps it to exit code 2.
class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos)
      return out;
    start = pos + 1;
  }
}

inline int parse_int(std::string_view s, std::string_view what)
{
  while (!s.empty() && s.front() == ' ')
    s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ')
    s.remove_suffix(1);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw UsageError("invalid integer '" + std::string(s) + "' in " + std::string(what));
  return v;
}

}  // namespace detail

// "WxH" with both parts >= 1.
inline Size parse_size(std::string_view s)
{
  const auto parts = detail::split(s, 'x');
  if (parts.size() != 2)
    throw UsageError("expected WxH, got '" + std::string(s) + "'");
  const Size out{detail::parse_int(parts[0], "size"), detail::parse_int(parts[1], "size")};
  if (out.width < 1 || out.height < 1)
    throw UsageError("size components must be at least 1, got '" + std::string(s) + "'");
  return out;
}

inline Point parse_point(std::string_view s)
{
  const auto parts = detail::split(s, ',');
  if (parts.size() != 2)
    throw UsageError("expected X,Y, got '" + std::string(s) + "'");
  return {detail::parse_int(parts[0], "point"), detail::parse_int(parts[1], "point")};
}

// Each light is "x,y" (default extents) or "x,y,a,b".
inline std::vector<LightSource> parse_lights(std::string_view s, int default_a = 256, int default_b = 256)
{
  std::vector<LightSource> out;
  if (s.empty())
    return out;
  for (auto item : detail::split(s, ';')) {
    if (item.empty())
      continue;
    const auto f = detail::split(item, ',');
    if (f.size() != 2 && f.size() != 4)
      throw UsageError("light must be x,y or x,y,a,b: '" + std::string(item) + "'");
    LightSource l{{detail::parse_int(f[0], "light"), detail::parse_int(f[1], "light")}, default_a, default_b, true};
    if (f.size() == 4) {
      l.a = detail::parse_int(f[2], "light");
      l.b = detail::parse_int(f[3], "light");
    }
    if (l.a < 1 || l.b < 1)
      throw UsageError("light half-extents must be at least 1: '" + std::string(item) + "'");
    out.push_back(l);
  }
  return out;
}

}  // namespace isolume
