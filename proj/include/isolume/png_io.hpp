#pragma once

// Lossless PNG read/write on top of libpng's simplified API. Encoder
// settings are fixed, so writing the same raster twice yields identical
// bytes.

#include "isolume/grid.hpp"

#include <png.h>

#include <cstring>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace isolume {

class PngError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

struct PngImage {
  png_image image;
  PngImage()
  {
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

inline void write_image(png_image& img, const std::filesystem::path& path, const void* buffer)
{
  if (!png_image_write_to_file(&img, path.string().c_str(), 0, buffer, 0, nullptr))
    throw PngError("cannot write PNG '" + path.string() + "': " + img.message);
}

}  // namespace detail

// Decodes any PNG to 8-bit RGBA. Inputs without alpha come back opaque.
inline Raster read_png(const std::filesystem::path& path)
{
  if (!std::filesystem::is_regular_file(path))
    throw PngError("no such PNG file: '" + path.string() + "'");

  detail::PngImage png;
  if (!png_image_begin_read_from_file(&png.image, path.string().c_str()))
    throw PngError("malformed PNG '" + path.string() + "': " + png.image.message);
  if (png.image.width == 0 || png.image.height == 0)
    throw PngError("zero-dimension PNG '" + path.string() + "'");

  png.image.format = PNG_FORMAT_RGBA;
  Raster out(static_cast<int>(png.image.width), static_cast<int>(png.image.height));
  if (!png_image_finish_read(&png.image, nullptr, out.pixels().data(), 0, nullptr))
    throw PngError("malformed PNG '" + path.string() + "': " + png.image.message);
  return out;
}

inline void write_png(const Raster& raster, const std::filesystem::path& path)
{
  detail::PngImage png;
  png.image.width = static_cast<png_uint_32>(raster.width());
  png.image.height = static_cast<png_uint_32>(raster.height());
  png.image.format = PNG_FORMAT_RGBA;
  detail::write_image(png.image, path, raster.pixels().data());
}

// Single-channel 8-bit grayscale output, used for texture dumps.
inline void write_gray_png(const Grid<std::uint8_t>& gray, const std::filesystem::path& path)
{
  detail::PngImage png;
  png.image.width = static_cast<png_uint_32>(gray.width());
  png.image.height = static_cast<png_uint_32>(gray.height());
  png.image.format = PNG_FORMAT_GRAY;
  detail::write_image(png.image, path, gray.data().data());
}

}  // namespace isolume
