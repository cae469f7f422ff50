#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace maeb {

// 8-bit grayscale raster, row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(int w, int h, std::uint8_t fill = 0)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill)
  {
  }

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  friend bool operator==(const Image&, const Image&) = default;
};

// Per-pixel depth along the optical axis in metres; +inf where no surface.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<float> depth;

  DepthMap() = default;
  DepthMap(int w, int h)
    : width(w), height(h),
      depth(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), std::numeric_limits<float>::infinity())
  {
  }
  float at(int x, int y) const { return depth[static_cast<std::size_t>(y) * width + x]; }
  float& at(int x, int y) { return depth[static_cast<std::size_t>(y) * width + x]; }
};

// Binary PGM, P5 with maxval 255.
void write_pgm(const std::string& path, const Image& img);
Image read_pgm(const std::string& path);
std::string encode_pgm(const Image& img);

// Binary PGM, P5 with maxval 65535 (big-endian samples).
void write_pgm16(const std::string& path, int width, int height, const std::vector<std::uint16_t>& values);
std::vector<std::uint16_t> read_pgm16(const std::string& path, int& width, int& height);

// "MAEBDPTH" magic, big-endian u32 width and height, then big-endian
// IEEE-754 float32 depths row by row.
std::string encode_depth(const DepthMap& d);
DepthMap decode_depth(const std::string& bytes);
void write_depth(const std::string& path, const DepthMap& d);
DepthMap read_depth(const std::string& path);

// Writes bytes to path via a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);

}  // namespace maeb
