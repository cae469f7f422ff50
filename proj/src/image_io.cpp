#include "maeb/image.hpp"

#include <bit>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace maeb {

namespace {

void put_u32_be(std::string& out, std::uint32_t v)
{
  out.push_back(static_cast<char>((v >> 24) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>(v & 0xff));
}

std::uint32_t get_u32_be(const std::string& in, std::size_t pos)
{
  auto b = [&](std::size_t i) { return static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])); };
  return (b(0) << 24) | (b(1) << 16) | (b(2) << 8) | b(3);
}

struct PgmHeader {
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::size_t data_offset = 0;
};

PgmHeader parse_pgm_header(const std::string& bytes)
{
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') {
          ++pos;
        }
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&] {
    skip_space();
    int v = 0;
    bool any = false;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      v = v * 10 + (bytes[pos] - '0');
      ++pos;
      any = true;
    }
    if (!any) {
      throw std::runtime_error("malformed PGM header");
    }
    return v;
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw std::runtime_error("not a binary PGM (P5) file");
  }
  pos = 2;
  PgmHeader h;
  h.width = read_int();
  h.height = read_int();
  h.maxval = read_int();
  ++pos;  // single whitespace before the raster
  h.data_offset = pos;
  return h;
}

}  // namespace

std::string encode_pgm(const Image& img)
{
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
  return out;
}

void write_pgm(const std::string& path, const Image& img)
{
  write_file_atomic(path, encode_pgm(img));
}

Image read_pgm(const std::string& path)
{
  const std::string bytes = read_file(path);
  const PgmHeader h = parse_pgm_header(bytes);
  if (h.maxval != 255) {
    throw std::runtime_error("expected an 8-bit PGM");
  }
  Image img(h.width, h.height);
  if (bytes.size() < h.data_offset + img.pixels.size()) {
    throw std::runtime_error("truncated PGM raster");
  }
  std::memcpy(img.pixels.data(), bytes.data() + h.data_offset, img.pixels.size());
  return img;
}

void write_pgm16(const std::string& path, int width, int height, const std::vector<std::uint16_t>& values)
{
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n65535\n";
  out.reserve(out.size() + values.size() * 2);
  for (std::uint16_t v : values) {
    out.push_back(static_cast<char>(v >> 8));
    out.push_back(static_cast<char>(v & 0xff));
  }
  write_file_atomic(path, out);
}

std::vector<std::uint16_t> read_pgm16(const std::string& path, int& width, int& height)
{
  const std::string bytes = read_file(path);
  const PgmHeader h = parse_pgm_header(bytes);
  if (h.maxval != 65535) {
    throw std::runtime_error("expected a 16-bit PGM");
  }
  width = h.width;
  height = h.height;
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() < h.data_offset + 2 * n) {
    throw std::runtime_error("truncated PGM raster");
  }
  std::vector<std::uint16_t> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto hi = static_cast<unsigned char>(bytes[h.data_offset + 2 * i]);
    const auto lo = static_cast<unsigned char>(bytes[h.data_offset + 2 * i + 1]);
    values[i] = static_cast<std::uint16_t>((hi << 8) | lo);
  }
  return values;
}

std::string encode_depth(const DepthMap& d)
{
  std::string out = "MAEBDPTH";
  put_u32_be(out, static_cast<std::uint32_t>(d.width));
  put_u32_be(out, static_cast<std::uint32_t>(d.height));
  out.reserve(out.size() + d.depth.size() * 4);
  for (float f : d.depth) {
    put_u32_be(out, std::bit_cast<std::uint32_t>(f));
  }
  return out;
}

DepthMap decode_depth(const std::string& bytes)
{
  if (bytes.size() < 16 || bytes.compare(0, 8, "MAEBDPTH") != 0) {
    throw std::runtime_error("not a MAEBDPTH depth raster");
  }
  DepthMap d(static_cast<int>(get_u32_be(bytes, 8)), static_cast<int>(get_u32_be(bytes, 12)));
  if (bytes.size() < 16 + d.depth.size() * 4) {
    throw std::runtime_error("truncated depth raster");
  }
  for (std::size_t i = 0; i < d.depth.size(); ++i) {
    d.depth[i] = std::bit_cast<float>(get_u32_be(bytes, 16 + 4 * i));
  }
  return d;
}

void write_depth(const std::string& path, const DepthMap& d)
{
  write_file_atomic(path, encode_depth(d));
}

DepthMap read_depth(const std::string& path)
{
  return decode_depth(read_file(path));
}

void write_file_atomic(const std::string& path, const std::string& bytes)
{
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot write '" + tmp + "'");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      throw std::runtime_error("write failed for '" + tmp + "'");
    }
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace maeb
