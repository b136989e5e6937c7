#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rownav {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// 8-bit RGB image, row-major, 3 bytes per pixel.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  RgbImage() = default;
  RgbImage(int w, int h, Rgb fill = {});

  Rgb at(int u, int v) const {
    const std::size_t i = 3 * (static_cast<std::size_t>(v) * width + u);
    return {pixels[i], pixels[i + 1], pixels[i + 2]};
  }
  void set(int u, int v, Rgb c) {
    const std::size_t i = 3 * (static_cast<std::size_t>(v) * width + u);
    pixels[i] = c.r;
    pixels[i + 1] = c.g;
    pixels[i + 2] = c.b;
  }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

/// Row-major boolean mask, one byte per pixel (0 or 1).
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  BinaryMask() = default;
  BinaryMask(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

  bool at(int u, int v) const { return bits[static_cast<std::size_t>(v) * width + u] != 0; }
  void set(int u, int v, bool on = true) { bits[static_cast<std::size_t>(v) * width + u] = on ? 1 : 0; }
  std::size_t count() const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

/// Binary PPM (P6), maxval 255.
void write_ppm(std::ostream& out, const RgbImage& img);
void write_ppm(const std::string& path, const RgbImage& img);
/// Binary PBM (P4); set bits are written as 1 (black).
void write_pbm(std::ostream& out, const BinaryMask& mask);
void write_pbm(const std::string& path, const BinaryMask& mask);

}  // namespace rownav
