#include "rownav/image.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace rownav {

RgbImage::RgbImage(int w, int h, Rgb fill) : width(w), height(h), pixels(3 * static_cast<std::size_t>(w) * h) {
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = fill.r;
    pixels[i + 1] = fill.g;
    pixels[i + 2] = fill.b;
  }
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

void write_ppm(std::ostream& out, const RgbImage& img) {
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
}

void write_pbm(std::ostream& out, const BinaryMask& mask) {
  out << "P4\n" << mask.width << ' ' << mask.height << '\n';
  const int row_bytes = (mask.width + 7) / 8;
  std::vector<char> row(static_cast<std::size_t>(row_bytes));
  for (int v = 0; v < mask.height; ++v) {
    std::fill(row.begin(), row.end(), 0);
    for (int u = 0; u < mask.width; ++u) {
      if (mask.at(u, v)) row[static_cast<std::size_t>(u / 8)] |= static_cast<char>(0x80 >> (u % 8));
    }
    out.write(row.data(), row_bytes);
  }
}

namespace {
template <typename T, typename Writer>
void write_file(const std::string& path, const T& data, Writer w) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  w(f, data);
  if (!f) throw std::runtime_error("failed writing " + path);
}
}  // namespace

void write_ppm(const std::string& path, const RgbImage& img) {
  write_file(path, img, [](std::ostream& o, const RgbImage& i) { write_ppm(o, i); });
}

void write_pbm(const std::string& path, const BinaryMask& mask) {
  write_file(path, mask, [](std::ostream& o, const BinaryMask& m) { write_pbm(o, m); });
}

}  // namespace rownav
