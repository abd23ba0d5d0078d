#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace rlf::noi {

// 8-bit RGBA, row-major, no padding.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgba;

  std::uint8_t* pixel(int x, int y) { return &rgba[(static_cast<std::size_t>(y) * width + x) * 4]; }
  const std::uint8_t* pixel(int x, int y) const {
    return &rgba[(static_cast<std::size_t>(y) * width + x) * 4];
  }

  bool operator==(const Raster&) const = default;
};

Raster make_raster(int width, int height, std::uint32_t rgba = 0xffffffffu);

// PNG of any colour type is expanded to RGBA8. Throws rlf::Error(kIo).
Raster read_png(const std::filesystem::path& path);
void write_png(const Raster& raster, const std::filesystem::path& path);

}  // namespace rlf::noi
