#ifndef LOCPIPE_UTIL_PGM_H_
#define LOCPIPE_UTIL_PGM_H_

#include <cstdint>
#include <filesystem>
#include <vector>

namespace locpipe {

// Single-channel raster as stored in binary PGM (P5). 8-bit files have
// maxval <= 255, 16-bit files maxval <= 65535 (big-endian samples on disk).
struct GrayRaster {
  int width = 0;
  int height = 0;
  int maxval = 255;
  std::vector<std::uint16_t> pixels;  // row-major

  std::uint16_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
};

GrayRaster ReadPgm(const std::filesystem::path& path);
void WritePgm(const std::filesystem::path& path, const GrayRaster& raster);

}  // namespace locpipe

#endif  // LOCPIPE_UTIL_PGM_H_
