#include "locpipe/util/raster.h"

#include <algorithm>
#include <cmath>

namespace locpipe {

Raster ToRaster(const GrayRaster& gray, double scale) {
  Raster out(gray.height, gray.width);
  for (int y = 0; y < gray.height; ++y) {
    for (int x = 0; x < gray.width; ++x) out(y, x) = gray.at(x, y) * scale;
  }
  return out;
}

GrayRaster ToGray(const Raster& raster, double scale, int maxval) {
  GrayRaster out;
  out.width = static_cast<int>(raster.cols());
  out.height = static_cast<int>(raster.rows());
  out.maxval = maxval;
  out.pixels.resize(static_cast<std::size_t>(raster.size()));
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      const double v = std::round(raster(y, x) / scale);
      out.pixels[static_cast<std::size_t>(y) * out.width + x] =
          static_cast<std::uint16_t>(std::clamp(std::isfinite(v) ? v : 0.0, 0.0, double(maxval)));
    }
  }
  return out;
}

}  // namespace locpipe
