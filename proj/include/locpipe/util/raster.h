#ifndef LOCPIPE_UTIL_RASTER_H_
#define LOCPIPE_UTIL_RASTER_H_

#include <Eigen/Core>

#include "locpipe/util/pgm.h"

namespace locpipe {

// Dense single-channel image, indexed (row = y, col = x).
using Raster = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using BoolRaster = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Sample values multiplied by `scale`.
Raster ToRaster(const GrayRaster& gray, double scale);

// Values divided by `scale`, rounded and clamped to [0, maxval].
GrayRaster ToGray(const Raster& raster, double scale, int maxval);

}  // namespace locpipe

#endif  // LOCPIPE_UTIL_RASTER_H_
