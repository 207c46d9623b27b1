#pragma once

#include <string>
#include <vector>

namespace oss {

/// Renders a row-major ny x nx grid of dBm values to a binary PPM image with
/// a fixed perceptual color ramp. Values at or below floor_dbm render black.
void write_heatmap_ppm(const std::vector<double>& values_dbm, std::size_t nx, std::size_t ny,
                       const std::string& path, int pixel_scale = 8);

}  // namespace oss
