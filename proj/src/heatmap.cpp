#include "oss/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "oss/constants.hpp"
#include "oss/errors.hpp"

namespace oss {
namespace {

struct Rgb {
    unsigned char r, g, b;
};

// compact viridis-like ramp, linearly interpolated
constexpr Rgb kRamp[] = {
    {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37},
};

Rgb ramp(double t) {
    t = std::clamp(t, 0.0, 1.0);
    const double scaled = t * 4.0;
    const int i = std::min(3, static_cast<int>(scaled));
    const double f = scaled - i;
    const Rgb a = kRamp[i];
    const Rgb b = kRamp[i + 1];
    return {static_cast<unsigned char>(a.r + f * (b.r - a.r)),
            static_cast<unsigned char>(a.g + f * (b.g - a.g)),
            static_cast<unsigned char>(a.b + f * (b.b - a.b))};
}

}  // namespace

void write_heatmap_ppm(const std::vector<double>& values_dbm, std::size_t nx, std::size_t ny,
                       const std::string& path, int pixel_scale) {
    if (values_dbm.size() != nx * ny || nx == 0 || ny == 0) {
        throw ValidationError("heatmap dimensions do not match value count");
    }
    double lo = 1e300, hi = -1e300;
    for (double v : values_dbm) {
        if (v <= constants::power_floor_dbm) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi <= lo) {
        lo = constants::power_floor_dbm;
        hi = lo + 1.0;
    }
    const std::size_t w = nx * static_cast<std::size_t>(pixel_scale);
    const std::size_t h = ny * static_cast<std::size_t>(pixel_scale);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write heatmap: " + path);
    out << "P6\n" << w << " " << h << "\n255\n";
    for (std::size_t py = 0; py < h; ++py) {
        const std::size_t gy = ny - 1 - py / static_cast<std::size_t>(pixel_scale);  // y up
        for (std::size_t px = 0; px < w; ++px) {
            const std::size_t gx = px / static_cast<std::size_t>(pixel_scale);
            const double v = values_dbm[gy * nx + gx];
            Rgb c{0, 0, 0};
            if (v > constants::power_floor_dbm) c = ramp((v - lo) / (hi - lo));
            out.put(static_cast<char>(c.r));
            out.put(static_cast<char>(c.g));
            out.put(static_cast<char>(c.b));
        }
    }
}

}  // namespace oss
