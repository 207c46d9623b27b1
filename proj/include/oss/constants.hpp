#pragma once

#include <cmath>

namespace oss::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// Free-space medium parameters.
inline constexpr double eps0 = 8.85e-12;        // [F/m]
inline constexpr double mu0 = 4.0 * pi * 1e-7;  // [H/m]

inline double eta0() { return std::sqrt(mu0 / eps0); }
inline double c0() { return 1.0 / std::sqrt(eps0 * mu0); }

inline double wavelength(double frequency_hz) { return c0() / frequency_hz; }
inline double wavenumber(double frequency_hz) { return two_pi * frequency_hz * std::sqrt(eps0 * mu0); }

inline double deg2rad(double deg) { return deg * pi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / pi; }

/// dBm floor reported for zero-field probes.
inline constexpr double power_floor_dbm = -250.0;

}  // namespace oss::constants
