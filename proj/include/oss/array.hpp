#pragma once

#include <cstdint>
#include <vector>

#include "oss/scene.hpp"
#include "oss/vec.hpp"

namespace oss {

enum class PatternKind { isotropic, cosine_power };

/// Analytic element pattern. The cosine-power pattern radiates only into the
/// forward hemisphere (local +y) with amplitude cos^exponent of the angle
/// from broadside; peak directivity is 2*(2*exponent + 1), ~6.5 dBi at the
/// default exponent.
struct ElementPattern {
    PatternKind kind = PatternKind::cosine_power;
    double exponent = 0.62;
    double gain_dbi = 6.5;  // nominal, informational
};

/// Spherical quadrature resolution for the radiated-power integral.
struct QuadratureSettings {
    int n_theta = 180;
    int n_phi = 360;
};

/// Planar BTS array. Elements lie on the local (x, z) plane with broadside
/// along local +y; azimuth is degrees clockwise from world +y ("North").
struct ArrayConfig {
    int rows = 4;
    int cols = 8;
    double spacing_x = 0.0;  // [m]; 0 means lambda/2
    double spacing_z = 0.0;  // [m]; 0 means lambda/2
    Vec3 position;
    double azimuth_deg = 0.0;
    double downtilt_deg = 0.0;
    double frequency_hz = 3.5e9;
    ElementPattern element_pattern;
    double max_radiated_power_w = 20.0;  // zeta_max
    double power_scale = 1.0;            // delta
    QuadratureSettings quadrature;

    int count() const { return rows * cols; }
    double wavelength() const;
    double dx() const;
    double dz() const;
};

void validate_array(const ArrayConfig& cfg);

using PhaseVector = std::vector<double>;  // radians, each in [0, 2pi)

struct Excitations {
    std::vector<double> magnitudes;  // uniform delta * xi
    PhaseVector phases;
};

/// Uniform excitations at magnitude mag and the given phases.
Excitations make_excitations(int n, double mag, PhaseVector phases);

double wrap_phase(double rad);  // into [0, 2pi)

/// Row-major element grid centered on the aperture centroid, bottom-left
/// element first (index runs along x, then up in z).
std::vector<Vec3> element_positions(const ArrayConfig& cfg);

/// Element far-field amplitude along a local-frame unit direction.
double element_amplitude(const ElementPattern& pattern, Vec3 dir_local);

/// Far-field polarization unit vector for a launch direction: projection of
/// the aperture vertical axis onto the plane transverse to dir (local frame).
Vec3 polarization_local(Vec3 dir_local);

Vec3 local_to_world_dir(const ArrayConfig& cfg, Vec3 d);
Vec3 world_to_local_dir(const ArrayConfig& cfg, Vec3 d);
Vec3 local_to_world(const ArrayConfig& cfg, Vec3 p);
Vec3 world_to_local(const ArrayConfig& cfg, Vec3 p);

/// World positions of all elements.
std::vector<Vec3> element_world_positions(const ArrayConfig& cfg);

/// Total radiated power [W] via spherical quadrature of the free-space
/// far-field (Gauss-Legendre in cos(theta) x uniform in phi, polar axis on
/// broadside so the forward-hemisphere pattern edge falls on a panel seam).
double radiated_power(const ArrayConfig& cfg, const Excitations& exc);
double radiated_power(const ArrayConfig& cfg, const Excitations& exc,
                      const QuadratureSettings& quad);

/// Uniform magnitude xi making the all-ones excitation radiate exactly the
/// power budget.
double normalize_magnitude(const ArrayConfig& cfg);

/// Phase gradient steering the beam to (theta_s, phi_s) in the local
/// spherical frame (theta from local +z, phi from local +x; broadside is
/// (90, 90)). Element positions are measured in wavelengths.
PhaseVector steering_phases(const ArrayConfig& cfg, double theta_s_deg, double phi_s_deg);

PhaseVector uniform_phases(const ArrayConfig& cfg);
PhaseVector random_phases(const ArrayConfig& cfg, std::uint64_t seed);

/// Ideal free-space target array: same position and downtilt, azimuth turned
/// to the horizontal bearing of the RoI barycenter, rows' x cols' > N.
ArrayConfig ideal_target_config(const ArrayConfig& cfg, int rows, int cols,
                                const RegionOfInterest& roi);

/// Horizontal bearing of a point from the array, degrees clockwise from +y.
double bearing_deg(Vec3 from, Vec2 to);

}  // namespace oss
