#pragma once

#include <utility>
#include <vector>

#include "oss/array.hpp"
#include "oss/scene.hpp"
#include "oss/vec.hpp"

namespace oss {

struct SolverSettings {
    int max_reflections = 2;  // <= 4
    bool enable_ground = true;
    bool enable_transmission = false;
    double min_path_gain_db = -250.0;
};

void validate_solver(const SolverSettings& settings);

enum class InteractionType { reflection, transmission };

struct Interaction {
    int face = -1;
    InteractionType type = InteractionType::reflection;
};

/// Specular ray path from source to receiver. vertices.front() is the source,
/// vertices.back() the receiver; interactions[i] happens at vertices[i + 1].
struct RayPath {
    std::vector<Vec3> vertices;
    std::vector<Interaction> interactions;
    double length = 0.0;
};

/// Lossy half-space Fresnel reflection coefficients for incidence from air.
/// Returns (gamma_perpendicular, gamma_parallel); eps_c = eps_r - j*sigma/(w*eps0).
std::pair<cdouble, cdouble> fresnel_reflection(double cos_theta_i, cdouble eps_c);

/// Single-pass slab transmission (interface pair via Stokes relations plus
/// the excess propagation phase/attenuation through the wall thickness).
std::pair<cdouble, cdouble> fresnel_transmission_slab(double cos_theta_i, cdouble eps_c,
                                                      double thickness_m, double k0);

cdouble complex_permittivity(const Material& m, double frequency_hz);

/// Prebuilt tracing context: the scene's faces in canonical order.
class Tracer {
  public:
    Tracer(const Scene& scene, const SolverSettings& settings);

    /// All valid image-method paths up to max_reflections, ordered by
    /// (bounce count, path length, face sequence).
    std::vector<RayPath> trace(Vec3 source, Vec3 receiver) const;

    const std::vector<Face>& faces() const { return faces_; }
    const SolverSettings& settings() const { return settings_; }
    const Scene& scene() const { return scene_; }

  private:
    bool segment_clear(Vec3 a, Vec3 b, int skip_a, int skip_b,
                       std::vector<std::pair<double, int>>* crossings) const;

    const Scene& scene_;
    SolverSettings settings_;
    std::vector<Face> faces_;
};

/// Field carried by one path for the given element excitation: element
/// pattern launch, 1/L spreading, e^{-j k0 L} phase, and per-bounce Fresnel
/// reflection (plus slab transmission when enabled). World Cartesian [V/m].
CVec3 path_field(const RayPath& path, cdouble element_excitation, const ArrayConfig& cfg,
                 const Tracer& tracer);

/// EPEP of element n (0-based): unit-magnitude zero-phase excitation of that
/// element alone, field summed over all traced paths at each probe.
std::vector<CVec3> compute_epep(const Scene& scene, const ArrayConfig& cfg, int element_index,
                                const std::vector<Vec3>& probes, const SolverSettings& settings,
                                unsigned workers = 1);

/// Direct full-array run: every element excited simultaneously; per-probe
/// contributions accumulated in canonical (element, path) order.
std::vector<CVec3> direct_total_field(const Scene& scene, const ArrayConfig& cfg,
                                      const Excitations& exc, const std::vector<Vec3>& probes,
                                      const SolverSettings& settings, unsigned workers = 1);

/// Free-space LOS field of an array (used for the ideal target): direct path
/// only, no scene interactions.
std::vector<CVec3> free_space_field(const ArrayConfig& cfg, const Excitations& exc,
                                    const std::vector<Vec3>& probes);

}  // namespace oss
