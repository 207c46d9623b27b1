#include "oss/array.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "oss/constants.hpp"
#include "oss/errors.hpp"
#include "oss/rng.hpp"

namespace oss {
namespace {

using namespace oss::constants;

/// Base far-field amplitude: a unit-excitation isotropic element radiates
/// exactly 1 W, so |E| = g0/r and Friis holds with P_t = |w|^2 watts.
double base_amplitude() { return std::sqrt(eta0() / two_pi); }

struct GaussLegendre {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

GaussLegendre gauss_legendre(int n) {
    GaussLegendre gl;
    gl.nodes.resize(n);
    gl.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        gl.nodes[i] = -x;
        gl.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        gl.weights[i] = w;
        gl.weights[n - 1 - i] = w;
    }
    return gl;
}

}  // namespace

double ArrayConfig::wavelength() const { return constants::wavelength(frequency_hz); }
double ArrayConfig::dx() const { return spacing_x > 0.0 ? spacing_x : 0.5 * wavelength(); }
double ArrayConfig::dz() const { return spacing_z > 0.0 ? spacing_z : 0.5 * wavelength(); }

void validate_array(const ArrayConfig& cfg) {
    if (cfg.rows < 1 || cfg.cols < 1) throw ValidationError("array rows/cols must be >= 1");
    if (!(cfg.frequency_hz > 0.0)) throw ValidationError("array frequency must be > 0");
    if (!(cfg.dx() > 0.0 && cfg.dz() > 0.0)) throw ValidationError("array spacing must be > 0");
    if (!(cfg.max_radiated_power_w > 0.0)) {
        throw ValidationError("max_radiated_power_w must be > 0");
    }
    if (!(cfg.power_scale >= 1.0)) throw ValidationError("power_scale (delta) must be >= 1");
    if (cfg.element_pattern.kind == PatternKind::cosine_power &&
        !(cfg.element_pattern.exponent >= 0.0)) {
        throw ValidationError("element pattern exponent must be >= 0");
    }
    if (cfg.quadrature.n_theta < 2 || cfg.quadrature.n_phi < 4) {
        throw ValidationError("quadrature resolution too coarse");
    }
}

Excitations make_excitations(int n, double mag, PhaseVector phases) {
    if (static_cast<int>(phases.size()) != n) {
        throw ValidationError("phase vector length does not match element count");
    }
    Excitations exc;
    exc.magnitudes.assign(static_cast<std::size_t>(n), mag);
    exc.phases = std::move(phases);
    return exc;
}

double wrap_phase(double rad) {
    double w = std::fmod(rad, two_pi);
    if (w < 0.0) w += two_pi;
    if (w >= two_pi) w = 0.0;
    return w;
}

std::vector<Vec3> element_positions(const ArrayConfig& cfg) {
    std::vector<Vec3> pos;
    pos.reserve(static_cast<std::size_t>(cfg.count()));
    const double ox = 0.5 * (cfg.cols - 1) * cfg.dx();
    const double oz = 0.5 * (cfg.rows - 1) * cfg.dz();
    for (int r = 0; r < cfg.rows; ++r) {
        for (int c = 0; c < cfg.cols; ++c) {
            pos.push_back({c * cfg.dx() - ox, 0.0, r * cfg.dz() - oz});
        }
    }
    return pos;
}

double element_amplitude(const ElementPattern& pattern, Vec3 dir_local) {
    const double g0 = base_amplitude();
    if (pattern.kind == PatternKind::isotropic) return g0;
    const double c = dir_local.y;  // cos of angle from broadside
    if (c <= 0.0) return 0.0;
    return g0 * std::pow(c, pattern.exponent);
}

Vec3 polarization_local(Vec3 dir_local) {
    const Vec3 vertical{0.0, 0.0, 1.0};
    Vec3 t = vertical - dot(vertical, dir_local) * dir_local;
    if (norm(t) < 1e-9) {
        const Vec3 horizontal{1.0, 0.0, 0.0};
        t = horizontal - dot(horizontal, dir_local) * dir_local;
    }
    return normalized(t);
}

Vec3 local_to_world_dir(const ArrayConfig& cfg, Vec3 d) {
    const double th = deg2rad(cfg.downtilt_deg);
    const double ph = deg2rad(cfg.azimuth_deg);
    // downtilt about the aperture x axis (broadside +y dips toward -z)
    const Vec3 t{d.x, d.y * std::cos(th) + d.z * std::sin(th),
                 -d.y * std::sin(th) + d.z * std::cos(th)};
    // azimuth clockwise from +y about the vertical axis
    return {t.x * std::cos(ph) + t.y * std::sin(ph),
            -t.x * std::sin(ph) + t.y * std::cos(ph), t.z};
}

Vec3 world_to_local_dir(const ArrayConfig& cfg, Vec3 d) {
    const double th = deg2rad(cfg.downtilt_deg);
    const double ph = deg2rad(cfg.azimuth_deg);
    const Vec3 t{d.x * std::cos(ph) - d.y * std::sin(ph),
                 d.x * std::sin(ph) + d.y * std::cos(ph), d.z};
    return {t.x, t.y * std::cos(th) - t.z * std::sin(th),
            t.y * std::sin(th) + t.z * std::cos(th)};
}

Vec3 local_to_world(const ArrayConfig& cfg, Vec3 p) {
    return cfg.position + local_to_world_dir(cfg, p);
}

Vec3 world_to_local(const ArrayConfig& cfg, Vec3 p) {
    return world_to_local_dir(cfg, p - cfg.position);
}

std::vector<Vec3> element_world_positions(const ArrayConfig& cfg) {
    auto pos = element_positions(cfg);
    for (auto& p : pos) p = local_to_world(cfg, p);
    return pos;
}

double radiated_power(const ArrayConfig& cfg, const Excitations& exc) {
    return radiated_power(cfg, exc, cfg.quadrature);
}

double radiated_power(const ArrayConfig& cfg, const Excitations& exc,
                      const QuadratureSettings& quad) {
    const int n = cfg.count();
    if (static_cast<int>(exc.magnitudes.size()) != n ||
        static_cast<int>(exc.phases.size()) != n) {
        throw ValidationError("excitation length does not match element count");
    }
    const auto pos = element_positions(cfg);
    const double k0 = wavenumber(cfg.frequency_hz);

    std::vector<cdouble> weights(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        weights[i] = std::polar(exc.magnitudes[i], exc.phases[i]);
    }

    // Polar axis on broadside: the cosine pattern is smooth over the forward
    // hemisphere and identically zero behind it, so integrate cos(theta') on
    // [0, 1] (or [-1, 1] for isotropic elements).
    const bool forward_only = cfg.element_pattern.kind == PatternKind::cosine_power;
    const auto gl = gauss_legendre(quad.n_theta);
    double total = 0.0;
    const double dphi = two_pi / quad.n_phi;
    for (int it = 0; it < quad.n_theta; ++it) {
        double cu, wu;
        if (forward_only) {
            cu = 0.5 * (gl.nodes[it] + 1.0);  // cos(theta') in [0, 1]
            wu = 0.5 * gl.weights[it];
        } else {
            cu = gl.nodes[it];
            wu = gl.weights[it];
        }
        const double su = std::sqrt(std::max(0.0, 1.0 - cu * cu));
        for (int ip = 0; ip < quad.n_phi; ++ip) {
            const double phi = (ip + 0.5) * dphi;
            // theta' measured from broadside (+y); phi around it from +x
            const Vec3 u{su * std::cos(phi), cu, su * std::sin(phi)};
            const double g = element_amplitude(cfg.element_pattern, u);
            if (g == 0.0) continue;
            cdouble af{0.0, 0.0};
            for (int e = 0; e < n; ++e) {
                af += weights[e] * std::polar(1.0, k0 * dot(u, pos[e]));
            }
            total += wu * dphi * g * g * std::norm(af);
        }
    }
    return total / (2.0 * eta0());
}

double normalize_magnitude(const ArrayConfig& cfg) {
    const int n = cfg.count();
    Excitations w0 = make_excitations(n, 1.0, PhaseVector(static_cast<std::size_t>(n), 0.0));
    const double p0 = radiated_power(cfg, w0);
    if (!(p0 > 0.0)) throw ValidationError("degenerate pattern: all-ones excitation radiates 0 W");
    return std::sqrt(cfg.max_radiated_power_w / p0);
}

PhaseVector steering_phases(const ArrayConfig& cfg, double theta_s_deg, double phi_s_deg) {
    const auto pos = element_positions(cfg);
    const double lambda = cfg.wavelength();
    const double st = std::sin(deg2rad(theta_s_deg));
    const double ct = std::cos(deg2rad(theta_s_deg));
    const double cp = std::cos(deg2rad(phi_s_deg));
    PhaseVector beta;
    beta.reserve(pos.size());
    for (const auto& p : pos) {
        beta.push_back(wrap_phase(-two_pi * ((p.x / lambda) * st * cp + (p.z / lambda) * ct)));
    }
    return beta;
}

PhaseVector uniform_phases(const ArrayConfig& cfg) {
    return PhaseVector(static_cast<std::size_t>(cfg.count()), 0.0);
}

PhaseVector random_phases(const ArrayConfig& cfg, std::uint64_t seed) {
    RandomStream rng(seed, 0x72616e64ULL);  // dedicated stream tag
    PhaseVector beta(static_cast<std::size_t>(cfg.count()));
    for (auto& b : beta) b = rng.next_double(0.0, two_pi);
    return beta;
}

double bearing_deg(Vec3 from, Vec2 to) {
    const double dx = to.x - from.x;
    const double dy = to.y - from.y;
    double deg = rad2deg(std::atan2(dx, dy));
    if (deg < 0.0) deg += 360.0;
    return deg;
}

ArrayConfig ideal_target_config(const ArrayConfig& cfg, int rows, int cols,
                                const RegionOfInterest& roi) {
    if (rows * cols <= cfg.count()) {
        throw ValidationError("ideal target array must have more elements than the BTS array");
    }
    ArrayConfig ideal = cfg;
    ideal.rows = rows;
    ideal.cols = cols;
    ideal.azimuth_deg = bearing_deg(cfg.position, roi.center);
    return ideal;
}

}  // namespace oss
