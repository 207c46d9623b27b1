#include "oss/raytrace.hpp"

#include <algorithm>
#include <cmath>

#include "oss/constants.hpp"
#include "oss/errors.hpp"
#include "oss/parallel.hpp"

namespace oss {
namespace {

using namespace oss::constants;

constexpr double kEps = 1e-9;

Vec3 mirror_point(Vec3 p, const Face& f) {
    return p - 2.0 * dot(p - f.origin, f.normal) * f.normal;
}

/// Intersection of segment a->b with the face plane; fills t and the point.
bool segment_plane_hit(Vec3 a, Vec3 b, const Face& f, double& t, Vec3& p) {
    const Vec3 d = b - a;
    const double denom = dot(d, f.normal);
    if (std::abs(denom) < 1e-15) return false;
    t = dot(f.origin - a, f.normal) / denom;
    p = a + t * d;
    return true;
}

bool inside_rect(const Face& f, Vec3 p) {
    const Vec3 r = p - f.origin;
    const double a = dot(r, f.edge_u) / dot(f.edge_u, f.edge_u);
    const double b = dot(r, f.edge_v) / dot(f.edge_v, f.edge_v);
    return a >= -kEps && a <= 1.0 + kEps && b >= -kEps && b <= 1.0 + kEps;
}

Vec3 any_perpendicular(Vec3 d) {
    Vec3 c = cross(d, Vec3{1.0, 0.0, 0.0});
    if (norm(c) < 1e-6) c = cross(d, Vec3{0.0, 1.0, 0.0});
    return normalized(c);
}

}  // namespace

void validate_solver(const SolverSettings& settings) {
    if (settings.max_reflections < 0 || settings.max_reflections > 4) {
        throw ValidationError("max_reflections must be in [0, 4]");
    }
}

cdouble complex_permittivity(const Material& m, double frequency_hz) {
    return {m.rel_permittivity, -m.conductivity / (two_pi * frequency_hz * eps0)};
}

std::pair<cdouble, cdouble> fresnel_reflection(double cos_theta_i, cdouble eps_c) {
    const double sin2 = std::max(0.0, 1.0 - cos_theta_i * cos_theta_i);
    const cdouble g = std::sqrt(eps_c - sin2);
    const cdouble gamma_s = (cos_theta_i - g) / (cos_theta_i + g);
    const cdouble gamma_p = (eps_c * cos_theta_i - g) / (eps_c * cos_theta_i + g);
    return {gamma_s, gamma_p};
}

std::pair<cdouble, cdouble> fresnel_transmission_slab(double cos_theta_i, cdouble eps_c,
                                                      double thickness_m, double k0) {
    const double sin2 = std::max(0.0, 1.0 - cos_theta_i * cos_theta_i);
    const cdouble g = std::sqrt(eps_c - sin2);
    const auto [gamma_s, gamma_p] = fresnel_reflection(cos_theta_i, eps_c);
    // interface pair via Stokes (t12*t21 = 1 - gamma^2) plus the excess
    // propagation factor through the slab relative to free space
    const cdouble excess = std::exp(cdouble{0.0, -1.0} * k0 * thickness_m * (g - cos_theta_i));
    return {(1.0 - gamma_s * gamma_s) * excess, (1.0 - gamma_p * gamma_p) * excess};
}

Tracer::Tracer(const Scene& scene, const SolverSettings& settings)
    : scene_(scene), settings_(settings), faces_(wall_faces(scene, settings.enable_ground)) {
    validate_solver(settings_);
}

bool Tracer::segment_clear(Vec3 a, Vec3 b, int skip_a, int skip_b,
                           std::vector<std::pair<double, int>>* crossings) const {
    for (int fi = 0; fi < static_cast<int>(faces_.size()); ++fi) {
        if (fi == skip_a || fi == skip_b) continue;
        const Face& f = faces_[fi];
        double t;
        Vec3 p;
        if (!segment_plane_hit(a, b, f, t, p)) continue;
        if (t <= 1e-7 || t >= 1.0 - 1e-7) continue;
        if (!inside_rect(f, p)) continue;
        if (settings_.enable_transmission && !f.is_ground) {
            if (crossings) crossings->push_back({t, fi});
        } else {
            return false;
        }
    }
    return true;
}

std::vector<RayPath> Tracer::trace(Vec3 source, Vec3 receiver) const {
    if (norm(receiver - source) < kEps) {
        throw ValidationError("trace: source and receiver coincide");
    }
    if (point_in_building(scene_, source)) {
        throw ValidationError("trace: source lies inside a building");
    }
    if (point_in_building(scene_, receiver)) {
        throw ValidationError("trace: receiver lies inside a building");
    }

    const int nf = static_cast<int>(faces_.size());
    std::vector<RayPath> paths;

    // face index sequence under test, depth-first in ascending index order
    std::vector<int> seq;
    std::vector<Vec3> images;  // images[j] = source mirrored through seq[0..j]

    auto try_sequence = [&]() {
        const int k = static_cast<int>(seq.size());
        // backtrace reflection points from the receiver
        std::vector<Vec3> bounce(static_cast<std::size_t>(k));
        Vec3 next = receiver;
        for (int j = k - 1; j >= 0; --j) {
            const Face& f = faces_[seq[j]];
            double t;
            Vec3 p;
            if (!segment_plane_hit(next, images[j], f, t, p)) return;
            if (t <= kEps || t >= 1.0 - kEps) return;
            if (!inside_rect(f, p)) return;
            bounce[j] = p;
            next = p;
        }
        // specular side condition: both neighbors in front of each face
        std::vector<Vec3> verts;
        verts.reserve(static_cast<std::size_t>(k) + 2);
        verts.push_back(source);
        for (const auto& q : bounce) verts.push_back(q);
        verts.push_back(receiver);
        for (int j = 0; j < k; ++j) {
            const Face& f = faces_[seq[j]];
            if (dot(f.normal, verts[j] - bounce[j]) <= kEps) return;
            if (dot(f.normal, verts[j + 2] - bounce[j]) <= kEps) return;
        }
        // occlusion and (optional) transmission crossings per segment
        RayPath path;
        path.vertices.push_back(source);
        for (int s = 0; s <= k; ++s) {
            const Vec3 a = verts[s];
            const Vec3 b = verts[s + 1];
            const int skip_a = (s > 0) ? seq[s - 1] : -1;
            const int skip_b = (s < k) ? seq[s] : -1;
            std::vector<std::pair<double, int>> crossings;
            if (!segment_clear(a, b, skip_a, skip_b, &crossings)) return;
            std::sort(crossings.begin(), crossings.end());
            for (const auto& [t, fi] : crossings) {
                path.vertices.push_back(a + t * (b - a));
                path.interactions.push_back({fi, InteractionType::transmission});
            }
            path.vertices.push_back(b);
            if (s < k) path.interactions.push_back({seq[s], InteractionType::reflection});
        }
        double len = 0.0;
        for (std::size_t v = 1; v < path.vertices.size(); ++v) {
            len += norm(path.vertices[v] - path.vertices[v - 1]);
        }
        path.length = len;
        if (settings_.min_path_gain_db > -250.0 + kEps) {
            // crude Friis-style bound used only to drop negligible paths
            const double spread_db = 20.0 * std::log10(1.0 / std::max(len, 1.0));
            if (spread_db < settings_.min_path_gain_db) return;
        }
        paths.push_back(std::move(path));
    };

    // depth 0 (line of sight), then every reflection order up to the cap
    try_sequence();
    std::vector<int> stack;
    auto recurse = [&](auto&& self, int depth) -> void {
        if (depth == settings_.max_reflections) return;
        for (int fi = 0; fi < nf; ++fi) {
            if (!seq.empty() && seq.back() == fi) continue;
            const Vec3 prev = images.empty() ? source : images.back();
            seq.push_back(fi);
            images.push_back(mirror_point(prev, faces_[fi]));
            try_sequence();
            self(self, depth + 1);
            seq.pop_back();
            images.pop_back();
        }
    };
    recurse(recurse, 0);

    std::sort(paths.begin(), paths.end(), [](const RayPath& a, const RayPath& b) {
        const auto bounces = [](const RayPath& p) {
            std::size_t n = 0;
            for (const auto& it : p.interactions) {
                if (it.type == InteractionType::reflection) ++n;
            }
            return n;
        };
        const std::size_t ba = bounces(a);
        const std::size_t bb = bounces(b);
        if (ba != bb) return ba < bb;
        if (a.length != b.length) return a.length < b.length;
        for (std::size_t i = 0; i < std::min(a.interactions.size(), b.interactions.size()); ++i) {
            if (a.interactions[i].face != b.interactions[i].face) {
                return a.interactions[i].face < b.interactions[i].face;
            }
        }
        return a.interactions.size() < b.interactions.size();
    });
    return paths;
}

CVec3 path_field(const RayPath& path, cdouble element_excitation, const ArrayConfig& cfg,
                 const Tracer& tracer) {
    const Vec3 dir0 = normalized(path.vertices[1] - path.vertices[0]);
    const Vec3 u_local = world_to_local_dir(cfg, dir0);
    const double g = element_amplitude(cfg.element_pattern, u_local);
    if (g == 0.0) return {};
    const Vec3 pol = local_to_world_dir(cfg, polarization_local(u_local));

    CVec3 field = (element_excitation * g) * pol;
    const double k0 = wavenumber(cfg.frequency_hz);

    for (std::size_t i = 0; i < path.interactions.size(); ++i) {
        const Interaction& it = path.interactions[i];
        const Face& f = tracer.faces()[it.face];
        const Vec3 d = normalized(path.vertices[i + 1] - path.vertices[i]);
        const double cos_i = std::min(1.0, std::abs(dot(d, f.normal)));
        const cdouble eps_c = complex_permittivity(f.material, cfg.frequency_hz);

        Vec3 s_hat = cross(d, f.normal);
        if (norm(s_hat) < 1e-9) {
            s_hat = any_perpendicular(d);
        } else {
            s_hat = normalized(s_hat);
        }
        const Vec3 p_in = cross(s_hat, d);
        const cdouble e_s = dot(field, s_hat);
        const cdouble e_p = dot(field, p_in);

        if (it.type == InteractionType::reflection) {
            const Vec3 d_out = d - 2.0 * dot(d, f.normal) * f.normal;
            const Vec3 p_out = cross(s_hat, d_out);
            const auto [gs, gp] = fresnel_reflection(cos_i, eps_c);
            field = (gs * e_s) * s_hat + (gp * e_p) * p_out;
        } else {
            const auto [ts, tp] =
                fresnel_transmission_slab(cos_i, eps_c, f.material.thickness, k0);
            field = (ts * e_s) * s_hat + (tp * e_p) * p_in;
        }
    }

    const cdouble spread = std::exp(cdouble{0.0, -k0 * path.length}) / path.length;
    return spread * field;
}

std::vector<CVec3> compute_epep(const Scene& scene, const ArrayConfig& cfg, int element_index,
                                const std::vector<Vec3>& probes, const SolverSettings& settings,
                                unsigned workers) {
    if (element_index < 0 || element_index >= cfg.count()) {
        throw ValidationError("element index out of range");
    }
    const Tracer tracer(scene, settings);
    const Vec3 source = element_world_positions(cfg)[static_cast<std::size_t>(element_index)];
    std::vector<CVec3> fields(probes.size());
    parallel_for(probes.size(), workers, [&](std::size_t m) {
        CVec3 acc;
        for (const auto& path : tracer.trace(source, probes[m])) {
            acc = acc + path_field(path, cdouble{1.0, 0.0}, cfg, tracer);
        }
        fields[m] = acc;
    });
    return fields;
}

std::vector<CVec3> direct_total_field(const Scene& scene, const ArrayConfig& cfg,
                                      const Excitations& exc, const std::vector<Vec3>& probes,
                                      const SolverSettings& settings, unsigned workers) {
    const int n = cfg.count();
    if (static_cast<int>(exc.magnitudes.size()) != n ||
        static_cast<int>(exc.phases.size()) != n) {
        throw ValidationError("excitation length does not match element count");
    }
    const Tracer tracer(scene, settings);
    const auto sources = element_world_positions(cfg);
    std::vector<CVec3> fields(probes.size());
    parallel_for(probes.size(), workers, [&](std::size_t m) {
        CVec3 acc;
        for (int e = 0; e < n; ++e) {
            const cdouble w = std::polar(exc.magnitudes[e], exc.phases[e]);
            for (const auto& path : tracer.trace(sources[e], probes[m])) {
                acc = acc + path_field(path, w, cfg, tracer);
            }
        }
        fields[m] = acc;
    });
    return fields;
}

std::vector<CVec3> free_space_field(const ArrayConfig& cfg, const Excitations& exc,
                                    const std::vector<Vec3>& probes) {
    const int n = cfg.count();
    const auto sources = element_world_positions(cfg);
    const double k0 = wavenumber(cfg.frequency_hz);
    std::vector<CVec3> fields(probes.size());
    for (std::size_t m = 0; m < probes.size(); ++m) {
        CVec3 acc;
        for (int e = 0; e < n; ++e) {
            const Vec3 r = probes[m] - sources[e];
            const double len = norm(r);
            const Vec3 u_local = world_to_local_dir(cfg, normalized(r));
            const double g = element_amplitude(cfg.element_pattern, u_local);
            if (g == 0.0) continue;
            const Vec3 pol = local_to_world_dir(cfg, polarization_local(u_local));
            const cdouble w = std::polar(exc.magnitudes[e], exc.phases[e]);
            acc = acc + (w * g * std::exp(cdouble{0.0, -k0 * len}) / len) * pol;
        }
        fields[m] = acc;
    }
    return fields;
}

}  // namespace oss
