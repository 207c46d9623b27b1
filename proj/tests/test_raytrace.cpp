#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <vector>

#include "oss/constants.hpp"
#include "oss/errors.hpp"
#include "oss/raytrace.hpp"
#include "oss/rng.hpp"
#include "oss/scene.hpp"

using namespace oss;
using namespace oss::constants;

namespace {

std::string data_dir() {
    const char* d = std::getenv("OSS_DATA_DIR");
    return d ? d : "data";
}

Scene free_space() {
    Scene s;
    s.extent.min = {-200, -200};
    s.extent.max = {200, 200};
    return s;
}

Scene one_wall_corridor() {
    // blocker between source and receiver plus a reflector wall to the side
    Scene s = free_space();
    Building blocker;
    blocker.footprint = {{-30, 40}, {30, 40}, {30, 60}, {-30, 60}};
    blocker.height = 40;
    Building reflector;
    reflector.footprint = {{50, 20}, {60, 20}, {60, 80}, {50, 80}};
    reflector.height = 40;
    s.buildings = {blocker, reflector};
    validate_scene(s);
    return s;
}

ArrayConfig iso_element() {
    ArrayConfig cfg;
    cfg.rows = cfg.cols = 1;
    cfg.frequency_hz = 3.5e9;
    cfg.element_pattern.kind = PatternKind::isotropic;
    return cfg;
}

/// Independent first-order image enumeration: for every face, mirror the
/// source, intersect the back-traced segment with the face rectangle, and
/// keep the bounce if both legs are unobstructed by brute-force sampling.
std::vector<double> first_order_lengths_oracle(const Scene& scene, Vec3 src, Vec3 rcv) {
    const auto faces = wall_faces(scene, false);
    const auto blocked = [&](Vec3 a, Vec3 b, std::size_t skip) {
        for (std::size_t fi = 0; fi < faces.size(); ++fi) {
            if (fi == skip) continue;
            const Face& f = faces[fi];
            const Vec3 d = b - a;
            const double denom = dot(f.normal, d);
            if (std::abs(denom) < 1e-12) continue;
            const double t = dot(f.normal, f.origin - a) / denom;
            if (t <= 1e-9 || t >= 1.0 - 1e-9) continue;
            const Vec3 hit = a + t * d;
            const Vec3 rel = hit - f.origin;
            const double u = dot(rel, f.edge_u) / dot(f.edge_u, f.edge_u);
            const double v = dot(rel, f.edge_v) / dot(f.edge_v, f.edge_v);
            if (u > 1e-9 && u < 1 - 1e-9 && v > 1e-9 && v < 1 - 1e-9) return true;
        }
        return false;
    };
    std::vector<double> lengths;
    for (std::size_t fi = 0; fi < faces.size(); ++fi) {
        const Face& f = faces[fi];
        const double ds = dot(f.normal, src - f.origin);
        const double dr = dot(f.normal, rcv - f.origin);
        if (ds <= 0 || dr <= 0) continue;  // both endpoints must face the wall
        const Vec3 img = src - 2.0 * ds * f.normal;
        const Vec3 d = rcv - img;
        const double denom = dot(f.normal, d);
        if (std::abs(denom) < 1e-12) continue;
        const double t = dot(f.normal, f.origin - img) / denom;
        if (t <= 0 || t >= 1) continue;
        const Vec3 hit = img + t * d;
        const Vec3 rel = hit - f.origin;
        const double u = dot(rel, f.edge_u) / dot(f.edge_u, f.edge_u);
        const double v = dot(rel, f.edge_v) / dot(f.edge_v, f.edge_v);
        if (u < 1e-9 || u > 1 - 1e-9 || v < 1e-9 || v > 1 - 1e-9) continue;
        if (blocked(src, hit, fi) || blocked(hit, rcv, fi)) continue;
        lengths.push_back(norm(hit - src) + norm(rcv - hit));
    }
    std::sort(lengths.begin(), lengths.end());
    return lengths;
}

}  // namespace

TEST_CASE("line of sight in empty space is a single direct path") {
    const Scene s = free_space();
    SolverSettings set;
    set.enable_ground = false;
    const Tracer tracer(s, set);
    const Vec3 a{0, 0, 20}, b{30, 40, 1.5};
    const auto paths = tracer.trace(a, b);
    REQUIRE(paths.size() == 1);
    CHECK(paths[0].interactions.empty());
    CHECK(paths[0].length == doctest::Approx(norm(b - a)));
}

TEST_CASE("ground bounce obeys the image identity") {
    const Scene s = free_space();
    SolverSettings set;
    set.max_reflections = 1;
    const Tracer tracer(s, set);
    const Vec3 a{0, 0, 20}, b{30, 40, 1.5};
    const auto paths = tracer.trace(a, b);
    REQUIRE(paths.size() == 2);
    CHECK(paths[0].interactions.empty());
    REQUIRE(paths[1].interactions.size() == 1);
    const Vec3 mirror{b.x, b.y, -b.z};
    CHECK(paths[1].length == doctest::Approx(norm(mirror - a)).epsilon(1e-12));
}

TEST_CASE("blocked pair is reached through the side corridor") {
    const Scene s = one_wall_corridor();
    SolverSettings set;
    set.max_reflections = 1;
    set.enable_ground = false;
    const Tracer tracer(s, set);
    const Vec3 src{0, 0, 10}, rcv{0, 100, 1.5};
    const auto paths = tracer.trace(src, rcv);
    REQUIRE(!paths.empty());
    for (const auto& p : paths) CHECK(p.interactions.size() == 1);  // no direct path

    const auto oracle = first_order_lengths_oracle(s, src, rcv);
    REQUIRE(paths.size() == oracle.size());
    for (std::size_t i = 0; i < paths.size(); ++i) {
        CHECK(paths[i].length == doctest::Approx(oracle[i]).epsilon(1e-12));
    }
}

TEST_CASE("endpoints inside buildings are rejected") {
    const Scene s = one_wall_corridor();
    const Tracer tracer(s, SolverSettings{});
    CHECK_THROWS_AS(tracer.trace({0, 50, 5}, {0, 100, 1.5}), ValidationError);
    CHECK_THROWS_AS(tracer.trace({0, 0, 10}, {55, 50, 5}), ValidationError);
}

TEST_CASE("path field follows 1/r spreading") {
    const Scene s = free_space();
    SolverSettings set;
    set.enable_ground = false;
    const Tracer tracer(s, set);
    ArrayConfig cfg = iso_element();
    cfg.position = {0, 0, 20};
    const auto p1 = tracer.trace(cfg.position, {0, 50, 20});
    const auto p2 = tracer.trace(cfg.position, {0, 100, 20});
    const double e1 = norm(path_field(p1[0], {1.0, 0.0}, cfg, tracer));
    const double e2 = norm(path_field(p2[0], {1.0, 0.0}, cfg, tracer));
    CHECK(e1 == doctest::Approx(2.0 * e2).epsilon(1e-12));
}

TEST_CASE("fresnel coefficients") {
    SUBCASE("perfect-conductor limit reflects fully") {
        Material pec;
        pec.conductivity = 1e9;
        const cdouble eps_c = complex_permittivity(pec, 3.5e9);
        const auto [gs, gp] = fresnel_reflection(1.0, eps_c);
        CHECK(std::abs(gs) == doctest::Approx(1.0).epsilon(1e-4));
        CHECK(std::abs(gp) == doctest::Approx(1.0).epsilon(1e-4));
    }
    SUBCASE("normal incidence on concrete matches the closed form") {
        Material concrete;  // defaults: eps_r 6, sigma 0.136
        const double f = 3.5e9;
        const cdouble eps_c = complex_permittivity(concrete, f);
        // independent evaluation from first principles
        const cdouble expected_eps =
            cdouble(6.0, 0.0) - cdouble(0.0, 1.0) * 0.136 / (two_pi * f * eps0);
        CHECK(std::abs(eps_c - expected_eps) < 1e-12);
        const cdouble r = std::sqrt(expected_eps);
        const cdouble g_expected = (1.0 - r) / (1.0 + r);
        const auto [gs, gp] = fresnel_reflection(1.0, eps_c);
        CHECK(std::abs(gs - g_expected) < 1e-12);
        CHECK(std::abs(std::abs(gp) - std::abs(g_expected)) < 1e-12);
    }
}

TEST_CASE("epep basics") {
    const ArrayConfig cfg = iso_element();
    SolverSettings set;
    set.enable_ground = false;

    SUBCASE("free-space epep equals the single path field") {
        const Scene s = free_space();
        const std::vector<Vec3> probes{{0, 80, 20}};
        const auto field = compute_epep(s, cfg, 0, probes, set);
        const Tracer tracer(s, set);
        const auto paths = tracer.trace(cfg.position, probes[0]);
        const CVec3 expected = path_field(paths[0], {1.0, 0.0}, cfg, tracer);
        CHECK(norm(field[0] - expected) == doctest::Approx(0.0));
    }
    SUBCASE("deep shadow with no reflections is exactly dark") {
        const Scene s = one_wall_corridor();
        set.max_reflections = 0;
        const auto field = compute_epep(s, cfg, 0, {{0, 100, 1.5}}, set);
        CHECK(norm_sq(field[0]) == 0.0);
    }
}

TEST_CASE("epep superposition equals a direct full-array run") {
    const Scene s = load_scene(data_dir() + "/canonical_block.json");
    ArrayConfig cfg;
    cfg.rows = 2;
    cfg.cols = 4;
    cfg.position = {0, 0, 20};
    cfg.downtilt_deg = 2.0;
    const SolverSettings set;
    RegionOfInterest roi;
    roi.center = {35, 90};  // off-axis: every probe keeps line of sight
    roi.width_x = roi.width_y = 20.0;
    roi.spacing = 5.0;
    roi.grid_mode = GridMode::cells;
    const auto probes = probe_points(roi);

    const Excitations exc = make_excitations(cfg.count(), 1.0, uniform_phases(cfg));
    const auto direct = direct_total_field(s, cfg, exc, probes, set);
    std::vector<CVec3> summed(probes.size());
    for (int n = 0; n < cfg.count(); ++n) {
        const auto layer = compute_epep(s, cfg, n, probes, set);
        for (std::size_t m = 0; m < probes.size(); ++m) summed[m] = summed[m] + layer[m];
    }
    for (std::size_t m = 0; m < probes.size(); ++m) {
        const double ref = norm(direct[m]);
        REQUIRE(ref > 0.0);
        REQUIRE(norm(summed[m] - direct[m]) / ref < 1e-12);
    }
}

TEST_CASE("path geometry is reciprocal" * doctest::description("property")) {
    const Scene s = load_scene(data_dir() + "/canonical_block.json");
    SolverSettings set;
    set.max_reflections = 2;
    const Tracer tracer(s, set);
    RandomStream rng(31);
    int cases = 0;
    while (cases < 100) {
        const Vec3 a{rng.next_double(-45, 45), rng.next_double(-45, 45), rng.next_double(1, 30)};
        const Vec3 b{rng.next_double(-45, 45), rng.next_double(85, 145), rng.next_double(1, 30)};
        if (point_in_building(s, a) || point_in_building(s, b)) continue;
        ++cases;
        auto fwd = tracer.trace(a, b);
        auto rev = tracer.trace(b, a);
        REQUIRE(fwd.size() == rev.size());
        std::vector<double> lf, lr;
        for (const auto& p : fwd) lf.push_back(p.length);
        for (const auto& p : rev) lr.push_back(p.length);
        std::sort(lf.begin(), lf.end());
        std::sort(lr.begin(), lr.end());
        for (std::size_t i = 0; i < lf.size(); ++i) REQUIRE(std::abs(lf[i] - lr[i]) < 1e-9);
    }
}

TEST_CASE("traced paths obey the specular law" * doctest::description("property")) {
    const Scene s = one_wall_corridor();
    SolverSettings set;
    set.max_reflections = 2;
    const Tracer tracer(s, set);
    const auto faces = tracer.faces();
    RandomStream rng(77);
    int checked = 0;
    for (int c = 0; c < 200 && checked < 100; ++c) {
        const Vec3 a{rng.next_double(-40, 40), rng.next_double(-40, 20), rng.next_double(2, 35)};
        const Vec3 b{rng.next_double(-40, 40), rng.next_double(80, 150), rng.next_double(1, 10)};
        if (point_in_building(s, a) || point_in_building(s, b)) continue;
        for (const auto& path : tracer.trace(a, b)) {
            for (std::size_t i = 0; i < path.interactions.size(); ++i) {
                const Vec3 n = faces[path.interactions[i].face].normal;
                const Vec3 din = normalized(path.vertices[i + 1] - path.vertices[i]);
                const Vec3 dout = normalized(path.vertices[i + 2] - path.vertices[i + 1]);
                const Vec3 expected = din - 2.0 * dot(din, n) * n;
                REQUIRE(norm(dout - expected) < 1e-9);
                ++checked;
            }
        }
    }
    CHECK(checked >= 100);
}

TEST_CASE("passive materials never amplify" * doctest::description("property")) {
    RandomStream rng(5);
    for (int c = 0; c < 300; ++c) {
        Material m;
        m.rel_permittivity = rng.next_double(1.0, 20.0);
        m.conductivity = rng.next_double(0.0, 10.0);
        const double cos_i = rng.next_double(1e-6, 1.0);
        const auto [gs, gp] = fresnel_reflection(cos_i, complex_permittivity(m, 3.5e9));
        REQUIRE(std::abs(gs) <= 1.0 + 1e-12);
        REQUIRE(std::abs(gp) <= 1.0 + 1e-12);
    }
}

TEST_CASE("solver output is independent of worker count" * doctest::description("property")) {
    const Scene s = load_scene(data_dir() + "/canonical_occlusion.json");
    ArrayConfig cfg;
    cfg.rows = 2;
    cfg.cols = 2;
    cfg.position = {0, 0, 20};
    const SolverSettings set;
    RandomStream rng(13);
    std::vector<Vec3> probes;
    while (probes.size() < 128) {
        const Vec3 p{rng.next_double(-110, 110), rng.next_double(-10, 210),
                     rng.next_double(1, 25)};
        if (!point_in_building(s, p)) probes.push_back(p);
    }
    const auto f1 = compute_epep(s, cfg, 1, probes, set, 1);
    const auto f3 = compute_epep(s, cfg, 1, probes, set, 3);
    const auto f8 = compute_epep(s, cfg, 1, probes, set, 8);
    for (std::size_t m = 0; m < probes.size(); ++m) {
        REQUIRE(f1[m].x == f3[m].x);
        REQUIRE(f1[m].y == f3[m].y);
        REQUIRE(f1[m].z == f3[m].z);
        REQUIRE(f1[m].x == f8[m].x);
        REQUIRE(f1[m].y == f8[m].y);
        REQUIRE(f1[m].z == f8[m].z);
    }
}
