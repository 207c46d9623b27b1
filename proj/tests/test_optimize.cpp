#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oss/constants.hpp"
#include "oss/epep.hpp"
#include "oss/errors.hpp"
#include "oss/optimize.hpp"
#include "oss/raytrace.hpp"
#include "oss/rng.hpp"

using namespace oss;
using namespace oss::constants;

namespace {

Scene free_space() {
    Scene s;
    s.extent.min = {-500, -500};
    s.extent.max = {500, 500};
    return s;
}

/// Field magnitude (x-polarized, zero phase) that yields the requested
/// received power in milliwatts at unit excitation and 0 dBi receiver.
CVec3 field_for_mw(double mw, double frequency_hz) {
    const double lambda = wavelength(frequency_hz);
    const double watts = mw * 1e-3;
    CVec3 e;
    e.x = {std::sqrt(watts * 8.0 * pi * eta0()) / lambda, 0.0};
    return e;
}

/// Hand-built database whose unit-excitation single-element powers are the
/// given milliwatt values.
EpepDatabase db_with_powers(const std::vector<double>& mw, double frequency_hz = 3.5e9) {
    EpepDatabase db;
    db.frequency_hz = frequency_hz;
    db.xi = 1.0;
    db.fields.resize(1);
    for (std::size_t m = 0; m < mw.size(); ++m) {
        db.probes.push_back({static_cast<double>(m), 0.0, 1.5});
        db.fields[0].push_back(field_for_mw(mw[m], frequency_hz));
    }
    return db;
}

TargetDistribution target_from_mw(const std::vector<Vec3>& probes, const std::vector<double>& mw) {
    TargetDistribution t;
    t.probes = probes;
    t.target_mw = mw;
    for (double v : mw) t.target_dbm.push_back(10.0 * std::log10(v));
    return t;
}

/// Free-space fixture whose target is generated from a hidden phase vector
/// applied to the database itself, so the global optimum cost is exactly 0.
struct PlantFixture {
    ArrayConfig cfg;
    EpepDatabase db;
    TargetDistribution target;
    PhaseVector hidden;
};

PlantFixture plant_fixture(int rows, int cols, int n_probes, std::uint64_t scramble) {
    PlantFixture f;
    f.cfg.rows = rows;
    f.cfg.cols = cols;
    f.cfg.position = {0, 0, 25};
    f.cfg.downtilt_deg = 5.0;
    SolverSettings set;
    set.enable_ground = false;
    std::vector<Vec3> probes;
    RandomStream rng(scramble);
    for (int i = 0; i < n_probes; ++i) {
        probes.push_back({rng.next_double(-30, 30), rng.next_double(120, 220), 1.5});
    }
    f.db = build_database(free_space(), f.cfg, probes, set, 2);
    f.hidden = random_phases(f.cfg, 777 + scramble);
    const auto fields =
        total_field(f.db, make_excitations(f.cfg.count(), f.db.xi, f.hidden));
    const CoverageGrid grid = received_power(fields, probes, f.cfg.frequency_hz);
    std::vector<double> mw;
    for (double dbm : grid.power_dbm) mw.push_back(std::pow(10.0, dbm / 10.0));
    f.target = target_from_mw(probes, mw);
    return f;
}

}  // namespace

TEST_CASE("cost evaluates the mean relative power mismatch") {
    SUBCASE("exact match costs zero") {
        const EpepDatabase db = db_with_powers({1.0, 0.25});
        const TargetDistribution t = target_from_mw(db.probes, {1.0, 0.25});
        CHECK(cost(db, make_excitations(1, 1.0, {0.0}), t) == doctest::Approx(0.0));
    }
    SUBCASE("achieving twice the target everywhere costs one") {
        const EpepDatabase db = db_with_powers({2.0, 0.5});
        const TargetDistribution t = target_from_mw(db.probes, {1.0, 0.25});
        CHECK(cost(db, make_excitations(1, 1.0, {0.0}), t) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("hand-evaluated two-probe case") {
        const EpepDatabase db = db_with_powers({1.0, 0.5});
        const TargetDistribution t = target_from_mw(db.probes, {2.0, 1.0});
        // (|1-2|/2 + |0.5-1|/1) / 2 = 0.5
        CHECK(cost(db, make_excitations(1, 1.0, {0.0}), t) ==
              doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("probe mismatch is rejected") {
        const EpepDatabase db = db_with_powers({1.0, 0.5});
        const TargetDistribution t = target_from_mw({{0, 0, 1.5}}, {2.0});
        CHECK_THROWS_AS(cost(db, make_excitations(1, 1.0, {0.0}), t), ValidationError);
    }
}

TEST_CASE("normalized cost") {
    CHECK(normalized_cost(0.4, 0.4) == doctest::Approx(1.0));
    CHECK(normalized_cost(0.2, 0.4) == doctest::Approx(0.5));
    CHECK(normalized_cost(1.2, 1.0) > 1.0);  // worse than uniform is representable
    CHECK_THROWS_AS(normalized_cost(0.5, 0.0), ValidationError);
}

TEST_CASE("time saving accounting") {
    CHECK(time_saving(32, 1, 32) == doctest::Approx(0.0));
    CHECK(time_saving(64, 1000, 32) == doctest::Approx(0.9995).epsilon(1e-12));
    CHECK(time_saving(64, 1000, 0) == doctest::Approx(1.0));
}

TEST_CASE("free-space target distribution") {
    ArrayConfig cfg;
    cfg.rows = cfg.cols = 1;
    cfg.element_pattern.kind = PatternKind::isotropic;
    cfg.position = {0, 0, 50};

    SUBCASE("power falls 6.02 dB per distance doubling") {
        const std::vector<Vec3> probes{{0, 100, 50}, {0, 200, 50}};
        const TargetDistribution t = make_target(cfg, probes, 1.0);
        CHECK(t.target_dbm[0] - t.target_dbm[1] ==
              doctest::Approx(20.0 * std::log10(2.0)).epsilon(1e-9));
    }
    SUBCASE("equidistant probes on an arc receive equal power") {
        std::vector<Vec3> probes;
        for (int i = 0; i < 8; ++i) {
            const double a = deg2rad(10.0 + 20.0 * i);
            probes.push_back({100.0 * std::cos(a), 100.0 * std::sin(a), 50.0});
        }
        const TargetDistribution t = make_target(cfg, probes, 1.0);
        for (double v : t.target_dbm) CHECK(v == doctest::Approx(t.target_dbm[0]).epsilon(1e-9));
    }
}

TEST_CASE("pso recovers a planted optimum") {
    const PlantFixture f = plant_fixture(2, 2, 1, 1);
    PsoSettings set;
    set.seed = 3;
    set.stagnation_threshold = 1e-6;  // keep refining near the planted optimum
    set.stagnation_window = 300;      // don't cut the refinement phase short
    const OptimizationResult r = run_pso(f.db, f.cfg, f.target, set, 0.0, 2);
    CHECK(r.best_cost < 1e-3);
    CHECK(r.stagnation_lhs <= set.stagnation_threshold + 1e-15);
}

TEST_CASE("flat landscape stagnates at exactly the window length") {
    // one element, one probe: received power cannot depend on the phase
    const EpepDatabase db = db_with_powers({1.0});
    ArrayConfig cfg;
    cfg.rows = cfg.cols = 1;
    const TargetDistribution t = target_from_mw(db.probes, {5.0});
    PsoSettings set;
    set.swarm_size = 4;
    const OptimizationResult r = run_pso(db, cfg, t, set);
    CHECK(r.terminated_by == Termination::stagnation);
    CHECK(r.iterations_run == set.stagnation_window);
    CHECK(r.stagnation_lhs <= set.stagnation_threshold);
}

TEST_CASE("baselines: uniform anchors 100%, broadside steering is uniform") {
    ArrayConfig cfg;
    cfg.rows = 2;
    cfg.cols = 4;
    cfg.position = {0, 0, 20};
    SolverSettings set;
    set.enable_ground = false;
    RegionOfInterest roi;
    roi.center = {0, 150};
    roi.width_x = roi.width_y = 20;
    roi.spacing = 10;
    roi.height = 20.0;  // same height as the array: exact broadside
    roi.grid_mode = GridMode::cells;
    const auto probes = probe_points(roi);
    const EpepDatabase db = build_database(free_space(), cfg, probes, set);
    const ArrayConfig ideal = ideal_target_config(cfg, 3, 4, roi);
    const TargetDistribution target = make_target(ideal, probes, db.xi);
    const auto base = evaluate_baselines(db, cfg, target, roi, 1);
    REQUIRE(base.count("uniform") == 1);
    REQUIRE(base.count("steered") == 1);
    REQUIRE(base.count("random") == 1);
    CHECK(base.at("uniform").normalized == doctest::Approx(1.0));
    for (std::size_t i = 0; i < base.at("steered").phases.size(); ++i) {
        CHECK(base.at("steered").phases[i] == doctest::Approx(0.0).epsilon(1e-9));
    }
    CHECK(base.at("steered").cost_value == doctest::Approx(base.at("uniform").cost_value));
}

TEST_CASE("steering direction points at the world target") {
    ArrayConfig cfg;
    cfg.position = {0, 0, 20};
    const auto [ts, ps] = steering_direction(cfg, {0.0, 100.0, 20.0});
    CHECK(ts == doctest::Approx(90.0));
    CHECK(ps == doctest::Approx(90.0));
}

TEST_CASE("best cost history is monotone and phases stay wrapped"
          * doctest::description("property")) {
    for (int c = 0; c < 100; ++c) {
        const PlantFixture f = plant_fixture(1, 2, 2, 100 + c);
        PsoSettings set;
        set.swarm_size = 4;
        set.max_iterations = 30;
        set.stagnation_window = 10;
        set.seed = c;
        const OptimizationResult r = run_pso(f.db, f.cfg, f.target, set);
        for (std::size_t i = 1; i < r.cost_history.size(); ++i) {
            REQUIRE(r.cost_history[i] <= r.cost_history[i - 1]);
        }
        for (double b : r.best_phases) {
            REQUIRE(b >= 0.0);
            REQUIRE(b < two_pi);
        }
    }
}

TEST_CASE("identical seeds reproduce identical runs at any worker count"
          * doctest::description("property")) {
    const PlantFixture f = plant_fixture(2, 2, 4, 9);
    PsoSettings set;
    set.max_iterations = 120;
    set.seed = 42;
    const OptimizationResult a = run_pso(f.db, f.cfg, f.target, set, 0.0, 1);
    const OptimizationResult b = run_pso(f.db, f.cfg, f.target, set, 0.0, 1);
    const OptimizationResult c = run_pso(f.db, f.cfg, f.target, set, 0.0, 6);
    REQUIRE(a.cost_history == b.cost_history);
    REQUIRE(a.best_phases == b.best_phases);
    REQUIRE(a.cost_history == c.cost_history);
    REQUIRE(a.best_phases == c.best_phases);
}

TEST_CASE("cost is invariant under joint power scaling" * doctest::description("property")) {
    RandomStream rng(71);
    for (int c = 0; c < 100; ++c) {
        const double p1 = rng.next_double(0.01, 10.0);
        const double p2 = rng.next_double(0.01, 10.0);
        const double t1 = rng.next_double(0.01, 10.0);
        const double t2 = rng.next_double(0.01, 10.0);
        const double scale = rng.next_double(0.1, 100.0);
        const EpepDatabase db = db_with_powers({p1, p2});
        const double base =
            cost(db, make_excitations(1, 1.0, {0.0}), target_from_mw(db.probes, {t1, t2}));
        const double scaled =
            cost(db, make_excitations(1, std::sqrt(scale), {0.0}),
                 target_from_mw(db.probes, {scale * t1, scale * t2}));
        REQUIRE(std::abs(base - scaled) < 1e-12 * (1.0 + base));
    }
}

TEST_CASE("db-domain cost flag changes the metric but keeps zero at the optimum") {
    const EpepDatabase db = db_with_powers({4.0, 0.25});
    const TargetDistribution t = target_from_mw(db.probes, {4.0, 0.25});
    CHECK(cost(db, make_excitations(1, 1.0, {0.0}), t, 0.0, CostDomain::db) ==
          doctest::Approx(0.0));
    const TargetDistribution off = target_from_mw(db.probes, {8.0, 0.5});
    CHECK(cost(db, make_excitations(1, 1.0, {0.0}), off, 0.0, CostDomain::db) > 0.0);
}
