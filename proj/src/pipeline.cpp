#include "oss/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "oss/constants.hpp"
#include "oss/epep.hpp"
#include "oss/errors.hpp"
#include "oss/hash.hpp"
#include "oss/heatmap.hpp"

namespace oss {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace oss::constants;

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

double get_or(const json& j, const char* key, double def) {
    return j.contains(key) ? j.at(key).get<double>() : def;
}
int get_or(const json& j, const char* key, int def) {
    return j.contains(key) ? j.at(key).get<int>() : def;
}
bool get_or(const json& j, const char* key, bool def) {
    return j.contains(key) ? j.at(key).get<bool>() : def;
}
std::string get_or(const json& j, const char* key, const std::string& def) {
    return j.contains(key) ? j.at(key).get<std::string>() : def;
}

RegionOfInterest parse_roi(const json& j, const Scene& scene) {
    RegionOfInterest roi;
    roi.center = {j.at("center").at(0).get<double>(), j.at("center").at(1).get<double>()};
    roi.width_x = j.at("width_x").get<double>();
    roi.width_y = j.at("width_y").get<double>();
    roi.height = get_or(j, "height", 1.5);
    roi.spacing = get_or(j, "spacing", 5.0);
    roi.grid_mode = parse_grid_mode(get_or(j, "grid_mode", scene.grid_mode));
    return roi;
}

ElementPattern parse_pattern(const json& j) {
    ElementPattern p;
    const std::string kind = get_or(j, "kind", std::string("cosine_power"));
    if (kind == "isotropic") {
        p.kind = PatternKind::isotropic;
    } else if (kind == "cosine_power") {
        p.kind = PatternKind::cosine_power;
    } else {
        throw FormatError("unknown element pattern kind: " + kind);
    }
    p.exponent = get_or(j, "exponent", 0.62);
    p.gain_dbi = get_or(j, "gain_dbi", 6.5);
    return p;
}

struct StatRow {
    std::string name;
    PowerStats stats;
};

void write_stats_csv(const std::vector<StatRow>& rows, const std::string& path,
                     std::uint64_t config_hash) {
    std::ofstream out(path, std::ios::binary);
    out << "# config " << hex64(config_hash) << "\n";
    out << "solution,min_dbm,max_dbm,avg_dbm\n";
    char line[160];
    for (const auto& r : rows) {
        std::snprintf(line, sizeof(line), "%s,%.4f,%.4f,%.4f\n", r.name.c_str(), r.stats.min_dbm,
                      r.stats.max_dbm, r.stats.avg_dbm);
        out << line;
    }
}

void print_stats_table(const std::vector<StatRow>& rows) {
    std::printf("%-12s %12s %12s %12s\n", "solution", "min [dBm]", "max [dBm]", "avg [dBm]");
    for (const auto& r : rows) {
        std::printf("%-12s %12.2f %12.2f %12.2f\n", r.name.c_str(), r.stats.min_dbm,
                    r.stats.max_dbm, r.stats.avg_dbm);
    }
}

CoverageGrid difference_grid(const CoverageGrid& a, const std::vector<double>& b_dbm,
                             bool absolute) {
    CoverageGrid g;
    g.probes = a.probes;
    g.power_dbm.reserve(a.power_dbm.size());
    for (std::size_t i = 0; i < a.power_dbm.size(); ++i) {
        const double d = a.power_dbm[i] - b_dbm[i];
        g.power_dbm.push_back(absolute ? std::abs(d) : d);
    }
    return g;
}

json stats_json(const PowerStats& s) {
    json j;
    j["min_dbm"] = s.min_dbm;
    j["max_dbm"] = s.max_dbm;
    j["avg_dbm"] = s.avg_dbm;
    return j;
}

/// Diagnostic grid over the whole scene extent; probes inside buildings are
/// masked out of the solve and reported at the power floor.
struct DiagGrid {
    std::vector<Vec3> all;
    std::vector<std::size_t> outside;  // indices into `all` that get solved
    std::size_t nx = 0;
    std::size_t ny = 0;
};

DiagGrid make_diag_grid(const Scene& scene, double spacing, double height) {
    RegionOfInterest roi;
    roi.center = {0.5 * (scene.extent.min.x + scene.extent.max.x),
                  0.5 * (scene.extent.min.y + scene.extent.max.y)};
    roi.width_x = scene.extent.max.x - scene.extent.min.x;
    roi.width_y = scene.extent.max.y - scene.extent.min.y;
    roi.height = height;
    roi.spacing = spacing;
    roi.grid_mode = GridMode::cells;
    DiagGrid g;
    g.all = probe_points(roi);
    g.nx = probe_count_axis(roi.width_x, spacing, GridMode::cells);
    g.ny = probe_count_axis(roi.width_y, spacing, GridMode::cells);
    for (std::size_t i = 0; i < g.all.size(); ++i) {
        if (!point_in_building(scene, g.all[i])) g.outside.push_back(i);
    }
    return g;
}

std::vector<double> scatter_diag(const DiagGrid& g, const CoverageGrid& solved) {
    std::vector<double> full(g.all.size(), power_floor_dbm);
    for (std::size_t i = 0; i < g.outside.size(); ++i) {
        full[g.outside[i]] = solved.power_dbm[i];
    }
    return full;
}

const RegionOfInterest& single_roi(const RunConfig& cfg) {
    if (cfg.rois.size() != 1) {
        throw ValidationError("this command requires exactly one roi block (got " +
                              std::to_string(cfg.rois.size()) + ")");
    }
    return cfg.rois.front();
}

std::string terminated_name(Termination t) {
    return t == Termination::stagnation ? "stagnation" : "max_iterations";
}

json pso_settings_json(const PsoSettings& s, int n) {
    json j;
    j["swarm_size"] = s.swarm_size > 0 ? s.swarm_size : 2 * n;
    j["max_iterations"] = s.max_iterations;
    j["stagnation_window"] = s.stagnation_window;
    j["stagnation_threshold"] = s.stagnation_threshold;
    j["inertia"] = s.inertia;
    j["cognitive"] = s.cognitive;
    j["social"] = s.social;
    j["seed"] = s.seed;
    j["velocity_clamp"] = s.velocity_clamp;
    j["cost_domain"] = s.cost_domain == CostDomain::linear ? "linear" : "db";
    return j;
}

/// Full optimize-and-emit for one RoI against one database. Returns the
/// result and writes all artifacts under out_dir.
OptimizationResult optimize_case(const RunConfig& cfg, const RegionOfInterest& roi,
                                 const EpepDatabase& db, const std::string& out_dir,
                                 double dt_epep_s, bool diagnostic_maps) {
    fs::create_directories(out_dir);
    const std::uint64_t chash = config_fingerprint(cfg.array, cfg.solver);

    const ArrayConfig ideal =
        ideal_target_config(cfg.array, cfg.target_rows, cfg.target_cols, roi);
    const TargetDistribution target = make_target(ideal, db.probes, db.xi, cfg.rx_gain_dbi);

    OptimizationResult result =
        run_pso(db, cfg.array, target, cfg.pso, cfg.rx_gain_dbi, cfg.workers);
    auto baselines = evaluate_baselines(db, cfg.array, target, roi, cfg.pso.seed,
                                        cfg.rx_gain_dbi, cfg.pso.cost_domain);

    const int n = static_cast<int>(db.element_count());
    const double magnitude = cfg.array.power_scale * db.xi;
    const Excitations best_exc = make_excitations(n, magnitude, result.best_phases);
    const CoverageGrid opt_grid =
        received_power(total_field(db, best_exc), db.probes, db.frequency_hz, cfg.rx_gain_dbi);

    CoverageGrid target_grid;
    target_grid.probes = db.probes;
    target_grid.power_dbm = target.target_dbm;

    // RoI coverage, mismatch (Fig. 9 analog) and improvement (Fig. 10 analog)
    write_coverage_csv(target_grid, out_dir + "/target_roi.csv", chash);
    write_coverage_csv(opt_grid, out_dir + "/opt_roi.csv", chash);
    write_coverage_csv(baselines.at("uniform").coverage, out_dir + "/uniform_roi.csv", chash);
    write_coverage_csv(baselines.at("steered").coverage, out_dir + "/steered_roi.csv", chash);
    write_coverage_csv(baselines.at("random").coverage, out_dir + "/random_roi.csv", chash);
    write_coverage_csv(difference_grid(opt_grid, target.target_dbm, true),
                       out_dir + "/mismatch_opt_roi.csv", chash, "abs_mismatch_db");
    write_coverage_csv(difference_grid(baselines.at("uniform").coverage, target.target_dbm, true),
                       out_dir + "/mismatch_uniform_roi.csv", chash, "abs_mismatch_db");
    write_coverage_csv(difference_grid(baselines.at("steered").coverage, target.target_dbm, true),
                       out_dir + "/mismatch_steered_roi.csv", chash, "abs_mismatch_db");
    write_coverage_csv(
        difference_grid(opt_grid, baselines.at("uniform").coverage.power_dbm, false),
        out_dir + "/improvement_vs_uniform_roi.csv", chash, "delta_db");
    write_coverage_csv(
        difference_grid(opt_grid, baselines.at("steered").coverage.power_dbm, false),
        out_dir + "/improvement_vs_steered_roi.csv", chash, "delta_db");

    {
        std::ofstream conv(out_dir + "/convergence.csv", std::ios::binary);
        conv << "# config " << hex64(chash) << "\n";
        conv << "iteration,best_cost,normalized_percent\n";
        const double phi_uni = baselines.at("uniform").cost_value;
        for (std::size_t i = 0; i < result.cost_history.size(); ++i) {
            char line[96];
            std::snprintf(line, sizeof(line), "%zu,%.12g,%.6f\n", i, result.cost_history[i],
                          100.0 * result.cost_history[i] / phi_uni);
            conv << line;
        }
    }

    std::vector<StatRow> rows = {
        {"target", power_stats(target_grid)},
        {"optimized", power_stats(opt_grid)},
        {"uniform", baselines.at("uniform").stats},
        {"steered", baselines.at("steered").stats},
        {"random", baselines.at("random").stats},
    };
    write_stats_csv(rows, out_dir + "/stats.csv", chash);
    print_stats_table(rows);

    if (cfg.output.emit_heatmaps) {
        const std::size_t nx = probe_count_axis(roi.width_x, roi.spacing, roi.grid_mode);
        const std::size_t ny = probe_count_axis(roi.width_y, roi.spacing, roi.grid_mode);
        write_heatmap_ppm(opt_grid.power_dbm, nx, ny, out_dir + "/opt_roi.ppm");
        write_heatmap_ppm(target.target_dbm, nx, ny, out_dir + "/target_roi.ppm");
    }

    if (diagnostic_maps) {
        const DiagGrid diag =
            make_diag_grid(cfg.scene, cfg.output.diag_spacing, roi.height);
        std::vector<Vec3> outside;
        outside.reserve(diag.outside.size());
        for (auto i : diag.outside) outside.push_back(diag.all[i]);
        const EpepDatabase diag_db =
            build_database(cfg.scene, cfg.array, outside, cfg.solver, cfg.workers);
        const auto emit = [&](const PhaseVector& phases, const std::string& name) {
            const Excitations exc = make_excitations(n, magnitude, phases);
            const CoverageGrid g = received_power(total_field(diag_db, exc), outside,
                                                  diag_db.frequency_hz, cfg.rx_gain_dbi);
            CoverageGrid full;
            full.probes = diag.all;
            full.power_dbm = scatter_diag(diag, g);
            write_coverage_csv(full, out_dir + "/" + name + "_diag.csv", chash);
            if (cfg.output.emit_heatmaps) {
                write_heatmap_ppm(full.power_dbm, diag.nx, diag.ny,
                                  out_dir + "/" + name + "_diag.ppm");
            }
        };
        emit(result.best_phases, "opt");
        emit(baselines.at("uniform").phases, "uniform");
        emit(baselines.at("steered").phases, "steered");
    }

    json out;
    out["config_hash"] = hex64(chash);
    out["scene_hash"] = hex64(db.scene_hash);
    out["seed"] = cfg.pso.seed;
    out["xi"] = db.xi;
    out["delta"] = cfg.array.power_scale;
    out["zeta_max_w"] =
        cfg.array.power_scale * cfg.array.power_scale * cfg.array.max_radiated_power_w;
    out["beta_opt_rad"] = result.best_phases;
    out["phi"] = result.best_cost;
    out["phi_hat_percent"] = 100.0 * result.normalized_cost;
    out["iterations"] = result.iterations_run;
    out["terminated_by"] = terminated_name(result.terminated_by);
    out["stagnation_lhs"] = result.stagnation_lhs;
    out["evaluations"] = result.evaluations;
    out["cost_history"] = result.cost_history;
    json bl;
    for (const auto& [name, b] : baselines) {
        json bj;
        bj["phi"] = b.cost_value;
        bj["phi_hat_percent"] = 100.0 * b.normalized;
        bj["stats"] = stats_json(b.stats);
        bl[name] = bj;
    }
    out["baselines"] = bl;
    json st;
    for (const auto& r : rows) st[r.name] = stats_json(r.stats);
    out["stats"] = st;
    out["settings"] = pso_settings_json(cfg.pso, n);
    out["timing"] = {{"dt_epep_s", dt_epep_s},
                     {"dt_oss_s", result.time_pso_s},
                     {"dt_sav", result.time_saving}};
    std::ofstream rf(out_dir + "/result.json", std::ios::binary);
    rf << out.dump(2) << "\n";

    std::printf("phi(beta_opt) = %.6g, phi_hat = %.2f%%, iterations = %d (%s)\n",
                result.best_cost, 100.0 * result.normalized_cost, result.iterations_run,
                terminated_name(result.terminated_by).c_str());
    return result;
}

EpepDatabase load_checked_database(const RunConfig& cfg) {
    const std::string path = epep_db_path(cfg);
    if (!fs::exists(path)) {
        throw StaleDatabaseError("epep database not found at " + path +
                                 " (run build-epep first)");
    }
    EpepDatabase db = load_database(path);
    check_database(db, cfg.scene, cfg.array, cfg.solver);
    return db;
}

double read_build_seconds(const RunConfig& cfg) {
    const std::string path = cfg.output.dir + "/epep_build.json";
    if (!fs::exists(path)) return 0.0;
    std::ifstream in(path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.contains("seconds")) return 0.0;
    return j["seconds"].get<double>();
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("run config parse failure: ") + e.what());
    }
    try {
        RunConfig cfg;
        cfg.scene_path = j.at("scene").get<std::string>();
        if (!cfg.scene_path.empty() && cfg.scene_path.front() != '/' && !base_dir.empty()) {
            cfg.scene_path = base_dir + "/" + cfg.scene_path;
        }
        cfg.scene = load_scene(cfg.scene_path);

        const json& a = j.at("array");
        cfg.array.rows = a.at("rows").get<int>();
        cfg.array.cols = a.at("cols").get<int>();
        cfg.array.spacing_x = get_or(a, "spacing_x", 0.0);
        cfg.array.spacing_z = get_or(a, "spacing_z", 0.0);
        cfg.array.position = {a.at("position").at(0).get<double>(),
                              a.at("position").at(1).get<double>(),
                              a.at("position").at(2).get<double>()};
        cfg.array.azimuth_deg = get_or(a, "azimuth_deg", 0.0);
        cfg.array.downtilt_deg = get_or(a, "downtilt_deg", 0.0);
        cfg.array.frequency_hz = get_or(a, "frequency_hz", 3.5e9);
        if (a.contains("element_pattern")) {
            cfg.array.element_pattern = parse_pattern(a.at("element_pattern"));
        }
        cfg.array.max_radiated_power_w = get_or(a, "max_radiated_power_w", 20.0);
        cfg.array.power_scale = get_or(a, "power_scale", 1.0);
        if (a.contains("quadrature")) {
            cfg.array.quadrature.n_theta = get_or(a.at("quadrature"), "n_theta", 180);
            cfg.array.quadrature.n_phi = get_or(a.at("quadrature"), "n_phi", 360);
        }

        const json& rj = j.at("roi");
        if (rj.is_array()) {
            for (const auto& r : rj) cfg.rois.push_back(parse_roi(r, cfg.scene));
        } else {
            cfg.rois.push_back(parse_roi(rj, cfg.scene));
        }
        if (cfg.rois.empty()) throw ValidationError("at least one roi block is required");

        const json t = j.value("target", json::object());
        cfg.target_rows = get_or(t, "rows", cfg.array.rows);
        cfg.target_cols = get_or(t, "cols", cfg.array.cols + 1);

        const json s = j.value("solver", json::object());
        cfg.solver.max_reflections = get_or(s, "max_reflections", 2);
        cfg.solver.enable_ground = get_or(s, "enable_ground", true);
        cfg.solver.enable_transmission = get_or(s, "enable_transmission", false);
        cfg.solver.min_path_gain_db = get_or(s, "min_path_gain_db", -250.0);

        const json p = j.value("pso", json::object());
        cfg.pso.swarm_size = get_or(p, "swarm_size", 0);
        cfg.pso.max_iterations = get_or(p, "max_iterations", 1000);
        cfg.pso.stagnation_window = get_or(p, "stagnation_window", 100);
        cfg.pso.stagnation_threshold = get_or(p, "stagnation_threshold", 1e-3);
        cfg.pso.inertia = get_or(p, "inertia", 0.4);
        cfg.pso.cognitive = get_or(p, "cognitive", 2.0);
        cfg.pso.social = get_or(p, "social", 2.0);
        cfg.pso.seed = p.contains("seed") ? p.at("seed").get<std::uint64_t>() : 1;
        cfg.pso.velocity_clamp = get_or(p, "velocity_clamp", pi);

        const std::string domain = get_or(j, "cost_domain", std::string("linear"));
        if (domain == "linear") {
            cfg.pso.cost_domain = CostDomain::linear;
        } else if (domain == "db") {
            cfg.pso.cost_domain = CostDomain::db;
        } else {
            throw FormatError("cost_domain must be 'linear' or 'db'");
        }

        cfg.rx_gain_dbi = get_or(j, "receiver_gain_dbi", 0.0);
        if (j.contains("delta_sweep")) {
            for (const auto& d : j.at("delta_sweep")) cfg.delta_sweep.push_back(d.get<double>());
        }

        const json o = j.value("output", json::object());
        cfg.output.dir = get_or(o, "dir", std::string("out"));
        cfg.output.emit_heatmaps = get_or(o, "emit_heatmaps", false);
        cfg.output.diagnostic_maps = get_or(o, "diagnostic_maps", false);
        cfg.output.diag_spacing = get_or(o, "diag_spacing", 5.0);
        return cfg;
    } catch (const json::exception& e) {
        throw FormatError(std::string("run config parse failure: ") + e.what());
    }
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open run config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), fs::path(path).parent_path().string());
}

void apply_overrides(RunConfig& cfg, const CliOverrides& ov) {
    if (ov.seed) cfg.pso.seed = *ov.seed;
    if (ov.workers) cfg.workers = *ov.workers;
    if (ov.out_dir) cfg.output.dir = *ov.out_dir;
}

std::string epep_db_path(const RunConfig& cfg) { return cfg.output.dir + "/epep.epepdb"; }

int cmd_validate(const RunConfig& cfg) {
    std::vector<std::string> errors;
    const auto check = [&](const auto& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            errors.emplace_back(e.what());
        }
    };
    check([&] { validate_array(cfg.array); });
    check([&] { validate_solver(cfg.solver); });
    check([&] { validate_pso(cfg.pso, cfg.array.count()); });
    for (std::size_t i = 0; i < cfg.rois.size(); ++i) {
        check([&] {
            const auto pts = probe_points(cfg.rois[i]);
            if (pts.empty()) throw ValidationError("roi " + std::to_string(i) + " has no probes");
            validate_roi(cfg.scene, cfg.rois[i]);
        });
    }
    check([&] {
        if (cfg.target_rows * cfg.target_cols <= cfg.array.count()) {
            throw ValidationError("target array must have more elements than the BTS array");
        }
    });
    if (errors.empty()) {
        std::printf("0 errors\n");
        return 0;
    }
    for (const auto& e : errors) std::printf("error: %s\n", e.c_str());
    std::printf("%zu error(s)\n", errors.size());
    return 1;
}

int cmd_build_epep(const RunConfig& cfg) {
    const RegionOfInterest& roi = single_roi(cfg);
    validate_roi(cfg.scene, roi);
    const auto probes = probe_points(roi);
    BuildTiming timing;
    const EpepDatabase db =
        build_database(cfg.scene, cfg.array, probes, cfg.solver, cfg.workers, &timing);
    fs::create_directories(cfg.output.dir);
    save_database(db, epep_db_path(cfg));
    json t;
    t["seconds"] = timing.seconds;
    t["elements"] = db.element_count();
    t["probes"] = db.probe_count();
    t["config_hash"] = hex64(db.config_hash);
    std::ofstream out(cfg.output.dir + "/epep_build.json", std::ios::binary);
    out << t.dump(2) << "\n";
    std::printf("built %zu x %zu epep database in %.2f s -> %s\n", db.element_count(),
                db.probe_count(), timing.seconds, epep_db_path(cfg).c_str());
    return 0;
}

int cmd_target(const RunConfig& cfg) {
    const RegionOfInterest& roi = single_roi(cfg);
    validate_roi(cfg.scene, roi);
    const auto probes = probe_points(roi);
    const double xi = normalize_magnitude(cfg.array);
    const ArrayConfig ideal =
        ideal_target_config(cfg.array, cfg.target_rows, cfg.target_cols, roi);
    const TargetDistribution target = make_target(ideal, probes, xi, cfg.rx_gain_dbi);
    CoverageGrid grid;
    grid.probes = probes;
    grid.power_dbm = target.target_dbm;
    fs::create_directories(cfg.output.dir);
    write_coverage_csv(grid, cfg.output.dir + "/target_roi.csv",
                       config_fingerprint(cfg.array, cfg.solver));
    print_stats_table({{"target", power_stats(grid)}});
    return 0;
}

int cmd_optimize(const RunConfig& cfg) {
    const RegionOfInterest& roi = single_roi(cfg);
    validate_roi(cfg.scene, roi);
    const EpepDatabase db = load_checked_database(cfg);
    optimize_case(cfg, roi, db, cfg.output.dir, read_build_seconds(cfg),
                  cfg.output.diagnostic_maps);
    return 0;
}

int cmd_sweep_delta(const RunConfig& cfg) {
    const RegionOfInterest& roi = single_roi(cfg);
    validate_roi(cfg.scene, roi);
    if (cfg.delta_sweep.empty()) throw ValidationError("delta_sweep list is empty");
    for (double d : cfg.delta_sweep) {
        if (!(d >= 1.0)) throw ValidationError("delta_sweep entries must be >= 1");
    }
    const EpepDatabase db = load_checked_database(cfg);
    const double dt_epep = read_build_seconds(cfg);

    std::ofstream summary(cfg.output.dir + "/sweep_delta.csv", std::ios::binary);
    summary << "# config " << hex64(config_fingerprint(cfg.array, cfg.solver)) << "\n";
    summary << "delta,zeta_max_w,phi_opt,phi_hat_percent,min_dbm,max_dbm,avg_dbm\n";
    for (double delta : cfg.delta_sweep) {
        RunConfig c = cfg;
        c.array.power_scale = delta;
        char name[48];
        std::snprintf(name, sizeof(name), "delta_%g", delta);
        const std::string sub = cfg.output.dir + "/" + name;
        std::printf("-- delta = %g --\n", delta);
        const OptimizationResult r = optimize_case(c, roi, db, sub, dt_epep, false);
        const Excitations exc = make_excitations(static_cast<int>(db.element_count()),
                                                 delta * db.xi, r.best_phases);
        const CoverageGrid g =
            received_power(total_field(db, exc), db.probes, db.frequency_hz, cfg.rx_gain_dbi);
        const PowerStats st = power_stats(g);
        char line[192];
        std::snprintf(line, sizeof(line), "%g,%g,%.10g,%.4f,%.4f,%.4f,%.4f\n", delta,
                      delta * delta * cfg.array.max_radiated_power_w, r.best_cost,
                      100.0 * r.normalized_cost, st.min_dbm, st.max_dbm, st.avg_dbm);
        summary << line;
    }
    return 0;
}

int cmd_sweep_roi(const RunConfig& cfg) {
    if (cfg.rois.empty()) throw ValidationError("sweep-roi requires at least one roi block");
    for (std::size_t i = 0; i < cfg.rois.size(); ++i) {
        const RegionOfInterest& roi = cfg.rois[i];
        validate_roi(cfg.scene, roi);
        const auto probes = probe_points(roi);
        BuildTiming timing;
        const EpepDatabase db =
            build_database(cfg.scene, cfg.array, probes, cfg.solver, cfg.workers, &timing);
        const std::string sub = cfg.output.dir + "/roi_" + std::to_string(i);
        std::printf("-- roi %zu (M = %zu) --\n", i, probes.size());
        optimize_case(cfg, roi, db, sub, timing.seconds, false);
    }
    return 0;
}

int cmd_report(const RunConfig& cfg) {
    const std::string path = cfg.output.dir + "/result.json";
    std::ifstream in(path);
    if (!in) throw FormatError("no result.json under " + cfg.output.dir + "; run optimize first");
    json j = json::parse(in);
    std::printf("config  %s  seed %llu\n", j["config_hash"].get<std::string>().c_str(),
                static_cast<unsigned long long>(j["seed"].get<std::uint64_t>()));
    std::printf("phi = %.6g  phi_hat = %.2f%%  iterations = %d (%s)\n",
                j["phi"].get<double>(), j["phi_hat_percent"].get<double>(),
                j["iterations"].get<int>(), j["terminated_by"].get<std::string>().c_str());
    std::printf("dt_epep = %.2f s  dt_oss = %.2f s  dt_sav = %.4f%%\n",
                j["timing"]["dt_epep_s"].get<double>(), j["timing"]["dt_oss_s"].get<double>(),
                100.0 * j["timing"]["dt_sav"].get<double>());
    std::vector<StatRow> rows;
    for (const auto& [name, st] : j["stats"].items()) {
        rows.push_back({name,
                        {st["min_dbm"].get<double>(), st["max_dbm"].get<double>(),
                         st["avg_dbm"].get<double>()}});
    }
    print_stats_table(rows);
    return 0;
}

}  // namespace oss
