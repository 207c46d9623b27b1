#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oss/array.hpp"
#include "oss/optimize.hpp"
#include "oss/raytrace.hpp"
#include "oss/scene.hpp"

namespace oss {

struct OutputSettings {
    std::string dir = "out";
    bool emit_heatmaps = false;
    bool diagnostic_maps = true;
    double diag_spacing = 5.0;  // [m]
};

/// One reproducibility artifact per run: scene reference, array, RoI(s),
/// solver and PSO settings, output layout.
struct RunConfig {
    std::string scene_path;
    Scene scene;
    ArrayConfig array;
    std::vector<RegionOfInterest> rois;
    int target_rows = 0;
    int target_cols = 0;
    SolverSettings solver;
    PsoSettings pso;
    double rx_gain_dbi = 0.0;
    std::vector<double> delta_sweep;
    OutputSettings output;
    unsigned workers = 1;
};

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir);

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<std::string> out_dir;
};

void apply_overrides(RunConfig& cfg, const CliOverrides& ov);

// Exit codes: 0 success, 1 validation failure, 2 stale/corrupt database,
// 3 runtime error.
int cmd_validate(const RunConfig& cfg);
int cmd_build_epep(const RunConfig& cfg);
int cmd_target(const RunConfig& cfg);
int cmd_optimize(const RunConfig& cfg);
int cmd_sweep_delta(const RunConfig& cfg);
int cmd_sweep_roi(const RunConfig& cfg);
int cmd_report(const RunConfig& cfg);

std::string epep_db_path(const RunConfig& cfg);

}  // namespace oss
