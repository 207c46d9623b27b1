#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oss/array.hpp"
#include "oss/raytrace.hpp"
#include "oss/scene.hpp"
#include "oss/vec.hpp"

namespace oss {

/// Database of per-element embedded-plus-environment field patterns: for each
/// element n and probe m the complex 3-component field of element n radiating
/// alone in the scene. Immutable after build.
struct EpepDatabase {
    std::uint64_t scene_hash = 0;
    std::uint64_t config_hash = 0;
    double frequency_hz = 0.0;
    double xi = 0.0;  // uniform excitation magnitude from the power budget
    SolverSettings settings;
    std::vector<Vec3> probes;              // M
    std::vector<std::vector<CVec3>> fields;  // N x M

    std::size_t element_count() const { return fields.size(); }
    std::size_t probe_count() const { return probes.size(); }
};

struct CoverageGrid {
    std::vector<Vec3> probes;
    std::vector<double> power_dbm;
};

struct PowerStats {
    double min_dbm = 0.0;
    double max_dbm = 0.0;
    double avg_dbm = 0.0;  // mean taken over linear milliwatts
};

std::uint64_t scene_fingerprint(const Scene& scene);
std::uint64_t config_fingerprint(const ArrayConfig& cfg, const SolverSettings& settings);

struct BuildTiming {
    double seconds = 0.0;
};

EpepDatabase build_database(const Scene& scene, const ArrayConfig& cfg,
                            const std::vector<Vec3>& probes, const SolverSettings& settings,
                            unsigned workers = 1, BuildTiming* timing = nullptr);

/// Superposition reconstruction: E(r_m) = sum_n alpha_n e^{j beta_n} E^(n)(r_m).
std::vector<CVec3> total_field(const EpepDatabase& db, const Excitations& exc);

double power_watts(const CVec3& field, double frequency_hz, double rx_gain_linear);
double watts_to_dbm(double watts);

CoverageGrid received_power(const std::vector<CVec3>& fields, const std::vector<Vec3>& probes,
                            double frequency_hz, double rx_gain_dbi = 0.0);

PowerStats power_stats(const CoverageGrid& grid);

void save_database(const EpepDatabase& db, const std::string& path);
EpepDatabase load_database(const std::string& path);

/// Re-validates a loaded database against the current scene/config.
void check_database(const EpepDatabase& db, const Scene& scene, const ArrayConfig& cfg,
                    const SolverSettings& settings);

void write_coverage_csv(const CoverageGrid& grid, const std::string& path,
                        std::uint64_t config_hash, const std::string& value_name = "power_dbm");

}  // namespace oss
