#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "oss/array.hpp"
#include "oss/epep.hpp"

namespace oss {

enum class CostDomain { linear, db };

/// Target received power over the RoI probes, from the ideal free-space array.
struct TargetDistribution {
    std::vector<Vec3> probes;
    std::vector<double> target_dbm;
    std::vector<double> target_mw;
};

struct PsoSettings {
    int swarm_size = 0;  // 0 means 2N
    int max_iterations = 1000;
    int stagnation_window = 100;
    double stagnation_threshold = 1e-3;
    double inertia = 0.4;
    double cognitive = 2.0;
    double social = 2.0;
    std::uint64_t seed = 1;
    double velocity_clamp = 3.14159265358979323846;  // radians per iteration
    CostDomain cost_domain = CostDomain::linear;
};

void validate_pso(const PsoSettings& settings, int n);

enum class Termination { stagnation, max_iterations };

struct OptimizationResult {
    PhaseVector best_phases;
    double best_cost = 0.0;
    double normalized_cost = 0.0;  // vs uniform, fraction (1.0 = 100%)
    std::vector<double> cost_history;  // global best per iteration (index 0 = init)
    int iterations_run = 0;
    Termination terminated_by = Termination::max_iterations;
    double stagnation_lhs = 0.0;  // Eq.(18) left side at termination
    std::size_t evaluations = 0;  // K * iterations actually evaluated
    double time_pso_s = 0.0;
    double time_saving = 0.0;
};

TargetDistribution make_target(const ArrayConfig& ideal_cfg, const std::vector<Vec3>& probes,
                               double xi, double rx_gain_dbi = 0.0);

/// Mean relative power mismatch over the RoI probes.
double cost(const EpepDatabase& db, const Excitations& exc, const TargetDistribution& target,
            double rx_gain_dbi = 0.0, CostDomain domain = CostDomain::linear);

double normalized_cost(double phi, double phi_uniform);

/// ((K*I) - N) / (K*I): fraction of forward-solver runs avoided by the
/// database-backed evaluation.
double time_saving(std::size_t swarm_size, std::size_t iterations_evaluated, int n_elements);

OptimizationResult run_pso(const EpepDatabase& db, const ArrayConfig& cfg,
                           const TargetDistribution& target, const PsoSettings& settings,
                           double rx_gain_dbi = 0.0, unsigned workers = 1);

struct BaselineResult {
    PhaseVector phases;
    double cost_value = 0.0;
    double normalized = 0.0;
    CoverageGrid coverage;
    PowerStats stats;
};

/// Uniform, steered (toward the RoI barycenter), and seeded-random baselines.
std::map<std::string, BaselineResult> evaluate_baselines(const EpepDatabase& db,
                                                         const ArrayConfig& cfg,
                                                         const TargetDistribution& target,
                                                         const RegionOfInterest& roi,
                                                         std::uint64_t seed,
                                                         double rx_gain_dbi = 0.0,
                                                         CostDomain domain = CostDomain::linear);

/// Steering direction (theta_s, phi_s in the array local spherical frame,
/// degrees) toward a world point.
std::pair<double, double> steering_direction(const ArrayConfig& cfg, Vec3 world_point);

}  // namespace oss
