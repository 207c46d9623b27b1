#include "oss/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "oss/constants.hpp"
#include "oss/errors.hpp"
#include "oss/parallel.hpp"
#include "oss/rng.hpp"

namespace oss {
namespace {

using namespace oss::constants;

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double cost_from_powers(const std::vector<double>& achieved_mw,
                        const std::vector<double>& achieved_dbm,
                        const TargetDistribution& target, CostDomain domain) {
    const std::size_t m = target.probes.size();
    double acc = 0.0;
    if (domain == CostDomain::linear) {
        for (std::size_t i = 0; i < m; ++i) {
            acc += std::abs(achieved_mw[i] - target.target_mw[i]) / std::abs(target.target_mw[i]);
        }
    } else {
        for (std::size_t i = 0; i < m; ++i) {
            acc += std::abs(achieved_dbm[i] - target.target_dbm[i]) /
                   std::abs(target.target_dbm[i]);
        }
    }
    return acc / static_cast<double>(m);
}

double evaluate_cost(const EpepDatabase& db, const Excitations& exc,
                     const TargetDistribution& target, double rx_gain_dbi, CostDomain domain) {
    const auto fields = total_field(db, exc);
    const double g_rx = std::pow(10.0, rx_gain_dbi / 10.0);
    std::vector<double> mw(fields.size());
    std::vector<double> dbm(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const double w = power_watts(fields[i], db.frequency_hz, g_rx);
        mw[i] = w * 1e3;
        dbm[i] = watts_to_dbm(w);
    }
    return cost_from_powers(mw, dbm, target, domain);
}

// tag separating init draws from per-iteration update draws
constexpr std::uint64_t kInitTag = 0xFFFFFFFFFFFFFFFFULL;

}  // namespace

void validate_pso(const PsoSettings& s, int n) {
    (void)n;
    if (s.swarm_size != 0 && s.swarm_size < 2) throw ValidationError("swarm_size must be >= 2");
    if (!(s.inertia > 0.0 && s.inertia < 1.0)) throw ValidationError("inertia must be in (0, 1)");
    if (!(s.cognitive > 0.0 && s.social > 0.0)) {
        throw ValidationError("cognitive/social coefficients must be > 0");
    }
    if (s.stagnation_window >= s.max_iterations) {
        throw ValidationError("stagnation_window must be < max_iterations");
    }
    if (!(s.velocity_clamp > 0.0)) throw ValidationError("velocity_clamp must be > 0");
}

TargetDistribution make_target(const ArrayConfig& ideal_cfg, const std::vector<Vec3>& probes,
                               double xi, double rx_gain_dbi) {
    const int n = ideal_cfg.count();
    const Excitations exc =
        make_excitations(n, xi, PhaseVector(static_cast<std::size_t>(n), 0.0));
    const auto fields = free_space_field(ideal_cfg, exc, probes);
    const auto grid = received_power(fields, probes, ideal_cfg.frequency_hz, rx_gain_dbi);
    TargetDistribution t;
    t.probes = probes;
    t.target_dbm = grid.power_dbm;
    t.target_mw.reserve(probes.size());
    for (std::size_t i = 0; i < probes.size(); ++i) {
        if (grid.power_dbm[i] <= power_floor_dbm) {
            throw ValidationError("target power at probe " + std::to_string(i) +
                                  " is at the floor; the ideal array must illuminate the RoI");
        }
        t.target_mw.push_back(dbm_to_mw(grid.power_dbm[i]));
    }
    return t;
}

double cost(const EpepDatabase& db, const Excitations& exc, const TargetDistribution& target,
            double rx_gain_dbi, CostDomain domain) {
    if (target.probes.size() != db.probe_count()) {
        throw ValidationError("target probe list does not match database probes");
    }
    return evaluate_cost(db, exc, target, rx_gain_dbi, domain);
}

double normalized_cost(double phi, double phi_uniform) {
    if (!(phi_uniform > 0.0)) throw ValidationError("uniform-phase cost must be > 0");
    return phi / phi_uniform;
}

double time_saving(std::size_t swarm_size, std::size_t iterations_evaluated, int n_elements) {
    const double total = static_cast<double>(swarm_size * iterations_evaluated);
    if (!(total > 0.0)) throw ValidationError("time_saving: no evaluations");
    return (total - static_cast<double>(n_elements)) / total;
}

std::pair<double, double> steering_direction(const ArrayConfig& cfg, Vec3 world_point) {
    const Vec3 d = world_to_local_dir(cfg, normalized(world_point - cfg.position));
    const double theta = rad2deg(std::acos(std::clamp(d.z, -1.0, 1.0)));
    const double phi = rad2deg(std::atan2(d.y, d.x));
    return {theta, phi};
}

OptimizationResult run_pso(const EpepDatabase& db, const ArrayConfig& cfg,
                           const TargetDistribution& target, const PsoSettings& settings,
                           double rx_gain_dbi, unsigned workers) {
    const auto t0 = std::chrono::steady_clock::now();
    const int n = static_cast<int>(db.element_count());
    validate_pso(settings, n);
    if (target.probes.size() != db.probe_count()) {
        throw ValidationError("target probe list does not match database probes");
    }
    const int k_particles = settings.swarm_size > 0 ? settings.swarm_size : 2 * n;
    const double magnitude = cfg.power_scale * db.xi;

    std::vector<PhaseVector> pos(static_cast<std::size_t>(k_particles));
    std::vector<std::vector<double>> vel(static_cast<std::size_t>(k_particles));
    for (int k = 0; k < k_particles; ++k) {
        RandomStream rng(settings.seed, static_cast<std::uint64_t>(k), kInitTag);
        auto& p = pos[static_cast<std::size_t>(k)];
        auto& v = vel[static_cast<std::size_t>(k)];
        p.resize(static_cast<std::size_t>(n));
        v.resize(static_cast<std::size_t>(n));
        for (int d = 0; d < n; ++d) p[static_cast<std::size_t>(d)] = rng.next_double(0.0, two_pi);
        for (int d = 0; d < n; ++d) {
            v[static_cast<std::size_t>(d)] =
                rng.next_double(-settings.velocity_clamp, settings.velocity_clamp);
        }
    }

    std::vector<PhaseVector> pbest = pos;
    std::vector<double> pbest_cost(static_cast<std::size_t>(k_particles),
                                   std::numeric_limits<double>::infinity());
    PhaseVector gbest;
    double gbest_cost = std::numeric_limits<double>::infinity();

    OptimizationResult result;
    std::vector<double> costs(static_cast<std::size_t>(k_particles));

    for (int i = 0; i <= settings.max_iterations; ++i) {
        parallel_for(static_cast<std::size_t>(k_particles), workers, [&](std::size_t k) {
            const Excitations exc = make_excitations(n, magnitude, pos[k]);
            costs[k] = evaluate_cost(db, exc, target, rx_gain_dbi, settings.cost_domain);
        });
        result.evaluations += static_cast<std::size_t>(k_particles);

        for (int k = 0; k < k_particles; ++k) {
            const auto ks = static_cast<std::size_t>(k);
            if (costs[ks] < pbest_cost[ks]) {  // strict improvement keeps the incumbent on ties
                pbest_cost[ks] = costs[ks];
                pbest[ks] = pos[ks];
            }
            if (costs[ks] < gbest_cost) {
                gbest_cost = costs[ks];
                gbest = pos[ks];
            }
        }
        result.cost_history.push_back(gbest_cost);
        result.iterations_run = i;

        if (i == settings.max_iterations) {
            result.terminated_by = Termination::max_iterations;
            break;
        }
        if (i >= settings.stagnation_window) {
            const int w = settings.stagnation_window;
            double window_sum = 0.0;
            for (int j = 1; j <= w; ++j) {
                window_sum += result.cost_history[static_cast<std::size_t>(i - j)];
            }
            if (gbest_cost <= 0.0) {
                result.stagnation_lhs = 0.0;
                result.terminated_by = Termination::stagnation;
                break;
            }
            const double lhs = std::abs(w * gbest_cost - window_sum) / gbest_cost;
            if (lhs <= settings.stagnation_threshold) {
                result.stagnation_lhs = lhs;
                result.terminated_by = Termination::stagnation;
                break;
            }
        }

        // velocity/position update; randomness keyed by (seed, particle, iteration)
        for (int k = 0; k < k_particles; ++k) {
            const auto ks = static_cast<std::size_t>(k);
            RandomStream rng(settings.seed, static_cast<std::uint64_t>(k),
                             static_cast<std::uint64_t>(i));
            for (int d = 0; d < n; ++d) {
                const auto ds = static_cast<std::size_t>(d);
                const double u1 = rng.next_double();
                const double u2 = rng.next_double();
                double v = settings.inertia * vel[ks][ds] +
                           settings.cognitive * u1 * (pbest[ks][ds] - pos[ks][ds]) +
                           settings.social * u2 * (gbest[ds] - pos[ks][ds]);
                v = std::clamp(v, -settings.velocity_clamp, settings.velocity_clamp);
                vel[ks][ds] = v;
                pos[ks][ds] = wrap_phase(pos[ks][ds] + v);
            }
        }
    }

    result.best_phases = gbest;
    for (auto& b : result.best_phases) b = wrap_phase(b);
    result.best_cost = gbest_cost;

    const Excitations uni = make_excitations(
        n, magnitude, PhaseVector(static_cast<std::size_t>(n), 0.0));
    const double phi_uni = evaluate_cost(db, uni, target, rx_gain_dbi, settings.cost_domain);
    // degenerate landscape: uniform phases already meet the target exactly
    result.normalized_cost =
        phi_uni > 0.0 ? normalized_cost(result.best_cost, phi_uni) : 1.0;

    const std::size_t iters_evaluated = result.evaluations / static_cast<std::size_t>(k_particles);
    result.time_saving = time_saving(static_cast<std::size_t>(k_particles), iters_evaluated, n);
    result.time_pso_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

std::map<std::string, BaselineResult> evaluate_baselines(const EpepDatabase& db,
                                                         const ArrayConfig& cfg,
                                                         const TargetDistribution& target,
                                                         const RegionOfInterest& roi,
                                                         std::uint64_t seed,
                                                         double rx_gain_dbi, CostDomain domain) {
    const int n = static_cast<int>(db.element_count());
    const double magnitude = cfg.power_scale * db.xi;

    const Vec3 barycenter{roi.center.x, roi.center.y, roi.height};
    const auto [theta_s, phi_s] = steering_direction(cfg, barycenter);

    std::map<std::string, BaselineResult> out;
    const std::vector<std::pair<std::string, PhaseVector>> cases = {
        {"uniform", uniform_phases(cfg)},
        {"steered", steering_phases(cfg, theta_s, phi_s)},
        {"random", random_phases(cfg, seed)},
    };
    double phi_uni = 0.0;
    for (const auto& [name, phases] : cases) {
        BaselineResult r;
        r.phases = phases;
        const Excitations exc = make_excitations(n, magnitude, phases);
        r.cost_value = cost(db, exc, target, rx_gain_dbi, domain);
        const auto fields = total_field(db, exc);
        r.coverage = received_power(fields, db.probes, db.frequency_hz, rx_gain_dbi);
        r.stats = power_stats(r.coverage);
        if (name == "uniform") phi_uni = r.cost_value;
        out.emplace(name, std::move(r));
    }
    for (auto& [name, r] : out) r.normalized = normalized_cost(r.cost_value, phi_uni);
    return out;
}

}  // namespace oss
