// oss: scene-aware phase-only array synthesis driver.
//
// Exit codes: 0 success, 1 validation/config failure, 2 stale or corrupt
// pattern database, 3 runtime error.
#include <cstdio>
#include <exception>
#include <functional>
#include <string>

#include <CLI11.hpp>

#include "oss/errors.hpp"
#include "oss/pipeline.hpp"

namespace {

struct CommonArgs {
    std::string config;
    oss::CliOverrides overrides;
    std::uint64_t seed = 0;
    unsigned workers = 0;
    std::string out_dir;
};

void attach_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("--config", args.config, "run configuration JSON")->required();
    sub->add_option("--seed", args.seed, "override optimizer seed");
    sub->add_option("--workers", args.workers, "worker thread count");
    sub->add_option("--out", args.out_dir, "override output directory");
}

int dispatch(const CommonArgs& args, CLI::App* sub,
             const std::function<int(const oss::RunConfig&)>& fn) {
    try {
        oss::RunConfig cfg = oss::load_run_config(args.config);
        oss::CliOverrides ov;
        if (sub->count("--seed")) ov.seed = args.seed;
        if (sub->count("--workers")) ov.workers = args.workers;
        if (sub->count("--out")) ov.out_dir = args.out_dir;
        oss::apply_overrides(cfg, ov);
        return fn(cfg);
    } catch (const oss::StaleDatabaseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const oss::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const oss::FormatError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"opportunistic source synthesis: pattern database + phase-only PSO"};
    app.require_subcommand(1);

    struct Cmd {
        const char* name;
        const char* help;
        int (*fn)(const oss::RunConfig&);
    };
    const Cmd cmds[] = {
        {"validate", "check scene, array, RoI and optimizer settings", oss::cmd_validate},
        {"build-epep", "trace per-element patterns over the RoI and save the database",
         oss::cmd_build_epep},
        {"target", "emit the ideal free-space target distribution", oss::cmd_target},
        {"optimize", "run the phase-only PSO against a built database", oss::cmd_optimize},
        {"sweep-delta", "re-optimize across the power-scale sweep list", oss::cmd_sweep_delta},
        {"sweep-roi", "rebuild + optimize for each configured RoI", oss::cmd_sweep_roi},
        {"report", "print a summary of an existing optimization result", oss::cmd_report},
    };

    std::vector<std::pair<CLI::App*, const Cmd*>> subs;
    std::vector<std::unique_ptr<CommonArgs>> args_store;
    for (const auto& c : cmds) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        args_store.push_back(std::make_unique<CommonArgs>());
        attach_common(sub, *args_store.back());
        subs.emplace_back(sub, &c);
    }

    CLI11_PARSE(app, argc, argv);

    for (std::size_t i = 0; i < subs.size(); ++i) {
        if (subs[i].first->parsed()) {
            return dispatch(*args_store[i], subs[i].first, subs[i].second->fn);
        }
    }
    return 1;
}
