#include <CLI11.hpp>

#include "wmh2/harness.hpp"

using namespace wmh2;

int main(int argc, char** argv) {
    CLI::App app{"wmh2: pseudo-spectral wave maps R^{3+1} -> H^2 verification toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_override, run_dir;
    std::int64_t seed_override = -1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration file (key = value)");
        sub->add_option("--seed", seed_override, "override the config seed");
        sub->add_option("--out", out_override, "override the output directory");
    };
    CLI::App* verify = app.add_subcommand("verify", "exact identity and multiplier algebra suite");
    CLI::App* simulate = app.add_subcommand("simulate", "evolve small-data wave map, dump snapshots");
    CLI::App* analyze = app.add_subcommand("analyze", "envelopes, S[k] diagnostics, gauge-change table");
    CLI::App* scan = app.add_subcommand("scan", "Bernstein / null-form decay / crux scans");
    for (auto* sub : {verify, simulate, analyze, scan}) add_common(sub);
    analyze->add_option("--run", run_dir, "directory holding snap_* dumps (default: out_dir)");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (seed_override >= 0) cfg.seed = std::uint64_t(seed_override);
        if (!out_override.empty()) cfg.out_dir = out_override;
        solver_grid(cfg).validate();

        if (*verify) return cmd_verify(cfg);
        if (*simulate) return cmd_simulate(cfg);
        if (*analyze) return cmd_analyze(cfg, run_dir.empty() ? cfg.out_dir : run_dir);
        if (*scan) return cmd_scan(cfg);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::out_of_range& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
