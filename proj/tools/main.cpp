#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "commands.hpp"

using namespace ghzclock::cli;

int main(int argc, char** argv) {
    CLI::App app{"Clock stabilization protocols: Monte Carlo campaigns and analytic predictions"};
    app.fallthrough();
    std::string config_path, out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    app.add_option("--config", config_path, "scenario file (YAML)");
    app.add_option("--seed", seed, "override the configured seed");
    app.add_option("--threads", threads, "cap on worker threads (0 = all cores)");
    app.add_option("--out", out, "output CSV path (default: config output, else stdout)");
    app.require_subcommand(1, 1);
    auto* sim = app.add_subcommand("simulate", "Monte Carlo campaigns over the tau grid");
    auto* pred = app.add_subcommand("predict", "analytic stability curves and rate decomposition");
    auto* fig = app.add_subcommand("fig1", "merged Monte Carlo and theory table, SQL-normalized");
    auto* swp = app.add_subcommand("sweep", "Monte Carlo over a Ramsey-time grid at each tau");
    auto* self = app.add_subcommand("selftest", "run the built-in oracle checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (self->parsed()) {
            std::uint64_t s = seed.value_or(1);
            std::cerr << "seed: " << s << '\n';
            return selftest(s, std::cout) == 0 ? 0 : 1;
        }
        if (config_path.empty()) {
            std::cerr << "error: --config is required\n";
            return 2;
        }
        ScenarioConfig cfg = load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (threads) cfg.threads = *threads;
        if (!out.empty()) cfg.output = out;
        std::cerr << "seed: " << cfg.seed << '\n';

        CsvTable table({});
        if (sim->parsed()) table = simulate_table(cfg, std::cerr);
        else if (pred->parsed()) table = predict_table(cfg, std::cerr);
        else if (fig->parsed()) table = fig1_table(cfg, std::cerr);
        else if (swp->parsed()) table = sweep_table(cfg, std::cerr);
        write_atomic(cfg.output, table.str());
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
