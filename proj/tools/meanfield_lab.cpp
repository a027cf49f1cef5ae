// meanfield-lab: configuration-driven experiments on the N-boson /
// focusing-NLS laboratory. One subcommand per experiment; every run echoes
// its configuration and writes deterministic CSV/JSON outputs.
//
// Exit codes: 0 all assertions hold, 2 a verdict or trend assertion failed,
// 3 infrastructure error (bad config, I/O, solver breakdown).

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <meanfield/experiments.hpp>

int main(int argc, char** argv) {
    CLI::App app{"meanfield-lab: desk-scale many-body / NLS experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed_override = 0;
    bool have_seed = false;
    int threads = 1;

    for (const auto& name : meanfield::experiment_names()) {
        auto* sub = app.add_subcommand(name, "run the '" + name + "' experiment");
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed_override, "override the config seed")
            ->each([&](const std::string&) { have_seed = true; });
        sub->add_option("--threads", threads, "worker cap (all computation is single-threaded; 1 guarantees determinism)")
            ->check(CLI::PositiveNumber);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        auto cfg = meanfield::experiment_config::load(config_path);
        const std::string sub = app.get_subcommands().front()->get_name();
        if (cfg.experiment != sub)
            throw std::runtime_error("config experiment '" + cfg.experiment +
                                     "' does not match subcommand '" + sub + "'");
        if (have_seed) cfg.parameters["seed"] = seed_override;
        auto report = meanfield::run_experiment(cfg, out_dir);
        std::cout << "experiment " << cfg.experiment << " finished in " << report.wall_time_s
                  << " s; report written to " << out_dir << "/report.json\n";
        if (!report.ok()) {
            for (const auto& f : report.failures) std::cout << "verdict failure: " << f << "\n";
            return 2;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
