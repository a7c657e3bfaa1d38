#include "coral/config.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"coral: offline RL with marginalized importance sampling and "
                 "augmented-Lagrangian saddle solvers"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed_override = 0;
    bool seed_given = false;
    std::string out_override;

    const auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("--config", config_path, "path to the run config JSON");
        if (config_required) opt->required();
        sub->add_option("--seed", seed_override, "master seed override")
            ->each([&](const std::string&) { seed_given = true; });
        sub->add_option("--out", out_override, "output directory override");
    };

    auto* gen = app.add_subcommand("gen", "sample and persist datasets");
    auto* solve = app.add_subcommand("solve", "solve the empirical saddle problem");
    auto* eval = app.add_subcommand("eval", "score a solution against the exact plan");
    auto* exp = app.add_subcommand("exp", "run a named experiment");
    auto* selftest = app.add_subcommand("selftest", "run the invariant suites");
    for (auto* sub : {gen, solve, eval, exp}) add_common(sub, true);
    add_common(selftest, false);

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    coral::RunConfig cfg;
    if (command != "selftest") {
        try {
            cfg = coral::load_config(config_path);
        } catch (const std::exception& e) {
            std::cout << "error category=config message=" << e.what() << "\n";
            return coral::kExitConfig;
        }
    }
    if (seed_given) cfg.seed = seed_override;
    if (!out_override.empty()) cfg.out_dir = out_override;

    return coral::run_command(command, cfg, std::cout);
}
