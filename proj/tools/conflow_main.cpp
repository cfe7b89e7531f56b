#include <CLI11.hpp>
#include <iostream>

#include "conflow/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Contraction-metric construction and certification for gradient flows"};
    app.require_subcommand(1);

    std::string config_path, out_dir, pipeline;
    std::optional<std::uint64_t> seed;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "run configuration (JSON)")
            ->required();
        cmd->add_option("--out", out_dir, "output directory root");
        cmd->add_option("--seed", seed, "override the configured seed");
        cmd->add_option("--pipeline", pipeline, "override the configured pipeline");
    };
    auto* analyze = app.add_subcommand(
        "analyze", "gradient-dominance and curvature certificates");
    auto* certify = app.add_subcommand(
        "certify", "construct a metric and certify contraction regions");
    auto* simulate = app.add_subcommand(
        "simulate", "trajectory experiments and decay-rate certificates");
    auto* report = app.add_subcommand("report", "merge certificates into a summary");
    for (auto* cmd : {analyze, certify, simulate, report}) add_common(cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        auto cfg = conflow::cli::load_config(config_path);
        conflow::cli::apply_overrides(cfg, seed, pipeline, out_dir);
        conflow::cli::CommandResult result;
        if (analyze->parsed()) result = conflow::cli::cmd_analyze(cfg);
        if (certify->parsed()) result = conflow::cli::cmd_certify(cfg);
        if (simulate->parsed()) result = conflow::cli::cmd_simulate(cfg);
        if (report->parsed()) result = conflow::cli::cmd_report(cfg);
        for (const auto& f : result.written) std::cout << "wrote " << f << "\n";
        std::cout << "verdict: " << conflow::verify::to_string(result.worst) << "\n";
        return conflow::cli::exit_code(result.worst);
    } catch (const conflow::cli::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
