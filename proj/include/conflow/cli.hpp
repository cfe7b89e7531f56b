#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "conflow/certificate.hpp"
#include "conflow/fields.hpp"
#include "json.hpp"

namespace conflow::cli {

/// Configuration problems (bad file, unknown keys, invalid values) carry a
/// path-anchored message and map to exit code 3.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string run_id;
    std::uint64_t seed = 1;
    std::string pipeline;  // theorem1|theorem2|theorem3|annulus|pli_only|lognorm_only
    std::string field_name;
    std::map<std::string, double> field_params;

    std::string alpha_family;  // sqrt_mu|power|log|fit_power|fit_gpli
    std::map<std::string, double> alpha_params;

    std::vector<fields::Region> regions;  // certification regions

    // analysis knobs
    double concavity_m = 0.5;
    std::optional<double> expected_mu;
    std::optional<bool> expect_state_bounded;
    std::optional<bool> expect_magnitude_bounded;
    std::optional<double> nu_override;

    // simulation knobs
    double horizon = 20.0;
    int pair_count = 50;
    int point_count = 0;
    double sim_box_half_width = 10.0;
    std::optional<double> expected_rate;
    bool use_metric_bound = false;

    // annulus pipeline
    double annulus_r_inner = 1.0;
    double annulus_r_outer = 4.0;
    std::optional<double> annulus_nu;

    // tolerances (defaults mirror the module-level choices)
    double certify_tol = 1e-6;
    double eps_fraction = 0.1;
    double envelope_margin = 0.1;
    int levels_per_decade = 12;

    std::string out_dir = "out";
    nlohmann::json raw;
};

RunConfig load_config(const std::string& path);

/// Applies --seed / --pipeline / --out command-line overrides.
void apply_overrides(RunConfig& cfg, std::optional<std::uint64_t> seed,
                     const std::string& pipeline, const std::string& out_dir);

struct CommandResult {
    verify::Verdict worst = verify::Verdict::Pass;
    std::vector<std::string> written;
};

CommandResult cmd_analyze(const RunConfig& cfg);
CommandResult cmd_certify(const RunConfig& cfg);
CommandResult cmd_simulate(const RunConfig& cfg);
CommandResult cmd_report(const RunConfig& cfg);

/// 0 pass, 1 fail, 2 inconclusive (3 is reserved for configuration errors).
int exit_code(verify::Verdict v);

/// Atomic write: temp file in the target directory, then rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace conflow::cli
