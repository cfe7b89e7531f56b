#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "conflow/fields.hpp"
#include "json.hpp"

namespace conflow::verify {

enum class Verdict { Pass, Fail, Inconclusive };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct Witness {
    Eigen::VectorXd point;
    double value = 0.0;
    std::string note;
};

struct Rates {
    double nu = 0.0;
    double kappa_fit = 0.0;
    double overshoot_fit = 0.0;
};

struct Bounds {
    double log_beta_low = 0.0;   // 2 * inf g over the stated region
    double log_alpha_up = 0.0;   // 2 * sup g over the stated region
    double beta_low() const;     // may underflow to 0 for extreme metrics
    double alpha_up() const;     // may overflow to +inf for extreme metrics
    double ratio_sqrt() const;   // exp((log_alpha_up - log_beta_low)/2)
};

/// Machine-checkable verdict for one claim over one sampled region.
/// Certificates are immutable once assembled and replay deterministically
/// from the recorded grid seed and provenance parameters.
struct Certificate {
    int schema_version = 1;
    std::string claim;  // contraction_region | sges | ies | forward_invariance
                        // | annulus_ies | pli | concavity
    std::string field_name;
    std::map<std::string, double> field_params;
    std::string metric_file;  // optional reference to a serialized metric
    nlohmann::ordered_json region;  // region + grid descriptor
    Verdict verdict = Verdict::Inconclusive;
    double margin = 0.0;  // worst slack after tolerance; pass implies >= 0
    std::vector<Witness> witnesses;
    std::optional<Rates> rates;
    std::optional<Bounds> bounds;
    std::map<std::string, double> provenance;
    std::vector<std::string> notes;
    bool sampled_not_proven = true;

    nlohmann::ordered_json to_json() const;
    static Certificate from_json(const nlohmann::json& j);

    void require(bool condition, const std::string& witness_note);
};

/// Canonical serialization used for all certificate files (stable key order,
/// shortest round-trip doubles), so identical inputs give identical bytes.
std::string dump_json(const nlohmann::ordered_json& j);

}  // namespace conflow::verify
