#include "conflow/certificate.hpp"

#include <cmath>
#include <stdexcept>

namespace conflow::verify {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

Verdict verdict_from_string(const std::string& s) {
    if (s == "pass") return Verdict::Pass;
    if (s == "fail") return Verdict::Fail;
    if (s == "inconclusive") return Verdict::Inconclusive;
    throw std::invalid_argument("unknown verdict: " + s);
}

double Bounds::beta_low() const { return std::exp(log_beta_low); }
double Bounds::alpha_up() const { return std::exp(log_alpha_up); }
double Bounds::ratio_sqrt() const {
    return std::exp(0.5 * (log_alpha_up - log_beta_low));
}

nlohmann::ordered_json Certificate::to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = schema_version;
    j["claim"] = claim;
    j["field"] = {{"name", field_name}, {"params", field_params}};
    if (!metric_file.empty()) j["metric"] = {{"file", metric_file}};
    j["region"] = region;
    j["verdict"] = to_string(verdict);
    j["margin"] = margin;
    nlohmann::ordered_json ws = nlohmann::ordered_json::array();
    for (const auto& w : witnesses) {
        nlohmann::ordered_json wj;
        wj["x"] = std::vector<double>(w.point.data(), w.point.data() + w.point.size());
        wj["value"] = w.value;
        if (!w.note.empty()) wj["note"] = w.note;
        ws.push_back(wj);
    }
    j["witnesses"] = ws;
    if (rates) {
        j["rates"] = {{"nu", rates->nu},
                      {"kappa_fit", rates->kappa_fit},
                      {"overshoot_fit", rates->overshoot_fit}};
    }
    if (bounds) {
        j["bounds"] = {{"beta_low", bounds->beta_low()},
                       {"alpha_up", bounds->alpha_up()},
                       {"log_beta_low", bounds->log_beta_low},
                       {"log_alpha_up", bounds->log_alpha_up}};
    }
    j["provenance"] = provenance;
    if (!notes.empty()) j["notes"] = notes;
    j["sampled_not_proven"] = sampled_not_proven;
    return j;
}

Certificate Certificate::from_json(const nlohmann::json& j) {
    Certificate c;
    c.schema_version = j.at("schema_version").get<int>();
    c.claim = j.at("claim").get<std::string>();
    c.field_name = j.at("field").at("name").get<std::string>();
    if (j.at("field").contains("params"))
        c.field_params =
            j.at("field").at("params").get<std::map<std::string, double>>();
    if (j.contains("metric")) c.metric_file = j.at("metric").at("file");
    c.region = j.at("region");
    c.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    c.margin = j.at("margin").get<double>();
    for (const auto& wj : j.at("witnesses")) {
        Witness w;
        const auto xs = wj.at("x").get<std::vector<double>>();
        w.point = Eigen::Map<const Eigen::VectorXd>(xs.data(), xs.size());
        w.value = wj.at("value").get<double>();
        if (wj.contains("note")) w.note = wj.at("note").get<std::string>();
        c.witnesses.push_back(std::move(w));
    }
    if (j.contains("rates")) {
        Rates r;
        r.nu = j.at("rates").at("nu").get<double>();
        r.kappa_fit = j.at("rates").at("kappa_fit").get<double>();
        r.overshoot_fit = j.at("rates").at("overshoot_fit").get<double>();
        c.rates = r;
    }
    if (j.contains("bounds")) {
        Bounds b;
        b.log_beta_low = j.at("bounds").at("log_beta_low").get<double>();
        b.log_alpha_up = j.at("bounds").at("log_alpha_up").get<double>();
        c.bounds = b;
    }
    if (j.contains("provenance"))
        c.provenance = j.at("provenance").get<std::map<std::string, double>>();
    if (j.contains("notes"))
        c.notes = j.at("notes").get<std::vector<std::string>>();
    c.sampled_not_proven = j.at("sampled_not_proven").get<bool>();
    return c;
}

void Certificate::require(bool condition, const std::string& note) {
    if (!condition) {
        verdict = Verdict::Inconclusive;
        notes.push_back(note);
    }
}

std::string dump_json(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace conflow::verify
