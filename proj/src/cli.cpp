#include "conflow/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "conflow/curvature.hpp"
#include "conflow/detail/sampling.hpp"
#include "conflow/flow.hpp"
#include "conflow/lognorm.hpp"
#include "conflow/pipelines.hpp"
#include "conflow/pli.hpp"
#include "conflow/verify.hpp"

namespace conflow::cli {

namespace fs = std::filesystem;
using Eigen::VectorXd;
using nlohmann::json;

namespace {

const std::vector<std::string> kPipelines = {"theorem1", "theorem2",  "theorem3",
                                             "annulus",  "pli_only", "lognorm_only"};

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config error at " + path + ": " + what);
}

double need_number(const json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_number())
        fail(path + "." + key, "expected a number");
    return j.at(key).get<double>();
}

std::map<std::string, double> number_map(const json& j, const std::string& path) {
    std::map<std::string, double> out;
    if (j.is_null()) return out;
    if (!j.is_object()) fail(path, "expected an object of numbers");
    for (const auto& [k, v] : j.items()) {
        if (!v.is_number()) fail(path + "." + k, "expected a number");
        out[k] = v.get<double>();
    }
    return out;
}

fields::SamplePlan parse_plan(const json& j, const std::string& path,
                              std::uint64_t default_seed) {
    fields::SamplePlan plan = fields::SamplePlan::lowdisc(4096, default_seed);
    if (j.is_null()) return plan;
    const std::string kind = j.value("kind", "lowdisc");
    if (kind == "per_axis") {
        if (!j.contains("counts")) fail(path, "per_axis grid needs counts");
        plan = fields::SamplePlan::grid(j.at("counts").get<std::vector<int>>());
    } else if (kind == "lowdisc") {
        plan = fields::SamplePlan::lowdisc(j.value("count", 4096), default_seed);
    } else if (kind == "log_axis") {
        plan = fields::SamplePlan::log_axis(
            j.value("per_side", 500), j.value("min_abs", 1e-6),
            j.value("two_sided", true), j.value("include_zero", false));
    } else {
        fail(path + ".kind", "unknown grid kind '" + kind + "'");
    }
    plan.seed = j.value("seed", default_seed);
    return plan;
}

VectorXd parse_vector(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array");
    VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(i) = j.at(i).get<double>();
    return v;
}

fields::Region parse_region(const json& j, const std::string& path,
                            std::uint64_t seed, int field_dim) {
    const std::string kind = j.value("kind", "box");
    auto plan = parse_plan(j.contains("grid") ? j.at("grid") : json(), path + ".grid",
                           seed);
    if (kind == "box") {
        if (j.contains("half_width")) {
            const int dim = j.value("dim", field_dim);
            return fields::Region::box_symmetric(dim, need_number(j, path, "half_width"),
                                                 plan);
        }
        return fields::Region::box(parse_vector(j.at("lo"), path + ".lo"),
                                   parse_vector(j.at("hi"), path + ".hi"), plan);
    }
    if (kind == "ball")
        return fields::Region::ball(parse_vector(j.at("center"), path + ".center"),
                                    need_number(j, path, "radius"), plan);
    if (kind == "shell")
        return fields::Region::shell(parse_vector(j.at("center"), path + ".center"),
                                     need_number(j, path, "r_inner"),
                                     need_number(j, path, "r_outer"), plan);
    if (kind == "sublevel")
        return fields::Region::sublevel(need_number(j, path, "level"), plan);
    fail(path + ".kind", "unknown region kind '" + kind + "'");
}

struct Workspace {
    fs::path root, certificates, metrics, series;
};

Workspace open_workspace(const RunConfig& cfg) {
    Workspace w;
    w.root = fs::path(cfg.out_dir) / cfg.run_id;
    w.certificates = w.root / "certificates";
    w.metrics = w.root / "metrics";
    w.series = w.root / "series";
    fs::create_directories(w.certificates);
    fs::create_directories(w.metrics);
    fs::create_directories(w.series);
    return w;
}

void merge_verdict(verify::Verdict& worst, verify::Verdict v) {
    auto rank = [](verify::Verdict x) {
        switch (x) {
            case verify::Verdict::Pass: return 0;
            case verify::Verdict::Inconclusive: return 1;
            case verify::Verdict::Fail: return 2;
        }
        return 2;
    };
    if (rank(v) > rank(worst)) worst = v;
}

void write_certificate(const Workspace& w, CommandResult& result,
                       const std::string& name, const verify::Certificate& cert) {
    const fs::path p = w.certificates / (name + ".json");
    write_file_atomic(p.string(), verify::dump_json(cert.to_json()));
    result.written.push_back(p.string());
    merge_verdict(result.worst, cert.verdict);
}

fields::ScalarField field_from(const RunConfig& cfg) {
    return fields::catalog_get(cfg.field_name, cfg.field_params);
}

pli::ComparisonFunction alpha_from(const RunConfig& cfg,
                                   const fields::ScalarField& field) {
    if (cfg.alpha_family == "fit_gpli") {
        if (cfg.regions.empty()) fail("regions", "fit_gpli needs a region");
        return pli::make_sqrt_mu(pli::fit_gpli_mu(field, cfg.regions.front()));
    }
    if (cfg.alpha_family == "fit_power") {
        if (cfg.regions.empty()) fail("regions", "fit_power needs a region");
        return pli::fit_power_alpha(field, cfg.regions.front());
    }
    return pli::comparison_from_spec(cfg.alpha_family, cfg.alpha_params);
}

pipelines::Options options_from(const RunConfig& cfg) {
    pipelines::Options opts;
    opts.eps_fraction = cfg.eps_fraction;
    opts.envelope_margin = cfg.envelope_margin;
    opts.levels_per_decade = cfg.levels_per_decade;
    opts.certify_tol = cfg.certify_tol;
    opts.seed = cfg.seed;
    return opts;
}

verify::Certificate inconclusive_certificate(const RunConfig& cfg,
                                             const std::string& claim,
                                             const std::string& reason) {
    verify::Certificate cert;
    cert.claim = claim;
    cert.field_name = cfg.field_name;
    cert.field_params = cfg.field_params;
    cert.verdict = verify::Verdict::Inconclusive;
    cert.notes.push_back(reason);
    return cert;
}

void write_scan_csv(const Workspace& w, CommandResult& result,
                    const std::string& name, const std::string& header,
                    const std::vector<std::vector<double>>& rows) {
    std::ostringstream out;
    out << header << "\n";
    char buf[64];
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof(buf), i ? ",%.17g" : "%.17g", row[i]);
            out << buf;
        }
        out << "\n";
    }
    const fs::path p = w.series / (name + ".csv");
    write_file_atomic(p.string(), out.str());
    result.written.push_back(p.string());
}

}  // namespace

int exit_code(verify::Verdict v) {
    switch (v) {
        case verify::Verdict::Pass: return 0;
        case verify::Verdict::Fail: return 1;
        case verify::Verdict::Inconclusive: return 2;
    }
    return 2;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const fs::path target(path);
    const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, target);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config error: cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config error in '" + path + "': " + e.what());
    }

    RunConfig cfg;
    cfg.raw = j;
    if (!j.contains("field") || !j.at("field").contains("name"))
        fail("field.name", "required");
    cfg.field_name = j.at("field").at("name").get<std::string>();
    cfg.field_params = number_map(j.at("field").value("params", json()),
                                  "field.params");
    cfg.pipeline = j.value("pipeline", "theorem1");
    if (std::find(kPipelines.begin(), kPipelines.end(), cfg.pipeline) ==
        kPipelines.end())
        fail("pipeline", "unknown pipeline '" + cfg.pipeline + "'");
    if (!j.contains("seed") || !j.at("seed").is_number_unsigned())
        fail("seed", "an explicit non-negative integer seed is required "
                     "(wall-clock defaults are not allowed)");
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.run_id = j.value("run_id", cfg.field_name + "_" + cfg.pipeline);

    if (j.contains("alpha")) {
        cfg.alpha_family = j.at("alpha").value("family", "sqrt_mu");
        cfg.alpha_params = number_map(j.at("alpha").value("params", json()),
                                      "alpha.params");
    } else {
        cfg.alpha_family = "fit_gpli";
    }

    const auto names = fields::catalog_names();
    if (std::find(names.begin(), names.end(), cfg.field_name) == names.end())
        fail("field.name", "unknown catalog field '" + cfg.field_name + "'");

    int dim = 1;
    if (cfg.field_params.count("dim")) dim = int(cfg.field_params.at("dim"));
    if (j.contains("regions")) {
        const auto& rs = j.at("regions");
        if (!rs.is_array() || rs.empty()) fail("regions", "expected a non-empty array");
        for (std::size_t i = 0; i < rs.size(); ++i)
            cfg.regions.push_back(parse_region(
                rs.at(i), "regions[" + std::to_string(i) + "]", cfg.seed, dim));
    }

    if (j.contains("analysis")) {
        const auto& a = j.at("analysis");
        cfg.concavity_m = a.value("m", cfg.concavity_m);
        if (a.contains("expected_mu")) cfg.expected_mu = a.at("expected_mu").get<double>();
        if (a.contains("expect_state_bounded"))
            cfg.expect_state_bounded = a.at("expect_state_bounded").get<bool>();
        if (a.contains("expect_magnitude_bounded"))
            cfg.expect_magnitude_bounded = a.at("expect_magnitude_bounded").get<bool>();
        if (a.contains("nu")) cfg.nu_override = a.at("nu").get<double>();
    }
    if (j.contains("simulate")) {
        const auto& s = j.at("simulate");
        cfg.horizon = s.value("horizon", cfg.horizon);
        cfg.pair_count = s.value("pairs", cfg.pair_count);
        cfg.point_count = s.value("points", cfg.point_count);
        cfg.sim_box_half_width = s.value("box_half_width", cfg.sim_box_half_width);
        if (s.contains("expected_rate"))
            cfg.expected_rate = s.at("expected_rate").get<double>();
        cfg.use_metric_bound = s.value("use_metric_bound", cfg.use_metric_bound);
    }
    if (j.contains("annulus")) {
        const auto& a = j.at("annulus");
        cfg.annulus_r_inner = a.value("r_inner", cfg.annulus_r_inner);
        cfg.annulus_r_outer = a.value("r_outer", cfg.annulus_r_outer);
        if (a.contains("nu")) cfg.annulus_nu = a.at("nu").get<double>();
        cfg.horizon = a.value("horizon", cfg.horizon);
    }
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        cfg.certify_tol = t.value("certify_tol", cfg.certify_tol);
        cfg.eps_fraction = t.value("eps_fraction", cfg.eps_fraction);
        cfg.envelope_margin = t.value("envelope_margin", cfg.envelope_margin);
        cfg.levels_per_decade = t.value("levels_per_decade", cfg.levels_per_decade);
    }
    cfg.out_dir = j.value("out", cfg.out_dir);
    return cfg;
}

void apply_overrides(RunConfig& cfg, std::optional<std::uint64_t> seed,
                     const std::string& pipeline, const std::string& out_dir) {
    if (seed) cfg.seed = *seed;
    if (!pipeline.empty()) {
        if (std::find(kPipelines.begin(), kPipelines.end(), pipeline) ==
            kPipelines.end())
            fail("--pipeline", "unknown pipeline '" + pipeline + "'");
        cfg.pipeline = pipeline;
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
}

CommandResult cmd_analyze(const RunConfig& cfg) {
    const auto field = field_from(cfg);
    if (cfg.regions.empty()) fail("regions", "analyze needs at least one region");
    const auto& region = cfg.regions.front();
    Workspace w = open_workspace(cfg);
    CommandResult result;

    const double nu_local = cfg.nu_override
                                ? *cfg.nu_override
                                : curvature::lambda_min_hessian(field, field.x_star);

    if (cfg.pipeline == "lognorm_only") {
        write_certificate(w, result, "euclidean_contraction",
                          lognorm::strong_convexity_contraction_check(
                              field, region, (1.0 - cfg.eps_fraction) * nu_local));
        return result;
    }

    // Gradient-dominance constant on the region.
    const double mu_hat = pli::fit_gpli_mu(field, region);
    verify::Certificate gpli;
    gpli.claim = "pli";
    gpli.field_name = field.name;
    gpli.field_params = field.params;
    gpli.region = region.descriptor();
    gpli.provenance["mu_hat"] = mu_hat;
    if (cfg.expected_mu) {
        gpli.provenance["expected_mu"] = *cfg.expected_mu;
        gpli.margin = mu_hat - (*cfg.expected_mu - 1e-3);
        gpli.verdict = gpli.margin >= 0 ? verify::Verdict::Pass : verify::Verdict::Fail;
    } else {
        gpli.margin = mu_hat;
        gpli.verdict = mu_hat > 0 ? verify::Verdict::Pass : verify::Verdict::Fail;
    }
    write_certificate(w, result, "gpli_fit", gpli);

    // Pointwise comparison-function check when alpha is explicit.
    if (cfg.alpha_family != "fit_gpli" && cfg.alpha_family != "fit_power") {
        const auto alpha = alpha_from(cfg, field);
        write_certificate(w, result, "kinf_pli",
                          pli::check_kinf_pli(field, alpha, region));
    }

    if (cfg.pipeline != "pli_only") {
        // Classification outcomes are measurements of the field, not gate
        // claims; they only count toward the run verdict when the config
        // states an expectation.
        auto write_classification = [&](const std::string& name,
                                        verify::Certificate cert,
                                        const std::optional<bool>& expect) {
            if (expect) {
                const bool got = cert.verdict == verify::Verdict::Pass;
                cert.provenance["expected"] = *expect ? 1.0 : 0.0;
                cert.verdict = got == *expect ? verify::Verdict::Pass
                                              : verify::Verdict::Fail;
                write_certificate(w, result, name, cert);
            } else {
                const fs::path p = w.certificates / (name + ".json");
                write_file_atomic(p.string(), verify::dump_json(cert.to_json()));
                result.written.push_back(p.string());
            }
        };
        const auto cls = curvature::classify_concavity(field, cfg.concavity_m, region);
        write_classification("concavity_state", cls.state_bounded,
                             cfg.expect_state_bounded);
        write_classification("concavity_magnitude", cls.magnitude_bounded,
                             cfg.expect_magnitude_bounded);

        verify::Certificate meas;
        meas.claim = "concavity";
        meas.field_name = field.name;
        meas.field_params = field.params;
        meas.region = region.descriptor();
        meas.provenance["negative_fraction"] =
            curvature::negative_curvature_measure(field, region);
        meas.verdict = verify::Verdict::Pass;
        meas.margin = 0.0;
        meas.notes.push_back("sampled estimate of the negative-curvature fraction");
        write_certificate(w, result, "negative_curvature", meas);
    }

    // Plot-ready scans over the region samples.
    std::vector<std::vector<double>> lam_rows, ratio_rows;
    for (const auto& x : region.samples(&field)) {
        std::vector<double> row(x.data(), x.data() + x.size());
        row.push_back(curvature::lambda_min_hessian(field, x));
        lam_rows.push_back(row);
        const double s = field.level(x);
        if (s > 1e-12) {
            std::vector<double> r2(x.data(), x.data() + x.size());
            r2.push_back(field.gradient(x).squaredNorm() / s);
            ratio_rows.push_back(r2);
        }
    }
    std::string coords;
    for (int i = 1; i <= field.dim; ++i) coords += "x_" + std::to_string(i) + ",";
    write_scan_csv(w, result, "lambda_min", coords + "lambda_min", lam_rows);
    write_scan_csv(w, result, "gpli_ratio", coords + "grad_sq_over_level", ratio_rows);
    return result;
}

CommandResult cmd_certify(const RunConfig& cfg) {
    const auto field = field_from(cfg);
    Workspace w = open_workspace(cfg);
    CommandResult result;
    const auto opts = options_from(cfg);

    auto save_metric = [&](const metric::ConformalMetric& m) {
        const fs::path csv = w.metrics / "metric.csv";
        const fs::path hdr = w.metrics / "metric.json";
        m.save(csv.string(), hdr.string());
        result.written.push_back(csv.string());
        result.written.push_back(hdr.string());
    };
    // Plot-ready contraction-measure scan over the first certify region.
    auto write_measure_scan = [&](const metric::ConformalMetric& m,
                                  const fields::Region& region) {
        std::vector<std::vector<double>> rows;
        for (const auto& x : region.samples(&field)) {
            std::vector<double> row(x.data(), x.data() + x.size());
            row.push_back(verify::contraction_measure(field, &m, x));
            rows.push_back(row);
        }
        std::string coords;
        for (int i = 1; i <= field.dim; ++i) coords += "x_" + std::to_string(i) + ",";
        write_scan_csv(w, result, "contraction_measure", coords + "measure", rows);
    };

    try {
        if (cfg.pipeline == "theorem1") {
            if (cfg.regions.empty()) fail("regions", "theorem1 needs regions");
            const auto alpha = alpha_from(cfg, field);
            auto res = pipelines::run_envelope_pipeline(field, alpha, cfg.regions, opts);
            save_metric(pipelines::with_bounds_on(res.metric, field,
                                                  cfg.regions.front()));
            write_measure_scan(res.metric, cfg.regions.front());
            for (std::size_t i = 0; i < res.region_certs.size(); ++i) {
                res.region_certs[i].metric_file = "metrics/metric.csv";
                write_certificate(w, result, "contraction_" + std::to_string(i),
                                  res.region_certs[i]);
            }
        } else if (cfg.pipeline == "theorem2") {
            if (cfg.regions.size() < 2)
                fail("regions", "theorem2 needs a search box plus certify regions");
            const auto search = cfg.regions.front();
            const std::vector<fields::Region> certify(cfg.regions.begin() + 1,
                                                      cfg.regions.end());
            auto res = pipelines::run_sublevel_patch_pipeline(
                field, cfg.concavity_m, search, certify, opts);
            save_metric(res.metric);
            write_measure_scan(res.metric, certify.front());
            for (std::size_t i = 0; i < res.region_certs.size(); ++i) {
                res.region_certs[i].metric_file = "metrics/metric.csv";
                write_certificate(w, result, "contraction_" + std::to_string(i),
                                  res.region_certs[i]);
            }
        } else if (cfg.pipeline == "theorem3") {
            if (cfg.regions.size() < 2)
                fail("regions", "theorem3 needs a fit region plus certify regions");
            const auto fit_region = cfg.regions.front();
            const std::vector<fields::Region> certify(cfg.regions.begin() + 1,
                                                      cfg.regions.end());
            std::optional<pli::ComparisonFunction> alpha;
            if (cfg.alpha_family != "fit_power" && cfg.alpha_family != "fit_gpli")
                alpha = alpha_from(cfg, field);
            auto res = pipelines::run_bounded_metric_pipeline(field, alpha, fit_region,
                                                              certify, opts);
            save_metric(res.metric);
            write_measure_scan(res.metric, certify.front());

            verify::Certificate spli;
            spli.claim = "pli";
            spli.field_name = field.name;
            spli.field_params = field.params;
            spli.region = fit_region.descriptor();
            spli.provenance["tail_exponent"] = res.integrability.tail_exponent;
            spli.provenance["integral_estimate"] = res.integrability.total();
            spli.notes.push_back("integrability verdict: " +
                                 pli::to_string(res.integrability.verdict));
            spli.verdict = res.integrability.verdict == pli::TailVerdict::Convergent
                               ? verify::Verdict::Pass
                               : verify::Verdict::Inconclusive;
            spli.margin = res.integrability.tail_exponent - 0.55;
            write_certificate(w, result, "strong_pli", spli);

            for (std::size_t i = 0; i < res.region_certs.size(); ++i) {
                res.region_certs[i].metric_file = "metrics/metric.csv";
                write_certificate(w, result, "contraction_" + std::to_string(i),
                                  res.region_certs[i]);
            }
        } else if (cfg.pipeline == "annulus") {
            const double nu = cfg.annulus_nu
                                  ? *cfg.annulus_nu
                                  : (1.0 - cfg.eps_fraction) *
                                        curvature::lambda_min_hessian(field,
                                                                      field.x_star);
            auto K = fields::Region::shell(field.x_star, cfg.annulus_r_inner,
                                           cfg.annulus_r_outer,
                                           fields::SamplePlan::lowdisc(2048, cfg.seed));
            verify::AnnulusOptions aopts;
            aopts.seed = cfg.seed;
            write_certificate(
                w, result, "annulus_ies",
                verify::annulus_ies_check(field, K, nu, cfg.horizon, aopts));
        } else {
            fail("pipeline", "certify supports theorem1|theorem2|theorem3|annulus");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        // Hypothesis violations surface as inconclusive, naming the assumption.
        write_certificate(w, result, "hypothesis",
                          inconclusive_certificate(cfg, "contraction_region", e.what()));
    } catch (const std::runtime_error& e) {
        write_certificate(w, result, "hypothesis",
                          inconclusive_certificate(cfg, "contraction_region", e.what()));
    }
    return result;
}

CommandResult cmd_simulate(const RunConfig& cfg) {
    const auto field = field_from(cfg);
    Workspace w = open_workspace(cfg);
    CommandResult result;

    // Use the certified metric when present.
    std::optional<metric::ConformalMetric> m;
    const fs::path mcsv = w.metrics / "metric.csv";
    const fs::path mjson = w.metrics / "metric.json";
    if (fs::exists(mcsv) && fs::exists(mjson))
        m = metric::ConformalMetric::load(mcsv.string(), mjson.string());

    verify::DecaySpec spec;
    spec.horizon = cfg.horizon;
    const double nu_local = curvature::lambda_min_hessian(field, field.x_star);
    spec.expected_rate = cfg.expected_rate
                             ? *cfg.expected_rate
                             : (1.0 - cfg.eps_fraction) * nu_local;

    detail::Rng rng(cfg.seed + 77);
    auto draw = [&] {
        VectorXd x(field.dim);
        for (int i = 0; i < field.dim; ++i)
            x(i) = rng.uniform(-cfg.sim_box_half_width, cfg.sim_box_half_width);
        return x;
    };
    for (int k = 0; k < cfg.pair_count; ++k) {
        auto a = draw(), b = draw();
        if ((a - b).norm() < 1e-6) b(0) += 0.5;
        spec.pairs.push_back({a, b});
    }
    for (int k = 0; k < cfg.point_count; ++k) spec.points.push_back(draw());

    if (cfg.use_metric_bound && m) {
        auto box = fields::Region::box_symmetric(
            field.dim, cfg.sim_box_half_width,
            fields::SamplePlan::lowdisc(2048, cfg.seed));
        const auto b = m->bounds_on(field, box);
        spec.overshoot_bound = b.ratio_sqrt();
        m->set_bounds(b);
    }

    auto cert = verify::empirical_decay(field, m ? &*m : nullptr, spec);
    if (m) cert.metric_file = "metrics/metric.csv";
    write_certificate(w, result, "decay", cert);

    // Plot-ready series for the first few experiments.
    const int keep = std::min<int>(4, cfg.pair_count);
    for (int k = 0; k < keep; ++k) {
        const auto ta = flow::integrate(field, spec.pairs[k].first, cfg.horizon,
                                        spec.controls);
        const auto tb = flow::integrate(field, spec.pairs[k].second, cfg.horizon,
                                        spec.controls);
        const auto series = flow::pair_distance_series(ta, tb);
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < series.times.size(); ++i)
            rows.push_back({series.times[i], series.euclidean[i]});
        write_scan_csv(w, result, "pair_" + std::to_string(k), "t,distance", rows);
    }
    if (cfg.point_count > 0) {
        const auto traj =
            flow::integrate(field, spec.points[0], cfg.horizon, spec.controls);
        const fs::path p = w.series / "sges_0.csv";
        flow::save_trajectory_csv(traj, p.string());
        result.written.push_back(p.string());
    }
    return result;
}

CommandResult cmd_report(const RunConfig& cfg) {
    Workspace w = open_workspace(cfg);
    CommandResult result;

    std::vector<fs::path> cert_files;
    if (fs::exists(w.certificates))
        for (const auto& e : fs::directory_iterator(w.certificates))
            if (e.path().extension() == ".json") cert_files.push_back(e.path());
    std::sort(cert_files.begin(), cert_files.end());
    if (cert_files.empty())
        throw ConfigError("report: no certificates under " + w.certificates.string() +
                          "; run analyze/certify/simulate first");

    nlohmann::ordered_json summary;
    summary["run_id"] = cfg.run_id;
    summary["pipeline"] = cfg.pipeline;
    summary["seed"] = cfg.seed;
    nlohmann::ordered_json certs = nlohmann::ordered_json::array();
    verify::Verdict worst = verify::Verdict::Pass;
    for (const auto& p : cert_files) {
        std::ifstream in(p);
        json j = json::parse(in);
        const auto cert = verify::Certificate::from_json(j);
        // Concavity classifications without a stated expectation are
        // descriptive; they are listed but do not gate the run verdict.
        const bool gates =
            cert.claim != "concavity" || cert.provenance.count("expected");
        if (gates) merge_verdict(worst, cert.verdict);
        nlohmann::ordered_json row;
        row["file"] = "certificates/" + p.filename().string();
        row["claim"] = cert.claim;
        row["verdict"] = verify::to_string(cert.verdict);
        row["margin"] = cert.margin;
        if (!gates) row["descriptive"] = true;
        certs.push_back(row);
    }
    summary["worst_verdict"] = verify::to_string(worst);
    summary["certificates"] = certs;

    nlohmann::ordered_json series_list = nlohmann::ordered_json::array();
    if (fs::exists(w.series)) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(w.series)) files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& p : files) series_list.push_back("series/" + p.filename().string());
    }
    summary["series"] = series_list;

    const fs::path out = w.root / "summary.json";
    write_file_atomic(out.string(), verify::dump_json(summary));
    result.written.push_back(out.string());
    result.worst = worst;
    return result;
}

}  // namespace conflow::cli
