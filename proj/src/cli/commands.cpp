#include "metacog/cli/commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "metacog/bootstrap.hpp"
#include "metacog/cli/report.hpp"
#include "metacog/counts_io.hpp"
#include "metacog/error.hpp"
#include "metacog/fit_report.hpp"
#include "metacog/harness/runner.hpp"
#include "metacog/harness/tally.hpp"
#include "metacog/observer.hpp"
#include "metacog/stats.hpp"

#ifndef METACOG_DEFAULT_TEMPLATE_DIR
#define METACOG_DEFAULT_TEMPLATE_DIR "templates"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace metacog::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gathers flags that were given explicitly, so they can be laid over a
// --config file (config < flags).
class Overlay {
public:
    template <typename T>
    CLI::Option* option(CLI::App* app, const std::string& name, const std::string& key, T& var, const std::string& help) {
        auto* opt = app->add_option(name, var, help);
        setters_.push_back([opt, &var, key](json& j) {
            if (opt->count()) j[key] = var;
        });
        return opt;
    }

    CLI::Option* flag(CLI::App* app, const std::string& name, const std::string& key, bool value, const std::string& help) {
        auto* opt = app->add_flag(name, help);
        setters_.push_back([opt, key, value](json& j) {
            if (opt->count()) j[key] = value;
        });
        return opt;
    }

    json apply(json base) const {
        if (!base.is_object()) base = json::object();
        for (const auto& s : setters_) s(base);
        return base;
    }

private:
    std::vector<std::function<void(json&)>> setters_;
};

json load_json_file(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    try {
        auto j = json::parse(in);
        if (!j.is_object()) throw ParseError(path, 0, "config must be a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw ParseError(path, 0, e.what());
    }
}

std::string fixed(double v, int digits = 4) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

void write_json_file(const fs::path& path, const json& j) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

json bootstrap_json(const BootstrapResult& b) {
    return {{"statistic", b.statistic}, {"point", b.point},   {"low", b.low},
            {"high", b.high},           {"level", b.level},   {"n_boot", b.n_boot},
            {"seed", b.seed},           {"failed", b.failed}, {"standard_error", b.standard_error}};
}

json comparison_json(const ComparisonResult& r, const std::string& statistic) {
    return {{"statistic", statistic},
            {"diff", r.diff},
            {"z", r.z},
            {"alpha", r.alpha},
            {"alpha_corrected", r.alpha_corrected},
            {"m_comparisons", r.m_comparisons},
            {"z_threshold", r.z_threshold},
            {"statistically_significant", r.statistically_significant},
            {"ci", {{"low", r.ci.low}, {"high", r.ci.high}}},
            {"rope", {{"low", r.rope.low}, {"high", r.rope.high}}},
            {"rope_verdict", std::string(to_string(r.rope_verdict))}};
}

FitOptions fit_options_from(const json& s) {
    FitOptions o;
    if (s.contains("padding")) {
        const auto p = parse_cell_padding(s.at("padding").get<std::string>());
        if (!p) throw UsageError("unknown padding policy '" + s.at("padding").get<std::string>() + "'");
        o.padding = *p;
    }
    if (s.contains("edge_correction")) {
        const auto e = parse_edge_correction(s.at("edge_correction").get<std::string>());
        if (!e) throw UsageError("unknown edge correction '" + s.at("edge_correction").get<std::string>() + "'");
        o.edge_correction = *e;
    }
    o.optimizer.rel_tolerance = s.value("rel_tolerance", o.optimizer.rel_tolerance);
    o.optimizer.max_restarts = s.value("max_restarts", o.optimizer.max_restarts);
    o.optimizer.max_evaluations = s.value("max_evaluations", o.optimizer.max_evaluations);
    return o;
}

BootstrapOptions bootstrap_options_from(const json& s, const FitOptions& fit) {
    BootstrapOptions b;
    b.n_boot = s.value("bootstrap", 0);
    b.level = s.value("level", b.level);
    b.seed = s.value("seed", std::uint64_t{0});
    b.threads = s.value("threads", b.threads);
    b.fit = fit;
    return b;
}

Statistic statistic_from(const json& s, Statistic fallback) {
    if (!s.contains("statistic")) return fallback;
    const auto name = s.at("statistic").get<std::string>();
    const auto st = parse_statistic(name);
    if (!st) throw UsageError("unknown statistic '" + name + "'");
    return *st;
}

// Shared by `fit` and `analyze`: fits, optionally bootstraps, writes, reports.
int finish_fit(const RatingCounts& counts, const json& settings, json meta, const std::string& out_path, bool as_json,
               std::ostream& out) {
    const auto fit_opts = fit_options_from(settings);
    const auto fit = fit_meta_d(counts, fit_opts);
    std::optional<BootstrapResult> ci;
    const auto boot = bootstrap_options_from(settings, fit_opts);
    if (boot.n_boot > 0) ci = bootstrap_ci(counts, statistic_from(settings, Statistic::MetaD), boot);
    if (!fit.diagnostics.empty()) meta["diagnostics"] = fit.diagnostics;
    const auto report = make_fit_report(fit, ci, std::move(meta));
    const auto j = to_json(report);
    if (!out_path.empty()) write_fit_report(out_path, report);
    if (as_json) {
        out << j.dump(2) << '\n';
    } else {
        out << "meta_d=" << fixed(fit.params.meta_d) << " m_ratio=" << (fit.m_ratio ? fixed(*fit.m_ratio) : "n/a")
            << " d'=" << fixed(fit.type1.d_prime) << " c=" << fixed(fit.type1.c)
            << " converged=" << (fit.converged ? "yes" : "no");
        if (ci) out << " ci[" << ci->statistic << "]=[" << fixed(ci->low) << ", " << fixed(ci->high) << "]";
        out << '\n';
        if (!out_path.empty()) out << "wrote " << out_path << '\n';
    }
    return fit.converged ? kExitOk : kExitNotConverged;
}

int finish_type1(const Type1Counts& counts, const json& settings, json meta, const std::string& out_path, bool as_json,
                 std::ostream& out) {
    const auto policy = fit_options_from(settings).edge_correction;
    const auto report = make_type1_report(type1_stats(counts, policy), std::move(meta));
    if (!out_path.empty()) write_fit_report(out_path, report);
    if (as_json) {
        out << to_json(report).dump(2) << '\n';
    } else {
        out << "type 1 only: d'=" << fixed(report.d_prime) << " c=" << fixed(report.c)
            << " c'=" << (report.c_prime ? fixed(*report.c_prime) : "n/a") << '\n';
        if (!out_path.empty()) out << "wrote " << out_path << '\n';
    }
    return kExitOk;
}

struct Common {
    std::string config;
    std::string out_path;
    bool as_json = false;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* app, Overlay& overlay, Common& c, bool with_seed = true, bool with_config = true) {
    if (with_config) app->add_option("--config", c.config, "JSON file with settings (flags take precedence)");
    app->add_option("--out", c.out_path, "Output path");
    app->add_flag("--json", c.as_json, "Machine-readable JSON on stdout");
    if (with_seed) overlay.option(app, "--seed", "seed", c.seed, "Random seed");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Metacognitive sensitivity and criterion calibration of binary classifiers", "metacog"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate confidence-rated counts from an SDT observer");
    Overlay sim_ov;
    Common sim_c;
    double sim_d = 0, sim_cc = 0, sim_meta = 0;
    std::vector<double> sim_s1, sim_s2;
    std::int64_t sim_n = 0, sim_ns1 = 0;
    add_common(sim, sim_ov, sim_c);
    sim_ov.option(sim, "--d-prime", "d_prime", sim_d, "Type 1 sensitivity");
    sim_ov.option(sim, "--c", "c", sim_cc, "Type 1 criterion");
    sim_ov.option(sim, "--meta-d", "meta_d", sim_meta, "Type 2 sensitivity (default: d')");
    sim_ov.option(sim, "--t2-s1", "t2_criteria_s1", sim_s1, "Response-S1 confidence criteria, ascending")->delimiter(',');
    sim_ov.option(sim, "--t2-s2", "t2_criteria_s2", sim_s2, "Response-S2 confidence criteria, ascending")->delimiter(',');
    sim_ov.option(sim, "--n-trials", "n_trials", sim_n, "Total trials");
    sim_ov.option(sim, "--n-s1", "n_s1", sim_ns1, "S1 trials (default: half)");
    sim_ov.flag(sim, "--random-type1", "deterministic_type1", false, "Sample type 1 counts instead of rounding");
    sim_ov.flag(sim, "--expected", "sample_type2", false, "Round type 2 expectations instead of sampling");

    // fit
    auto* fit = app.add_subcommand("fit", "Fit meta-d' to a counts CSV");
    Overlay fit_ov;
    Common fit_c;
    std::string fit_in, fit_pad, fit_edge, fit_stat;
    int fit_boot = 0, fit_threads = 1;
    double fit_level = 0.95;
    std::vector<std::string> fit_meta;
    add_common(fit, fit_ov, fit_c);
    fit->add_option("counts", fit_in, "Counts CSV")->required();
    fit_ov.option(fit, "--padding", "padding", fit_pad, "Cell padding: never | when-degenerate | always");
    fit_ov.option(fit, "--edge-correction", "edge_correction", fit_edge, "Type 1 edge correction policy");
    fit_ov.option(fit, "--bootstrap", "bootstrap", fit_boot, "Bootstrap replicates (0: no interval)");
    fit_ov.option(fit, "--statistic", "statistic", fit_stat, "Bootstrapped statistic: meta_d | m_ratio | log_m_ratio | d_prime");
    fit_ov.option(fit, "--level", "level", fit_level, "Interval level");
    fit_ov.option(fit, "--threads", "threads", fit_threads, "Bootstrap worker threads");
    fit->add_option("--meta", fit_meta, "key=value annotation stored in the report (model_id, task, risk, mode, ...)");

    // analyze
    auto* ana = app.add_subcommand("analyze", "Tally a trial log and fit it");
    Overlay ana_ov;
    Common ana_c;
    std::string ana_in, ana_pad, ana_edge, ana_stat;
    int ana_boot = 0, ana_threads = 1, ana_h = 5;
    double ana_level = 0.95;
    add_common(ana, ana_ov, ana_c);
    ana->add_option("log", ana_in, "Trial log (JSONL)")->required();
    ana->add_option("--levels", ana_h, "Confidence levels on the scale");
    ana_ov.option(ana, "--padding", "padding", ana_pad, "Cell padding policy");
    ana_ov.option(ana, "--edge-correction", "edge_correction", ana_edge, "Type 1 edge correction policy");
    ana_ov.option(ana, "--bootstrap", "bootstrap", ana_boot, "Bootstrap replicates (0: no interval)");
    ana_ov.option(ana, "--statistic", "statistic", ana_stat, "Bootstrapped statistic");
    ana_ov.option(ana, "--level", "level", ana_level, "Interval level");
    ana_ov.option(ana, "--threads", "threads", ana_threads, "Bootstrap worker threads");

    // compare
    auto* cmp = app.add_subcommand("compare", "Compare two fit reports or counts files");
    Overlay cmp_ov;
    Common cmp_c;
    std::string cmp_a, cmp_b, cmp_stat = "d_prime", cmp_edge;
    int cmp_m = 27, cmp_boot = 1000, cmp_threads = 1;
    double cmp_alpha = 0.05, cmp_lo = 0, cmp_hi = 0;
    add_common(cmp, cmp_ov, cmp_c);
    cmp->add_option("a", cmp_a, "First fit report (.json) or counts file (.csv)")->required();
    cmp->add_option("b", cmp_b, "Second fit report or counts file")->required();
    cmp_ov.option(cmp, "--statistic", "statistic", cmp_stat, "d_prime | c (Delta method) or meta_d | m_ratio | log_m_ratio (bootstrap)");
    cmp_ov.option(cmp, "--comparisons", "comparisons", cmp_m, "Bonferroni family size");
    cmp_ov.option(cmp, "--alpha", "alpha", cmp_alpha, "Family-wise alpha");
    cmp_ov.option(cmp, "--rope-low", "rope_low", cmp_lo, "ROPE lower bound");
    cmp_ov.option(cmp, "--rope-high", "rope_high", cmp_hi, "ROPE upper bound");
    cmp_ov.option(cmp, "--bootstrap", "bootstrap", cmp_boot, "Replicates for bootstrap statistics");
    cmp_ov.option(cmp, "--threads", "threads", cmp_threads, "Bootstrap worker threads");
    cmp_ov.option(cmp, "--edge-correction", "edge_correction", cmp_edge, "Type 1 edge correction for counts inputs");

    // run
    auto* runc = app.add_subcommand("run", "Collect trials from a chat-completion endpoint");
    Overlay run_ov;
    Common run_c;
    std::string r_endpoint, r_model, r_task, r_risk, r_mode, r_dataset, r_text, r_label, r_templates, r_key_env;
    std::int64_t r_n = 0;
    int r_conc = 4, r_retries = 3;
    double r_rate = 0, r_ceiling = 0.05;
    add_common(runc, run_ov, run_c);
    run_ov.option(runc, "--endpoint", "endpoint_url", r_endpoint, "Full chat-completions URL");
    run_ov.option(runc, "--model", "model_id", r_model, "Model identifier");
    run_ov.option(runc, "--task", "task", r_task, "A_sentiment | B_oral_written | C_word_depletion");
    run_ov.option(runc, "--risk", "risk", r_risk, "S1 | None | S2");
    run_ov.option(runc, "--mode", "mode", r_mode, "with_confidence | type1_only");
    run_ov.option(runc, "--dataset", "dataset", r_dataset, "Dataset CSV/TSV");
    run_ov.option(runc, "--text-field", "text_field", r_text, "Text column");
    run_ov.option(runc, "--label-field", "label_field", r_label, "Label column");
    run_ov.option(runc, "--n-trials", "n_trials", r_n, "Trials to sample (default 20000 for task A, 10000 otherwise; 0: all)");
    run_ov.option(runc, "--concurrency", "concurrency", r_conc, "Requests in flight");
    run_ov.option(runc, "--rate-limit", "rate_limit_per_sec", r_rate, "Requests per second (0: unlimited)");
    run_ov.option(runc, "--invalid-ceiling", "invalid_ceiling", r_ceiling, "Abort above this invalid-reply fraction");
    run_ov.option(runc, "--template-dir", "template_dir", r_templates, "Directory holding prompts.json");
    run_ov.option(runc, "--api-key-env", "api_key_env", r_key_env, "Environment variable holding the API key");
    auto* retries_opt = runc->add_option("--max-retries", r_retries, "Retries per trial on transport errors");

    // report
    auto* rep = app.add_subcommand("report", "Build summary tables and plot series from run directories");
    Overlay rep_ov;
    Common rep_c;
    std::vector<std::string> rep_dirs;
    add_common(rep, rep_ov, rep_c, false, false);
    rep->add_option("dirs", rep_dirs, "Directories with fit reports and trial logs")->required();

    // validate-dataset
    auto* val = app.add_subcommand("validate-dataset", "Check a dataset file and report its label balance");
    Overlay val_ov;
    Common val_c;
    std::string v_path, v_text, v_label = "label";
    add_common(val, val_ov, val_c, false, false);
    val->add_option("dataset", v_path, "Dataset CSV/TSV")->required();
    val->add_option("--text-field", v_text, "Text column (default: sentence or text)");
    val->add_option("--label-field", v_label, "Label column");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sim->parsed()) {
            const auto s = sim_ov.apply(load_json_file(sim_c.config));
            if (sim_c.out_path.empty()) throw UsageError("simulate: --out is required");
            if (!s.contains("t2_criteria_s1") || !s.contains("t2_criteria_s2")) {
                throw UsageError("simulate: type 2 criteria (--t2-s1, --t2-s2) are required");
            }
            ObserverSpec spec;
            spec.d_prime = s.value("d_prime", 1.0);
            spec.c = s.value("c", 0.0);
            if (s.contains("meta_d") && !s.at("meta_d").is_null()) spec.meta_d = s.at("meta_d").get<double>();
            spec.t2_criteria_s1 = s.at("t2_criteria_s1").get<std::vector<double>>();
            spec.t2_criteria_s2 = s.at("t2_criteria_s2").get<std::vector<double>>();
            SimOptions opts;
            opts.n_trials = s.value("n_trials", opts.n_trials);
            if (s.contains("n_s1") && !s.at("n_s1").is_null()) opts.n_s1 = s.at("n_s1").get<std::int64_t>();
            opts.deterministic_type1 = s.value("deterministic_type1", true);
            opts.sample_type2 = s.value("sample_type2", true);
            opts.seed = s.value("seed", std::uint64_t{0});
            const auto counts = simulate_counts(spec, opts);

            const fs::path csv = sim_c.out_path;
            if (csv.has_parent_path()) fs::create_directories(csv.parent_path());
            write_counts_csv(csv, counts);
            fs::path sidecar = csv;
            sidecar.replace_extension(".sim.json");
            json side = {{"counts", csv.string()},
                         {"spec",
                          {{"d_prime", spec.d_prime},
                           {"c", spec.c},
                           {"meta_d", spec.effective_meta_d()},
                           {"t2_criteria_s1", spec.t2_criteria_s1},
                           {"t2_criteria_s2", spec.t2_criteria_s2}}},
                         {"options",
                          {{"n_trials", opts.n_trials},
                           {"n_s1", opts.stimulus_count(Stimulus::S1)},
                           {"deterministic_type1", opts.deterministic_type1},
                           {"sample_type2", opts.sample_type2}}},
                         {"seed", opts.seed}};
            write_json_file(sidecar, side);
            if (sim_c.as_json) {
                out << side.dump(2) << '\n';
            } else {
                out << "wrote " << csv.string() << " (" << counts.total() << " trials) and " << sidecar.string() << '\n';
            }
            return kExitOk;
        }

        if (fit->parsed()) {
            const auto s = fit_ov.apply(load_json_file(fit_c.config));
            json meta = json::object();
            for (const auto& kv : fit_meta) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos || eq == 0) throw UsageError("--meta expects key=value, got '" + kv + "'");
                meta[kv.substr(0, eq)] = kv.substr(eq + 1);
            }
            meta["source"] = fit_in;
            const auto table = read_counts_csv(fs::path(fit_in));
            if (!table.ratings) return finish_type1(table.type1, s, meta, fit_c.out_path, fit_c.as_json, out);
            return finish_fit(*table.ratings, s, meta, fit_c.out_path, fit_c.as_json, out);
        }

        if (ana->parsed()) {
            const auto s = ana_ov.apply(load_json_file(ana_c.config));
            const auto log = harness::read_trial_log(ana_in);
            const auto validity = harness::validity_report(log.records);
            json meta = {{"model_id", log.header.model_id},
                         {"task", std::string(harness::to_string(log.header.task))},
                         {"risk", std::string(harness::to_string(log.header.risk))},
                         {"mode", std::string(harness::to_string(log.header.mode))},
                         {"source", ana_in},
                         {"validity", harness::to_json(validity)}};
            if (log.header.mode == harness::PromptMode::Type1Only) {
                return finish_type1(harness::tally_type1(log.records), s, meta, ana_c.out_path, ana_c.as_json, out);
            }
            return finish_fit(harness::tally(log.records, ana_h), s, meta, ana_c.out_path, ana_c.as_json, out);
        }

        if (cmp->parsed()) {
            const auto s = cmp_ov.apply(load_json_file(cmp_c.config));
            const auto stat_name = s.value("statistic", std::string("d_prime"));
            const int m = s.value("comparisons", 27);
            const double alpha = s.value("alpha", 0.05);
            const auto fit_opts = fit_options_from(s);
            Rope rope = stat_name == "log_m_ratio" ? Rope::log_m_ratio() : Rope::type1();
            rope.low = s.value("rope_low", rope.low);
            rope.high = s.value("rope_high", rope.high);

            ComparisonResult result;
            json extra = json::object();
            if (stat_name == "d_prime" || stat_name == "c") {
                auto load = [&](const std::string& path) -> DeltaEstimate {
                    double hr, far, n1, n2;
                    if (fs::path(path).extension() == ".json") {
                        const auto r = read_fit_report(path);
                        hr = r.hr, far = r.far, n1 = r.n_s1, n2 = r.n_s2;
                    } else {
                        const auto t = type1_stats(read_counts_csv(fs::path(path)).type1, fit_opts.edge_correction);
                        hr = t.hr, far = t.far, n1 = t.n_s1, n2 = t.n_s2;
                    }
                    return stat_name == "c" ? delta_c(hr, far, n1, n2) : delta_dprime(hr, far, n1, n2);
                };
                const auto a = load(cmp_a), b = load(cmp_b);
                result = z_test(a.value - b.value, a.variance + b.variance, m, alpha, rope);
                extra = {{"a", a.value}, {"b", b.value}, {"method", "delta"}};
            } else {
                const auto stat = parse_statistic(stat_name);
                if (!stat) throw UsageError("compare: unknown statistic '" + stat_name + "'");
                auto ratings = [](const std::string& path) {
                    if (fs::path(path).extension() == ".json") {
                        throw UsageError("compare: bootstrap statistics need counts files, not fit reports");
                    }
                    auto t = read_counts_csv(fs::path(path));
                    if (!t.ratings) throw UsageError("compare: " + path + " has no confidence ratings");
                    return *t.ratings;
                };
                const auto a = ratings(cmp_a), b = ratings(cmp_b);
                BootstrapOptions bo;
                bo.n_boot = s.value("bootstrap", 1000);
                bo.seed = s.value("seed", std::uint64_t{0});
                bo.threads = s.value("threads", 1);
                bo.level = 1.0 - alpha;
                bo.fit = fit_opts;
                const auto boot = bootstrap_difference_ci(a, b, *stat, bo);
                if (!(boot.standard_error > 0.0)) throw std::runtime_error("compare: bootstrap spread is zero");
                result = z_test(boot.point, boot.standard_error * boot.standard_error, m, alpha, rope);
                result.ci = {boot.low, boot.high};
                result.rope_verdict = rope_classify(result.ci, rope);
                extra = {{"method", "bootstrap"}, {"bootstrap", bootstrap_json(boot)}};
            }
            auto j = comparison_json(result, stat_name);
            j["inputs"] = {cmp_a, cmp_b};
            j.update(extra);
            const std::string verdict = stat_name + " difference " + fixed(result.diff) + " (z=" + fixed(result.z, 2) +
                                        ", threshold " + fixed(result.z_threshold, 2) + "): " +
                                        (result.statistically_significant ? "significant" : "not significant") +
                                        ", ROPE " + std::string(to_string(result.rope_verdict));
            j["verdict"] = verdict;
            if (!cmp_c.out_path.empty()) write_json_file(cmp_c.out_path, j);
            if (cmp_c.as_json) {
                out << j.dump(2) << '\n';
            } else {
                out << verdict << '\n';
            }
            return kExitOk;
        }

        if (runc->parsed()) {
            auto s = run_ov.apply(load_json_file(run_c.config));
            if (!run_c.out_path.empty()) s["output"] = run_c.out_path;
            if (retries_opt->count()) s["retry"]["max"] = r_retries;
            harness::RunConfig config;
            config.template_dir = METACOG_DEFAULT_TEMPLATE_DIR;
            harness::apply_config_json(config, s);
            const auto outcome = harness::run_experiment(config);
            json j = {{"log", outcome.log_path.string()},
                      {"resumed_records", outcome.resumed_records},
                      {"complete", outcome.complete},
                      {"aborted", outcome.aborted},
                      {"abort_reason", outcome.abort_reason},
                      {"validity", harness::to_json(outcome.validity)}};
            if (run_c.as_json) {
                out << j.dump(2) << '\n';
            } else {
                out << "attempted " << outcome.validity.attempted << ", valid " << outcome.validity.valid << ", invalid "
                    << outcome.validity.invalid << " -> " << outcome.log_path.string() << '\n';
                if (outcome.aborted) out << "aborted: " << outcome.abort_reason << '\n';
            }
            return outcome.aborted ? kExitAborted : kExitOk;
        }

        if (rep->parsed()) {
            if (rep_c.out_path.empty()) throw UsageError("report: --out directory is required");
            std::vector<fs::path> dirs(rep_dirs.begin(), rep_dirs.end());
            const auto bundle = build_report(dirs);
            const auto written = write_report(bundle, rep_c.out_path);
            const auto problems = validate_report(rep_c.out_path);
            for (const auto& p : problems) err << "self-check: " << p << '\n';
            for (const auto& sk : bundle.skipped) err << "skipped " << sk << '\n';
            if (rep_c.as_json) {
                out << to_json(bundle).dump(2) << '\n';
            } else {
                out << bundle.summary.size() << " fit reports, " << bundle.accuracy.size() << " accuracy rows, "
                    << bundle.criterion.size() << " criterion rows; wrote";
                for (const auto& w : written) out << ' ' << w.string();
                out << '\n';
            }
            return problems.empty() ? kExitOk : kExitError;
        }

        if (val->parsed()) {
            harness::TaskSpec spec;
            spec.dataset_path = v_path;
            spec.text_field = v_text;
            spec.label_field = v_label;
            const auto items = harness::load_dataset(spec);
            std::int64_t n1 = 0;
            for (const auto& it : items) n1 += it.label == Stimulus::S2;
            const json j = {{"dataset", v_path},
                            {"items", items.size()},
                            {"label_0", static_cast<std::int64_t>(items.size()) - n1},
                            {"label_1", n1}};
            if (val_c.as_json) {
                out << j.dump(2) << '\n';
            } else {
                out << v_path << ": " << items.size() << " items (" << j["label_0"] << " label 0, " << n1 << " label 1)\n";
            }
            if (!val_c.out_path.empty()) write_json_file(val_c.out_path, j);
            return kExitOk;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitUsage;
}

int main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace metacog::cli
