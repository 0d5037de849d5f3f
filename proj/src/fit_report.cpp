#include "metacog/fit_report.hpp"
#include "metacog/error.hpp"

#include <fstream>
#include <stdexcept>

namespace metacog {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    if (!j.at(key).is_number()) throw metacog::ParseError("", 0, std::string("fit report: '") + key + "' must be a number");
    return j.at(key).get<double>();
}

double read_required(const json& j, const char* key) {
    const auto v = read_optional(j, key);
    if (!v) throw metacog::ParseError("", 0, std::string("fit report: missing '") + key + "'");
    return *v;
}

}  // namespace

FitReport make_fit_report(const FitResult& fit, std::optional<BootstrapResult> ci, json meta) {
    FitReport r;
    r.meta_d = fit.params.meta_d;
    r.meta_c = fit.params.meta_c;
    r.t2_criteria_s1 = fit.params.t2_criteria_s1;
    r.t2_criteria_s2 = fit.params.t2_criteria_s2;
    r.d_prime = fit.type1.d_prime;
    r.c = fit.type1.c;
    r.c_prime = fit.type1.c_prime;
    r.m_ratio = fit.m_ratio;
    r.log_likelihood = fit.log_likelihood;
    r.converged = fit.converged;
    r.iterations = fit.iterations;
    r.hr = fit.type1.hr;
    r.far = fit.type1.far;
    r.n_s1 = fit.type1.n_s1;
    r.n_s2 = fit.type1.n_s2;
    r.ci = std::move(ci);
    r.meta = std::move(meta);
    return r;
}

FitReport make_type1_report(const Type1Stats& stats, json meta) {
    FitReport r;
    r.d_prime = stats.d_prime;
    r.c = stats.c;
    r.c_prime = stats.c_prime;
    r.hr = stats.hr;
    r.far = stats.far;
    r.n_s1 = stats.n_s1;
    r.n_s2 = stats.n_s2;
    r.meta = std::move(meta);
    return r;
}

json to_json(const FitReport& r) {
    json j;
    j["meta_d"] = optional_number(r.meta_d);
    j["meta_c"] = optional_number(r.meta_c);
    j["t2_criteria_s1"] = r.t2_criteria_s1;
    j["t2_criteria_s2"] = r.t2_criteria_s2;
    j["d_prime"] = r.d_prime;
    j["c"] = r.c;
    j["c_prime"] = optional_number(r.c_prime);
    j["m_ratio"] = optional_number(r.m_ratio);
    j["log_likelihood"] = optional_number(r.log_likelihood);
    j["converged"] = r.converged ? json(*r.converged) : json(nullptr);
    j["iterations"] = r.iterations ? json(*r.iterations) : json(nullptr);
    j["type1"] = {{"hr", r.hr}, {"far", r.far}, {"n_s1", r.n_s1}, {"n_s2", r.n_s2}};
    if (r.ci) {
        j["ci"] = {{"statistic", r.ci->statistic}, {"low", r.ci->low},      {"high", r.ci->high},
                   {"level", r.ci->level},         {"n_boot", r.ci->n_boot}, {"seed", r.ci->seed},
                   {"failed", r.ci->failed},       {"point", r.ci->point},   {"standard_error", r.ci->standard_error}};
    }
    j["meta"] = r.meta;
    return j;
}

FitReport fit_report_from_json(const json& j) {
    if (!j.is_object()) throw metacog::ParseError("", 0, "fit report: expected a JSON object");
    FitReport r;
    r.meta_d = read_optional(j, "meta_d");
    r.meta_c = read_optional(j, "meta_c");
    if (j.contains("t2_criteria_s1")) r.t2_criteria_s1 = j.at("t2_criteria_s1").get<std::vector<double>>();
    if (j.contains("t2_criteria_s2")) r.t2_criteria_s2 = j.at("t2_criteria_s2").get<std::vector<double>>();
    r.d_prime = read_required(j, "d_prime");
    r.c = read_required(j, "c");
    r.c_prime = read_optional(j, "c_prime");
    r.m_ratio = read_optional(j, "m_ratio");
    r.log_likelihood = read_optional(j, "log_likelihood");
    if (j.contains("converged") && j.at("converged").is_boolean()) r.converged = j.at("converged").get<bool>();
    if (j.contains("iterations") && j.at("iterations").is_number_integer()) r.iterations = j.at("iterations").get<int>();
    if (j.contains("type1")) {
        const auto& t = j.at("type1");
        r.hr = read_required(t, "hr");
        r.far = read_required(t, "far");
        r.n_s1 = read_required(t, "n_s1");
        r.n_s2 = read_required(t, "n_s2");
    }
    if (j.contains("ci") && j.at("ci").is_object()) {
        const auto& c = j.at("ci");
        BootstrapResult b;
        b.statistic = c.at("statistic").get<std::string>();
        b.low = read_required(c, "low");
        b.high = read_required(c, "high");
        b.level = read_required(c, "level");
        b.n_boot = c.at("n_boot").get<int>();
        b.seed = c.at("seed").get<std::uint64_t>();
        b.failed = c.value("failed", 0);
        b.point = c.value("point", 0.0);
        b.standard_error = c.value("standard_error", 0.0);
        r.ci = b;
    }
    if (j.contains("meta") && j.at("meta").is_object()) r.meta = j.at("meta");
    return r;
}

void write_fit_report(const std::filesystem::path& path, const FitReport& report) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write fit report " + path.string());
    out << to_json(report).dump(2) << '\n';
}

FitReport read_fit_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open fit report " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw metacog::ParseError("", 0, "fit report " + path.string() + ": " + e.what());
    }
    return fit_report_from_json(j);
}

}  // namespace metacog
