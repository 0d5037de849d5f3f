#include "metacog/cli/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "metacog/csv.hpp"
#include "metacog/error.hpp"
#include "metacog/fit_report.hpp"
#include "metacog/harness/task.hpp"
#include "metacog/harness/trial_log.hpp"
#include "metacog/normal.hpp"
#include "metacog/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace metacog::cli {

const std::vector<std::string> kSummaryColumns = {
    "source", "model_id", "task",   "risk",   "mode",   "d_prime",      "d_prime_low", "d_prime_high",
    "c",      "c_low",    "c_high", "c_prime", "meta_d", "meta_c",      "m_ratio",     "ci_statistic",
    "ci_low", "ci_high",  "ci_level"};
const std::vector<std::string> kAccuracyColumns = {"source", "model_id", "task",     "risk",
                                                   "confidence", "n",    "n_correct", "accuracy"};
const std::vector<std::string> kCriterionColumns = {"source", "model_id", "task", "mode", "risk", "c", "c_low", "c_high"};

namespace {

int risk_rank(const std::string& risk) {
    if (risk == "S1") return 0;
    if (risk == "None") return 1;
    if (risk == "S2") return 2;
    return 3;
}

std::string meta_string(const json& meta, const char* key) {
    if (!meta.contains(key) || !meta.at(key).is_string()) return {};
    return meta.at(key).get<std::string>();
}

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << csv_field(fields[i]);
    }
    out << '\n';
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

SummaryRow summary_row(const fs::path& path, const FitReport& r) {
    SummaryRow row;
    row.source = path.string();
    row.model_id = meta_string(r.meta, "model_id");
    row.task = meta_string(r.meta, "task");
    row.risk = meta_string(r.meta, "risk");
    row.mode = meta_string(r.meta, "mode");
    row.d_prime = r.d_prime;
    row.c = r.c;
    row.c_prime = r.c_prime;
    row.meta_d = r.meta_d;
    row.meta_c = r.meta_c;
    row.m_ratio = r.m_ratio;
    if (r.hr > 0.0 && r.hr < 1.0 && r.far > 0.0 && r.far < 1.0 && r.n_s1 >= 1.0 && r.n_s2 >= 1.0) {
        const double z = probit(0.975);
        const double sd = std::sqrt(delta_var_dprime(r.hr, r.far, r.n_s1, r.n_s2));
        const double sc = std::sqrt(delta_var_c(r.hr, r.far, r.n_s1, r.n_s2));
        row.d_prime_low = r.d_prime - z * sd;
        row.d_prime_high = r.d_prime + z * sd;
        row.c_low = r.c - z * sc;
        row.c_high = r.c + z * sc;
    }
    if (r.ci) {
        row.ci_statistic = r.ci->statistic;
        row.ci_low = r.ci->low;
        row.ci_high = r.ci->high;
        row.ci_level = r.ci->level;
    }
    return row;
}

void add_accuracy(const fs::path& path, const harness::TrialLog& log, std::vector<AccuracyRow>& out) {
    if (log.header.mode != harness::PromptMode::WithConfidence) return;
    std::map<int, std::pair<std::int64_t, std::int64_t>> by_level;  // confidence -> (n, correct)
    for (const auto& r : log.records) {
        if (!r.valid() || !r.confidence) continue;
        auto& [n, k] = by_level[*r.confidence];
        ++n;
        if (*r.decision == r.true_label) ++k;
    }
    // Levels nobody used never appear in the map, so they produce no row.
    for (const auto& [level, nk] : by_level) {
        AccuracyRow row;
        row.source = path.string();
        row.model_id = log.header.model_id;
        row.task = std::string(harness::to_string(log.header.task));
        row.risk = std::string(harness::to_string(log.header.risk));
        row.confidence = level;
        row.n = nk.first;
        row.n_correct = nk.second;
        row.accuracy = static_cast<double>(nk.second) / static_cast<double>(nk.first);
        out.push_back(std::move(row));
    }
}

std::optional<double> parse_double(const std::string& s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end || !std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, p) : std::string();
}

ReportBundle build_report(const std::vector<fs::path>& dirs) {
    ReportBundle bundle;
    for (const auto& dir : dirs) {
        if (!fs::is_directory(dir)) throw IoError("report: not a directory: " + dir.string());
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.is_regular_file()) files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& path : files) {
            const auto ext = path.extension();
            try {
                if (ext == ".jsonl") {
                    const auto log = harness::read_trial_log(path);
                    add_accuracy(path, log, bundle.accuracy);
                    bundle.inputs.push_back(path.string());
                } else if (ext == ".json" && !path.string().ends_with(".sim.json")) {
                    const auto report = read_fit_report(path);
                    bundle.summary.push_back(summary_row(path, report));
                    bundle.inputs.push_back(path.string());
                }
            } catch (const std::exception& e) {
                bundle.skipped.push_back(path.string() + ": " + e.what());
            }
        }
    }
    if (bundle.inputs.empty()) throw std::invalid_argument("report: no fit reports or trial logs in the given directories");

    for (const auto& s : bundle.summary) {
        if (s.risk.empty()) continue;
        bundle.criterion.push_back({s.source, s.model_id, s.task, s.mode, s.risk, s.c, s.c_low, s.c_high});
    }
    std::stable_sort(bundle.criterion.begin(), bundle.criterion.end(), [](const CriterionRow& a, const CriterionRow& b) {
        return std::tie(a.model_id, a.task, a.mode) < std::tie(b.model_id, b.task, b.mode) ||
               (std::tie(a.model_id, a.task, a.mode) == std::tie(b.model_id, b.task, b.mode) &&
                risk_rank(a.risk) < risk_rank(b.risk));
    });
    return bundle;
}

json to_json(const ReportBundle& b) {
    json j;
    j["inputs"] = b.inputs;
    j["skipped"] = b.skipped;
    j["summary"] = json::array();
    for (const auto& s : b.summary) {
        j["summary"].push_back({{"source", s.source},
                                {"model_id", s.model_id},
                                {"task", s.task},
                                {"risk", s.risk},
                                {"mode", s.mode},
                                {"d_prime", s.d_prime},
                                {"d_prime_low", opt(s.d_prime_low)},
                                {"d_prime_high", opt(s.d_prime_high)},
                                {"c", s.c},
                                {"c_low", opt(s.c_low)},
                                {"c_high", opt(s.c_high)},
                                {"c_prime", opt(s.c_prime)},
                                {"meta_d", opt(s.meta_d)},
                                {"meta_c", opt(s.meta_c)},
                                {"m_ratio", opt(s.m_ratio)},
                                {"ci_statistic", s.ci_statistic},
                                {"ci_low", opt(s.ci_low)},
                                {"ci_high", opt(s.ci_high)},
                                {"ci_level", opt(s.ci_level)}});
    }
    j["accuracy_by_confidence"] = json::array();
    for (const auto& a : b.accuracy) {
        j["accuracy_by_confidence"].push_back({{"source", a.source},
                                               {"model_id", a.model_id},
                                               {"task", a.task},
                                               {"risk", a.risk},
                                               {"confidence", a.confidence},
                                               {"n", a.n},
                                               {"n_correct", a.n_correct},
                                               {"accuracy", a.accuracy}});
    }
    j["criterion_by_risk"] = json::array();
    for (const auto& c : b.criterion) {
        j["criterion_by_risk"].push_back({{"source", c.source},
                                          {"model_id", c.model_id},
                                          {"task", c.task},
                                          {"mode", c.mode},
                                          {"risk", c.risk},
                                          {"c", c.c},
                                          {"c_low", opt(c.c_low)},
                                          {"c_high", opt(c.c_high)}});
    }
    return j;
}

std::vector<fs::path> write_report(const ReportBundle& b, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    auto open = [](const fs::path& p) {
        std::ofstream out(p);
        if (!out) throw IoError("cannot write " + p.string());
        return out;
    };
    std::vector<fs::path> written;

    const auto summary_csv = out_dir / "summary.csv";
    {
        auto out = open(summary_csv);
        write_row(out, kSummaryColumns);
        for (const auto& s : b.summary) {
            write_row(out, {s.source, s.model_id, s.task, s.risk, s.mode, format_number(s.d_prime), cell(s.d_prime_low),
                            cell(s.d_prime_high), format_number(s.c), cell(s.c_low), cell(s.c_high), cell(s.c_prime),
                            cell(s.meta_d), cell(s.meta_c), cell(s.m_ratio), s.ci_statistic, cell(s.ci_low),
                            cell(s.ci_high), cell(s.ci_level)});
        }
    }
    written.push_back(summary_csv);

    const auto accuracy_csv = out_dir / "accuracy_by_confidence.csv";
    {
        auto out = open(accuracy_csv);
        write_row(out, kAccuracyColumns);
        for (const auto& a : b.accuracy) {
            write_row(out, {a.source, a.model_id, a.task, a.risk, std::to_string(a.confidence), std::to_string(a.n),
                            std::to_string(a.n_correct), format_number(a.accuracy)});
        }
    }
    written.push_back(accuracy_csv);

    const auto criterion_csv = out_dir / "criterion_by_risk.csv";
    {
        auto out = open(criterion_csv);
        write_row(out, kCriterionColumns);
        for (const auto& c : b.criterion) {
            write_row(out, {c.source, c.model_id, c.task, c.mode, c.risk, format_number(c.c), cell(c.c_low), cell(c.c_high)});
        }
    }
    written.push_back(criterion_csv);

    const auto summary_json = out_dir / "summary.json";
    {
        auto out = open(summary_json);
        out << to_json(b).dump(2) << '\n';
    }
    written.push_back(summary_json);
    return written;
}

std::vector<std::string> validate_report(const fs::path& out_dir) {
    std::vector<std::string> problems;
    // Column name -> required kind: 'n' number, 'o' optional number, 'i' integer, 's' string, 'p' existing path.
    struct Schema {
        const char* file;
        const std::vector<std::string>* columns;
        std::string kinds;
    };
    const Schema schemas[] = {
        {"summary.csv", &kSummaryColumns, "pssssnoonoooooosooo"},
        {"accuracy_by_confidence.csv", &kAccuracyColumns, "psssiiin"},
        {"criterion_by_risk.csv", &kCriterionColumns, "pssssnoo"},
    };
    for (const auto& schema : schemas) {
        const auto path = out_dir / schema.file;
        std::ifstream in(path);
        if (!in) {
            problems.push_back(path.string() + ": missing");
            continue;
        }
        std::vector<std::string> fields;
        std::size_t lineno = 0;
        if (!read_csv_record(in, ',', fields, lineno, path.string()) || fields != *schema.columns) {
            problems.push_back(path.string() + ": header does not match schema");
            continue;
        }
        const auto& cols = *schema.columns;
        while (true) {
            const auto line = lineno + 1;
            if (!read_csv_record(in, ',', fields, lineno, path.string())) break;
            const std::string where = path.string() + ":" + std::to_string(line);
            if (fields.size() != cols.size()) {
                problems.push_back(where + ": expected " + std::to_string(cols.size()) + " fields");
                continue;
            }
            for (std::size_t i = 0; i < cols.size(); ++i) {
                const auto& f = fields[i];
                const char kind = schema.kinds[i];
                if (kind == 'p' && !fs::exists(f)) problems.push_back(where + ": source '" + f + "' does not exist");
                if ((kind == 'n' || kind == 'i' || (kind == 'o' && !f.empty())) && !parse_double(f)) {
                    problems.push_back(where + ": column " + cols[i] + " is not a number");
                }
                if (kind == 'i' && parse_double(f) && std::floor(*parse_double(f)) != *parse_double(f)) {
                    problems.push_back(where + ": column " + cols[i] + " is not an integer");
                }
            }
            if (schema.columns == &kAccuracyColumns) {
                const auto n = parse_double(fields[5]), k = parse_double(fields[6]), acc = parse_double(fields[7]);
                if (acc && !(*acc >= 0.0 && *acc <= 1.0)) problems.push_back(where + ": accuracy outside [0, 1]");
                if (n && k && (*k > *n || *n < 1.0)) problems.push_back(where + ": inconsistent n / n_correct");
            }
        }
    }
    return problems;
}

}  // namespace metacog::cli
