#include "metacog/harness/trial_log.hpp"
#include "metacog/error.hpp"

#include <chrono>
#include <ctime>
#include <stdexcept>

namespace metacog::harness {

using nlohmann::json;

namespace {

template <typename T, typename Parse>
T parse_enum(const json& j, const char* key, Parse parse) {
    const auto v = parse(j.at(key).get<std::string>());
    if (!v) throw metacog::ParseError("", 0, std::string("trial log: bad '") + key + "'");
    return *v;
}

}  // namespace

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const auto t = std::chrono::system_clock::to_time_t(now);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[40];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    char out[48];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
    return out;
}

json to_json(const TrialRecord& r) {
    json attempts = json::array();
    for (const auto& a : r.attempts) {
        attempts.push_back({{"attempt", a.attempt}, {"http_status", a.http_status}, {"error", a.error},
                            {"latency_ms", a.latency_ms}});
    }
    return {{"trial_id", r.trial_id},
            {"task", to_string(r.task)},
            {"risk", to_string(r.risk)},
            {"mode", to_string(r.mode)},
            {"input_text", r.input_text},
            {"true_label", to_string(r.true_label)},
            {"raw_response", r.raw_response},
            {"decision", r.decision ? json(to_string(*r.decision)) : json(nullptr)},
            {"confidence", r.confidence ? json(*r.confidence) : json(nullptr)},
            {"invalid_reason", r.invalid_reason.empty() ? json(nullptr) : json(r.invalid_reason)},
            {"model_id", r.model_id},
            {"request_timestamp", r.request_timestamp},
            {"latency_ms", r.latency_ms},
            {"attempt_count", r.attempt_count},
            {"attempts", attempts}};
}

TrialRecord trial_record_from_json(const json& j) {
    TrialRecord r;
    r.trial_id = j.at("trial_id").get<std::int64_t>();
    r.task = parse_enum<TaskKind>(j, "task", parse_task);
    r.risk = parse_enum<RiskConfig>(j, "risk", parse_risk);
    r.mode = parse_enum<PromptMode>(j, "mode", parse_mode);
    r.input_text = j.at("input_text").get<std::string>();
    const auto label = parse_stimulus(j.at("true_label").get<std::string>());
    if (!label) throw metacog::ParseError("", 0, "trial log: bad true_label");
    r.true_label = *label;
    r.raw_response = j.value("raw_response", std::string());
    if (j.contains("decision") && !j.at("decision").is_null()) {
        r.decision = parse_stimulus(j.at("decision").get<std::string>());
        if (!r.decision) throw metacog::ParseError("", 0, "trial log: bad decision");
    }
    if (j.contains("confidence") && !j.at("confidence").is_null()) r.confidence = j.at("confidence").get<int>();
    if (j.contains("invalid_reason") && !j.at("invalid_reason").is_null()) {
        r.invalid_reason = j.at("invalid_reason").get<std::string>();
    }
    r.model_id = j.value("model_id", std::string());
    r.request_timestamp = j.value("request_timestamp", std::string());
    r.latency_ms = j.value("latency_ms", 0.0);
    r.attempt_count = j.value("attempt_count", 0);
    if (j.contains("attempts")) {
        for (const auto& a : j.at("attempts")) {
            r.attempts.push_back({a.value("attempt", 0), a.value("http_status", 0), a.value("error", std::string()),
                                  a.value("latency_ms", 0.0)});
        }
    }
    return r;
}

json to_json(const TrialLogHeader& h) {
    return {{"schema", kTrialLogSchema},
            {"schema_version", kTrialLogVersion},
            {"task", to_string(h.task)},
            {"risk", to_string(h.risk)},
            {"mode", to_string(h.mode)},
            {"model_id", h.model_id},
            {"endpoint_url", h.endpoint_url},
            {"label_mapping", label_mapping(h.task)},
            {"template_version", h.template_version},
            {"seed", h.seed},
            {"decoding", h.decoding},
            {"assumptions", h.assumptions},
            {"created", h.created}};
}

TrialLogHeader trial_log_header_from_json(const json& j) {
    if (!j.is_object() || j.value("schema", std::string()) != kTrialLogSchema) {
        throw metacog::ParseError("", 0, "trial log: missing schema header");
    }
    if (j.value("schema_version", 0) != kTrialLogVersion) throw metacog::ParseError("", 0, "trial log: unsupported schema version");
    TrialLogHeader h;
    h.task = parse_enum<TaskKind>(j, "task", parse_task);
    h.risk = parse_enum<RiskConfig>(j, "risk", parse_risk);
    h.mode = parse_enum<PromptMode>(j, "mode", parse_mode);
    h.model_id = j.value("model_id", std::string());
    h.endpoint_url = j.value("endpoint_url", std::string());
    h.template_version = j.value("template_version", std::string());
    h.seed = j.value("seed", std::uint64_t{0});
    h.decoding = j.value("decoding", json::object());
    h.assumptions = j.value("assumptions", std::vector<std::string>{});
    h.created = j.value("created", std::string());
    return h;
}

TrialLog read_trial_log(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw metacog::IoError("cannot open trial log " + path.string());
    TrialLog log;
    std::string line;
    std::size_t lineno = 0;
    std::uintmax_t offset = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        const bool complete = !in.eof();  // getline stopped at '\n'
        const std::uintmax_t next = offset + line.size() + (complete ? 1 : 0);
        if (line.empty()) {
            offset = next;
            if (complete) log.valid_bytes = offset;
            continue;
        }
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error&) {
            if (!complete) {
                log.truncated_tail = true;
                break;
            }
            throw metacog::ParseError("", 0, path.string() + ":" + std::to_string(lineno) + ": corrupt trial record");
        }
        if (!complete) {
            // A parseable but unterminated final line is still a partial write.
            log.truncated_tail = true;
            break;
        }
        if (!header_seen) {
            log.header = trial_log_header_from_json(j);
            header_seen = true;
        } else {
            log.records.push_back(trial_record_from_json(j));
        }
        offset = next;
        log.valid_bytes = offset;
    }
    if (!header_seen) throw metacog::ParseError("", 0, "trial log " + path.string() + ": missing header line");
    return log;
}

TrialLogWriter::TrialLogWriter(const std::filesystem::path& path, const TrialLogHeader& header,
                               std::optional<std::uintmax_t> keep_bytes) {
    if (keep_bytes) {
        std::filesystem::resize_file(path, *keep_bytes);
        out_.open(path, std::ios::binary | std::ios::app);
        if (!out_) throw metacog::IoError("cannot append to trial log " + path.string());
        return;
    }
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw metacog::IoError("cannot create trial log " + path.string());
    out_ << to_json(header).dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
    out_.flush();
}

void TrialLogWriter::append(const TrialRecord& record) {
    const std::string line = to_json(record).dump(-1, ' ', false, json::error_handler_t::replace);
    std::lock_guard lock(mutex_);
    out_ << line << '\n';
    out_.flush();
}

ValidityReport validity_report(const std::vector<TrialRecord>& records) {
    ValidityReport v;
    for (const auto& r : records) {
        ++v.attempted;
        if (r.valid()) {
            ++v.valid;
        } else {
            ++v.invalid;
            ++v.reasons[r.invalid_reason.empty() ? "unknown" : r.invalid_reason];
            v.invalid_trial_ids.push_back(r.trial_id);
        }
    }
    return v;
}

json to_json(const ValidityReport& v) {
    return {{"attempted", v.attempted},
            {"valid", v.valid},
            {"invalid", v.invalid},
            {"invalid_rate", v.invalid_rate()},
            {"reasons", v.reasons},
            {"invalid_trial_ids", v.invalid_trial_ids}};
}

}  // namespace metacog::harness
