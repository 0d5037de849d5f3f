#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "metacog/harness/task.hpp"

namespace metacog::harness {

inline constexpr const char* kTrialLogSchema = "metacog.trial_log";
inline constexpr int kTrialLogVersion = 1;

struct AttemptOutcome {
    int attempt = 0;
    int http_status = 0;  ///< 0 for transport-level failures
    std::string error;
    double latency_ms = 0.0;
};

struct TrialRecord {
    std::int64_t trial_id = 0;
    TaskKind task = TaskKind::ASentiment;
    RiskConfig risk = RiskConfig::None;
    PromptMode mode = PromptMode::WithConfidence;
    std::string input_text;
    Stimulus true_label = Stimulus::S1;
    std::string raw_response;
    std::optional<Stimulus> decision;
    std::optional<int> confidence;
    std::string invalid_reason;  ///< empty when valid
    std::string model_id;
    std::string request_timestamp;  ///< ISO 8601 UTC
    double latency_ms = 0.0;
    int attempt_count = 0;
    std::vector<AttemptOutcome> attempts;

    bool valid() const noexcept { return invalid_reason.empty() && decision.has_value(); }
};

/// First line of every trial log.
struct TrialLogHeader {
    TaskKind task = TaskKind::ASentiment;
    RiskConfig risk = RiskConfig::None;
    PromptMode mode = PromptMode::WithConfidence;
    std::string model_id;
    std::string endpoint_url;
    std::string template_version;
    std::uint64_t seed = 0;
    nlohmann::json decoding = nlohmann::json::object();
    std::vector<std::string> assumptions;
    std::string created;
};

nlohmann::json to_json(const TrialRecord& r);
TrialRecord trial_record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrialLogHeader& h);
TrialLogHeader trial_log_header_from_json(const nlohmann::json& j);

struct TrialLog {
    TrialLogHeader header;
    std::vector<TrialRecord> records;
    bool truncated_tail = false;  ///< last line was incomplete and was skipped
    std::uintmax_t valid_bytes = 0;  ///< file prefix holding complete lines
};

/// Throws std::runtime_error on a missing/foreign header or a corrupt
/// non-final line. An incomplete final line is reported, not fatal.
TrialLog read_trial_log(const std::filesystem::path& path);

/// Append-only JSONL writer; safe to call from several threads.
class TrialLogWriter {
public:
    /// Creates the file with `header`, or reopens an existing log for appending
    /// after truncating it to `keep_bytes` (dropping a partial tail line).
    TrialLogWriter(const std::filesystem::path& path, const TrialLogHeader& header,
                   std::optional<std::uintmax_t> keep_bytes = std::nullopt);

    void append(const TrialRecord& record);

private:
    std::mutex mutex_;
    std::ofstream out_;
};

struct ValidityReport {
    std::int64_t attempted = 0;
    std::int64_t valid = 0;
    std::int64_t invalid = 0;
    std::map<std::string, std::int64_t> reasons;
    std::vector<std::int64_t> invalid_trial_ids;

    double invalid_rate() const noexcept {
        return attempted > 0 ? static_cast<double>(invalid) / static_cast<double>(attempted) : 0.0;
    }
};

ValidityReport validity_report(const std::vector<TrialRecord>& records);
nlohmann::json to_json(const ValidityReport& v);

/// Current UTC time in ISO 8601 with milliseconds.
std::string utc_timestamp();

}  // namespace metacog::harness
