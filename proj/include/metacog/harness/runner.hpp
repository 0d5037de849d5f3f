#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "metacog/harness/client.hpp"
#include "metacog/harness/dataset.hpp"
#include "metacog/harness/prompt.hpp"
#include "metacog/harness/trial_log.hpp"

namespace metacog::harness {

struct RetryPolicy {
    int max = 3;            ///< retries after the first attempt
    int backoff_ms = 500;   ///< doubled after every failed attempt
};

struct RunConfig {
    std::string endpoint_url;
    std::string model_id;
    TaskKind task = TaskKind::ASentiment;
    RiskConfig risk = RiskConfig::None;
    PromptMode mode = PromptMode::WithConfidence;
    std::optional<std::int64_t> n_trials;  ///< unset: default_trial_count(task); 0: every prepared item
    int concurrency = 4;
    RetryPolicy retry;
    double invalid_ceiling = 0.05;
    std::int64_t min_trials_for_ceiling = 100;
    double rate_limit_per_sec = 0.0;  ///< 0: unlimited
    std::uint64_t seed = 0;
    std::filesystem::path template_dir;
    std::filesystem::path dataset_path;
    std::string text_field;
    std::string label_field = "label";
    std::filesystem::path output_path;
    std::string api_key_env = "METACOG_API_KEY";
    nlohmann::json decoding = nlohmann::json::object();  ///< pass-through (temperature, ...)
    std::string target_word = "the";
    double p_delete = 0.5;
    int timeout_seconds = 120;

    /// Throws std::invalid_argument describing the first missing/bad field.
    void validate() const;
};

/// Overlays the keys present in `j` onto `config`.
void apply_config_json(RunConfig& config, const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

struct PreparedItem {
    std::int64_t trial_id = 0;
    std::string text;
    Stimulus label = Stimulus::S1;
};

/// Dataset (or depletion corpus for task C) sampled deterministically by seed.
std::vector<PreparedItem> prepare_items(const RunConfig& config);

struct RunHooks {
    /// Stop dispatching once this many records have been persisted in this
    /// session (simulates an interrupted run).
    std::optional<std::int64_t> stop_after;
};

struct RunOutcome {
    std::filesystem::path log_path;
    ValidityReport validity;
    std::int64_t resumed_records = 0;  ///< records found on disk at start
    bool aborted = false;
    std::string abort_reason;
    bool complete = false;  ///< every prepared item has a record
};

/// Runs (or resumes) an experiment. Each item is one fresh single-message
/// conversation; transport failures are retried with exponential backoff,
/// malformed replies are recorded as invalid and never re-asked.
RunOutcome run_experiment(const RunConfig& config, ChatClient& client, const RunHooks& hooks = {});

/// Same, with an HttpChatClient built from the config and the API key read
/// from the configured environment variable.
RunOutcome run_experiment(const RunConfig& config);

}  // namespace metacog::harness
