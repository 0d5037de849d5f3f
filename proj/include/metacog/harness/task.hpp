#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "metacog/sdt.hpp"

namespace metacog::harness {

enum class TaskKind { ASentiment, BOralWritten, CWordDepletion };
enum class RiskConfig { S1, None, S2 };
enum class PromptMode { WithConfidence, Type1Only };

std::string_view to_string(TaskKind t) noexcept;
std::string_view to_string(RiskConfig r) noexcept;
std::string_view to_string(PromptMode m) noexcept;
std::optional<TaskKind> parse_task(std::string_view text) noexcept;
std::optional<RiskConfig> parse_risk(std::string_view text) noexcept;
std::optional<PromptMode> parse_mode(std::string_view text) noexcept;

/// Human name of the class a label denotes, e.g. ("written") for task B / S2.
/// Label 0 is always S1, label 1 always S2.
std::string_view label_name(TaskKind task, Stimulus s) noexcept;

/// "negative=0->S1, positive=1->S2" style description for run metadata.
std::string label_mapping(TaskKind task);

/// Trials per estimate used when a run does not say: 2 x 10^4 for the
/// sentiment task (very high d'), 10^4 otherwise.
std::int64_t default_trial_count(TaskKind task) noexcept;

struct TaskSpec {
    TaskKind kind = TaskKind::ASentiment;
    std::filesystem::path dataset_path;
    std::string text_field;         ///< empty: auto-detect "sentence" or "text"
    std::string label_field = "label";
};

}  // namespace metacog::harness
