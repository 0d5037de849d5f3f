#include "metacog/harness/task.hpp"

namespace metacog::harness {

std::string_view to_string(TaskKind t) noexcept {
    switch (t) {
        case TaskKind::ASentiment: return "A_sentiment";
        case TaskKind::BOralWritten: return "B_oral_written";
        case TaskKind::CWordDepletion: return "C_word_depletion";
    }
    return "A_sentiment";
}

std::string_view to_string(RiskConfig r) noexcept {
    switch (r) {
        case RiskConfig::S1: return "S1";
        case RiskConfig::None: return "None";
        case RiskConfig::S2: return "S2";
    }
    return "None";
}

std::string_view to_string(PromptMode m) noexcept {
    return m == PromptMode::WithConfidence ? "with_confidence" : "type1_only";
}

std::optional<TaskKind> parse_task(std::string_view text) noexcept {
    if (text == "A" || text == "A_sentiment") return TaskKind::ASentiment;
    if (text == "B" || text == "B_oral_written") return TaskKind::BOralWritten;
    if (text == "C" || text == "C_word_depletion") return TaskKind::CWordDepletion;
    return std::nullopt;
}

std::optional<RiskConfig> parse_risk(std::string_view text) noexcept {
    if (text == "S1") return RiskConfig::S1;
    if (text == "None" || text == "none") return RiskConfig::None;
    if (text == "S2") return RiskConfig::S2;
    return std::nullopt;
}

std::optional<PromptMode> parse_mode(std::string_view text) noexcept {
    if (text == "with_confidence") return PromptMode::WithConfidence;
    if (text == "type1_only") return PromptMode::Type1Only;
    return std::nullopt;
}

std::string_view label_name(TaskKind task, Stimulus s) noexcept {
    const bool s2 = s == Stimulus::S2;
    switch (task) {
        case TaskKind::ASentiment: return s2 ? "positive" : "negative";
        case TaskKind::BOralWritten: return s2 ? "written" : "oral";
        case TaskKind::CWordDepletion: return s2 ? "deleted" : "unchanged";
    }
    return s2 ? "S2" : "S1";
}

std::int64_t default_trial_count(TaskKind task) noexcept { return task == TaskKind::ASentiment ? 20000 : 10000; }

std::string label_mapping(TaskKind task) {
    return std::string(label_name(task, Stimulus::S1)) + "=0->S1, " + std::string(label_name(task, Stimulus::S2)) +
           "=1->S2";
}

}  // namespace metacog::harness
