#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "metacog/harness/task.hpp"

namespace metacog::harness {

/// Outcome of parsing one model reply. `reason` is empty for valid replies,
/// otherwise one of: empty, not_json, not_object, missing_decision,
/// missing_confidence, wrong_type, out_of_range.
struct ParsedResponse {
    std::optional<Stimulus> decision;
    std::optional<int> confidence;
    std::string reason;

    bool valid() const noexcept { return reason.empty(); }
};

/// Accepts exactly one JSON object, optionally inside a ``` / ```json fence
/// and surrounded by whitespace. decision: 0/1 as number or numeric string;
/// confidence (with_confidence mode only): integer in 1..max_confidence.
ParsedResponse parse_response(std::string_view raw, PromptMode mode, int max_confidence = 5);

}  // namespace metacog::harness
