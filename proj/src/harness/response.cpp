#include "metacog/harness/response.hpp"

#include <cctype>
#include <cmath>

#include <json.hpp>

namespace metacog::harness {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string_view strip_fence(std::string_view s) {
    if (!s.starts_with("```")) return s;
    s.remove_prefix(3);
    // Optional language tag directly after the opening fence.
    while (!s.empty() && std::isalpha(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    s = trim(s);
    if (s.ends_with("```")) s.remove_suffix(3);
    return trim(s);
}

ParsedResponse invalid(const char* reason) {
    ParsedResponse r;
    r.reason = reason;
    return r;
}

// Integral value of a JSON number; nullopt when not an integer-valued number.
std::optional<long long> integral(const json& v) {
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 1e9) return static_cast<long long>(d);
    }
    return std::nullopt;
}

}  // namespace

ParsedResponse parse_response(std::string_view raw, PromptMode mode, int max_confidence) {
    const std::string_view body = strip_fence(trim(raw));
    if (body.empty()) return invalid("empty");
    json j;
    try {
        j = json::parse(body.begin(), body.end());
    } catch (const json::parse_error&) {
        return invalid("not_json");
    }
    if (!j.is_object()) return invalid("not_object");
    if (!j.contains("decision")) return invalid("missing_decision");

    const json& d = j.at("decision");
    long long decision = -1;
    if (d.is_string()) {
        const auto& s = d.get_ref<const std::string&>();
        if (s == "0") {
            decision = 0;
        } else if (s == "1") {
            decision = 1;
        } else {
            return invalid(s.find_first_not_of("0123456789") == std::string::npos && !s.empty() ? "out_of_range"
                                                                                                : "wrong_type");
        }
    } else if (auto v = integral(d)) {
        decision = *v;
    } else {
        return invalid("wrong_type");
    }
    if (decision != 0 && decision != 1) return invalid("out_of_range");

    ParsedResponse r;
    r.decision = decision == 0 ? Stimulus::S1 : Stimulus::S2;
    if (mode == PromptMode::WithConfidence) {
        if (!j.contains("confidence")) return invalid("missing_confidence");
        const auto c = integral(j.at("confidence"));
        if (!c) return invalid("wrong_type");
        if (*c < 1 || *c > max_confidence) return invalid("out_of_range");
        r.confidence = static_cast<int>(*c);
    }
    return r;
}

}  // namespace metacog::harness
