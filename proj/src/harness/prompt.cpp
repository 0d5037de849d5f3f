#include "metacog/harness/prompt.hpp"
#include "metacog/error.hpp"

#include <fstream>
#include <stdexcept>

namespace metacog::harness {

using nlohmann::json;

namespace {

void replace_all(std::string& s, const std::string& from, const std::string& to) {
    for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) {
        s.replace(pos, from.size(), to);
    }
}

}  // namespace

TemplateSet TemplateSet::from_json(const json& j) {
    TemplateSet t;
    t.version_ = j.at("version").get<std::string>();
    t.judge_role_ = j.at("judge_role").get<std::string>();
    for (const auto& [key, value] : j.at("tasks").items()) {
        const auto kind = parse_task(key);
        if (!kind) throw std::invalid_argument("templates: unknown task '" + key + "'");
        t.task_instructions_[*kind] = value.at("instruction").get<std::string>();
    }
    t.risk_clause_ = j.at("risk_clause").get<std::string>();
    for (const auto& [key, value] : j.at("modes").items()) {
        const auto mode = parse_mode(key);
        if (!mode) throw std::invalid_argument("templates: unknown mode '" + key + "'");
        t.mode_instructions_[*mode] = value.get<std::string>();
    }
    t.item_header_ = j.value("item_header", std::string("Text:"));
    return t;
}

TemplateSet TemplateSet::load(const std::filesystem::path& template_dir) {
    const auto path = template_dir / "prompts.json";
    std::ifstream in(path);
    if (!in) throw metacog::IoError("cannot open prompt templates " + path.string());
    try {
        return from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw std::runtime_error("prompt templates " + path.string() + ": " + e.what());
    }
}

std::string TemplateSet::render(TaskKind task, RiskConfig risk, PromptMode mode, const std::string& item_text) const {
    const auto ti = task_instructions_.find(task);
    const auto mi = mode_instructions_.find(mode);
    if (ti == task_instructions_.end() || mi == mode_instructions_.end()) {
        throw std::invalid_argument("no prompt template registered for (" + std::string(to_string(task)) + ", " +
                                    std::string(to_string(mode)) + ")");
    }
    std::string out = judge_role_;
    out += "\n\n";
    std::string instruction = ti->second;
    replace_all(instruction, "{label0}", std::string(label_name(task, Stimulus::S1)));
    replace_all(instruction, "{label1}", std::string(label_name(task, Stimulus::S2)));
    out += instruction;
    out += "\n\n";
    if (risk != RiskConfig::None) {
        const Stimulus risky = risk == RiskConfig::S1 ? Stimulus::S1 : Stimulus::S2;
        std::string clause = risk_clause_;
        replace_all(clause, "{risk_code}", risky == Stimulus::S1 ? "0" : "1");
        replace_all(clause, "{risk_label}", std::string(label_name(task, risky)));
        out += clause;
        out += "\n\n";
    }
    out += mi->second;
    out += "\n\n";
    out += item_header_;
    out += "\n";
    out += item_text;
    return out;
}

std::string render_prompt(const TemplateSet& templates, TaskKind task, RiskConfig risk, PromptMode mode,
                          const std::string& item_text) {
    return templates.render(task, risk, mode, item_text);
}

}  // namespace metacog::harness
