#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "metacog/harness/task.hpp"

namespace metacog::harness {

/// Versioned prompt templates loaded from `prompts.json` in a template dir.
///
/// Placeholders: {label0}, {label1} (class names of a task) and, inside the
/// risk clause, {risk_code} / {risk_label} for the high-risk response.
class TemplateSet {
public:
    static TemplateSet load(const std::filesystem::path& template_dir);
    static TemplateSet from_json(const nlohmann::json& j);

    const std::string& version() const noexcept { return version_; }

    /// Judge role, task instruction, optional risk paragraph, reply format,
    /// then the item text verbatim as the final element. Throws
    /// std::invalid_argument when no template is registered for (task, mode).
    std::string render(TaskKind task, RiskConfig risk, PromptMode mode, const std::string& item_text) const;

private:
    std::string version_;
    std::string judge_role_;
    std::map<TaskKind, std::string> task_instructions_;
    std::string risk_clause_;
    std::map<PromptMode, std::string> mode_instructions_;
    std::string item_header_;
};

/// Convenience wrapper over TemplateSet::render.
std::string render_prompt(const TemplateSet& templates, TaskKind task, RiskConfig risk, PromptMode mode,
                          const std::string& item_text);

}  // namespace metacog::harness
