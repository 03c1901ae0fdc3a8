#pragma once

#include <string>
#include <vector>

#include "toolsight/task.hpp"

namespace toolsight {

/// One question category plus the tool-use procedure the system prompt
/// recommends for it.
struct CategoryStrategy {
    std::string name;
    std::string description;
    std::vector<std::string> recommended_tools;
    std::vector<std::string> steps;
};

struct PromptBundle {
    std::string system_prompt;
    std::string prompt_version;
    std::vector<std::string> tool_subset;
    std::string answer_schema;
};

/// Task I: the five shared geometric core tools. Task II: core plus the
/// five analysis extensions.
std::vector<std::string> tool_subset(TaskKind task);

/// Built-in category tables: 7 strategies for Task I, 16 for Task II.
/// Every strategy's recommended tools validate against tool_subset(task).
std::vector<CategoryStrategy> category_table(TaskKind task);

/// Parse a human-editable strategy file (records of name/description/
/// tools/step lines introduced by "[category]").
std::vector<CategoryStrategy> parse_strategy_file(const std::string& text);
std::vector<CategoryStrategy> load_strategy_file(const std::string& path);

/// Built-in strategy file text (identical to the shipped data files).
const std::string& default_strategy_text(TaskKind task);

/// Deterministic system prompt for the task; optionally with a custom
/// category table (must validate against the task's tool subset).
PromptBundle build_system_prompt(TaskKind task);
PromptBundle build_system_prompt(TaskKind task, const std::vector<CategoryStrategy>& table);

/// Short form used by the rescue agent: category names and one-line
/// descriptions only.
std::string compressed_category_summary(TaskKind task);

}  // namespace toolsight
