#pragma once

#include <string>
#include <vector>

#include "toolsight/model.hpp"
#include "toolsight/registry.hpp"
#include "toolsight/routing.hpp"
#include "toolsight/tools.hpp"

namespace toolsight {

/// Result of dispatching one tool call: a ToolOutcome or an error text
/// surfaced back to the model.
struct CallOutcome {
    bool ok = false;
    ToolOutcome outcome;    // valid when ok
    std::string error;      // valid when !ok
};

struct RoundRecord {
    int round_index = 0;
    std::vector<ToolCall> tool_calls;
    std::vector<CallOutcome> outcomes;
    std::string model_raw;
};

struct Transcript {
    std::string sample_id;
    TaskKind task = TaskKind::TaskI;
    std::string prompt_version;
    std::vector<RoundRecord> rounds;
    std::vector<RoundRecord> rescue_rounds;
    FinalAnswer final;
    bool used_rescue = false;
    bool used_fallback = false;
    std::string model_name;

    nlohmann::json to_json() const;
    static Transcript from_json(const nlohmann::json& j);

    /// Every tool name invoked at least once (successful or failed),
    /// across main and rescue rounds.
    std::vector<std::string> tools_used() const;
};

struct AgentConfig {
    int max_rounds = 10;
    int rescue_max_rounds = 3;
    /// Defaults lean against the positive-detection prior for Task I.
    std::string fallback_verdict_task1 = "No";
    std::string fallback_verdict_task2 = "A";
    GenerationSettings settings;

    FinalAnswer fallback_answer(TaskKind task) const;
};

struct RunResult {
    Transcript transcript;
    Registry registry;
};

/// Bounded per-sample reasoning loop. Always yields a FinalAnswer of the
/// task's variant, falling back through the rescue agent when the round
/// limit or the backend gives out.
RunResult run_sample(const AgentConfig& cfg, ModelBackend& backend, TaskKind task,
                     const Raster& image, const std::string& question,
                     const std::string& sample_id = "sample");

/// Strict fenced-block extraction first, then a lenient scan for the last
/// standalone verdict token. Throws MalformedReplyError when both fail.
FinalAnswer parse_final(const std::string& raw_text, TaskKind task);

void save_transcript(const Transcript& t, const std::string& path);
Transcript load_transcript(const std::string& path);

}  // namespace toolsight
