#pragma once

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "toolsight/probes.hpp"
#include "toolsight/registry.hpp"
#include "toolsight/task.hpp"

namespace toolsight {

struct ImageAttachment {
    ResourceId id;
    std::vector<std::uint8_t> png;
};

struct ToolCall {
    std::string call_id;
    std::string tool_name;
    nlohmann::json arguments;  // flat key/value record
};

struct Message {
    enum class Role { System, User, Assistant, Tool };
    Role role = Role::User;
    std::string text;
    std::vector<ImageAttachment> images;
    std::vector<ToolCall> tool_calls;   // assistant messages only
    std::string tool_result_for;        // tool messages: the call id answered
};

/// Exactly one variant is populated: a non-empty tool_calls list, or a
/// final verdict (parsed FinalAnswer when the backend produces one, else
/// just raw_text for the caller to parse).
struct ModelReply {
    std::vector<ToolCall> tool_calls;
    std::optional<FinalAnswer> final_answer;
    std::string raw_text;

    bool is_tool_round() const { return !tool_calls.empty(); }
};

struct GenerationSettings {
    double temperature = 0.0;
    std::string model_name = "scripted";
    int max_output_tokens = 4096;
};

class ModelBackend {
public:
    virtual ~ModelBackend() = default;
    /// history must begin with exactly one system message.
    virtual ModelReply generate(const std::vector<Message>& history,
                                const std::vector<nlohmann::json>& tools,
                                const GenerationSettings& settings) = 0;
    virtual std::string name() const = 0;
};

/// Throws ConfigError unless history starts with one system message and
/// contains no other system messages.
void validate_history(const std::vector<Message>& history);

/// Stable hash of a conversation prefix; recording/replay keys on it.
std::string history_hash(const std::vector<Message>& history);

nlohmann::json reply_to_json(const ModelReply& reply);
ModelReply reply_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Scripted test-double backends.

enum class ScriptedPolicy { Oracle, AlwaysPositive, NeverFinalize };

ScriptedPolicy scripted_policy_from_name(const std::string& name);

struct SampleContext {
    std::string sample_id;
    TaskKind task = TaskKind::TaskI;
    std::string question;
    std::optional<ProbeInfo> probes;  // required by the oracle policy
};

/// Deterministic per-sample backend. The oracle issues the category's
/// prescribed tool sequence and decides from tool outputs (observations
/// and decoded result pixels) only; always_positive finalizes the
/// illusion-affirming answer immediately; never_finalize emits a crop
/// call forever.
std::unique_ptr<ModelBackend> make_scripted_backend(ScriptedPolicy policy,
                                                    const SampleContext& ctx);

// ---------------------------------------------------------------------------
// Record / replay.

/// Wraps any backend and appends every (history hash, reply) pair to a
/// JSON recording at `path` (written on destruction or flush()).
class RecordingBackend : public ModelBackend {
public:
    RecordingBackend(std::unique_ptr<ModelBackend> inner, std::string path);
    ~RecordingBackend() override;
    ModelReply generate(const std::vector<Message>& history,
                        const std::vector<nlohmann::json>& tools,
                        const GenerationSettings& settings) override;
    std::string name() const override;
    void flush();

private:
    std::unique_ptr<ModelBackend> inner_;
    std::string path_;
    nlohmann::json rounds_ = nlohmann::json::array();
    bool flushed_ = false;
};

/// Serves recorded replies by position, failing on any history-hash
/// divergence (ReplayDivergenceError) or when the recording runs out
/// (ReplayExhaustedError).
std::unique_ptr<ModelBackend> make_replay_backend(const std::string& path);

// ---------------------------------------------------------------------------
// Live chat-completions backend.

struct LiveConfig {
    std::string base_url;          // e.g. https://api.example.com
    std::string path = "/v1/chat/completions";
    std::string model_name;
    std::string api_key_env = "TOOLSIGHT_API_KEY";
    int max_retries = 3;           // transport errors only
    int retry_base_ms = 500;       // exponential backoff base
    int max_image_edge = 0;        // 0 = send full resolution
    bool verbose = false;          // log request/response (credentials redacted)
};

std::unique_ptr<ModelBackend> make_live_backend(LiveConfig cfg);

/// Number of connection attempts the live transport has made in this
/// process. Scripted/replay paths never touch it; tests assert it stays 0.
std::uint64_t live_connection_attempts();

// ---------------------------------------------------------------------------
// Per-sample backend construction (harness fan-out).

class BackendFactory {
public:
    virtual ~BackendFactory() = default;
    virtual std::unique_ptr<ModelBackend> make(const SampleContext& ctx) = 0;
};

std::unique_ptr<BackendFactory> scripted_factory(ScriptedPolicy policy);
std::unique_ptr<BackendFactory> replay_factory(std::string dir);
std::unique_ptr<BackendFactory> live_factory(LiveConfig cfg);
/// Wraps another factory; recordings land in <dir>/<sample_id>.replay.json.
std::unique_ptr<BackendFactory> recording_factory(std::unique_ptr<BackendFactory> inner,
                                                  std::string dir);

}  // namespace toolsight
