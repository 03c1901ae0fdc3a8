#include "toolsight/agent.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "toolsight/image_io.hpp"

namespace toolsight {

FinalAnswer AgentConfig::fallback_answer(TaskKind task) const {
    return {task, task == TaskKind::TaskI ? fallback_verdict_task1 : fallback_verdict_task2,
            "fallback answer"};
}

namespace {

constexpr const char* kShowResource = "show_resource";

Message make_tool_message(const Registry& reg, const ToolCall& call, const CallOutcome& out) {
    Message msg;
    msg.role = Message::Role::Tool;
    msg.tool_result_for = call.call_id;
    if (out.ok) {
        msg.text = out.outcome.observation;
        const auto& res = reg.get(out.outcome.new_id);
        msg.images.push_back({res.id, encode_png(res.raster)});
    } else {
        msg.text = "ERROR: " + out.error;
    }
    return msg;
}

CallOutcome dispatch_one(Registry& reg, const ToolCall& call,
                         const std::vector<std::string>& subset) {
    CallOutcome out;
    try {
        if (call.tool_name == kShowResource) {
            const std::string id = call.arguments.value("resource_id", "");
            const auto& res = reg.get(id);
            out.ok = true;
            out.outcome = {res.id,
                           "Re-sent resource " + res.id + " (" +
                               std::to_string(res.raster.width()) + "x" +
                               std::to_string(res.raster.height()) + ")",
                           std::nullopt};
            return out;
        }
        if (std::find(subset.begin(), subset.end(), call.tool_name) == subset.end()) {
            out.error = "tool '" + call.tool_name + "' is not available for this task";
            return out;
        }
        out.outcome = execute_tool(reg, call.tool_name, call.arguments);
        out.ok = true;
    } catch (const Error& e) {
        out.ok = false;
        out.error = e.what();
    }
    return out;
}

// Runs tool-call rounds against `history` until a final answer, a budget
// of `max_rounds` tool rounds, or an unrecoverable backend error. Returns
// true and fills `final` when the model finalized.
bool run_loop(const AgentConfig& cfg, ModelBackend& backend, TaskKind task,
              const std::vector<std::string>& subset,
              const std::vector<nlohmann::json>& schemas, std::vector<Message>& history,
              Registry& registry, std::vector<RoundRecord>& rounds, int max_rounds,
              FinalAnswer& final) {
    int malformed_retries = 0;
    while (static_cast<int>(rounds.size()) < max_rounds) {
        ModelReply reply;
        try {
            reply = backend.generate(history, schemas, cfg.settings);
        } catch (const MalformedReplyError& e) {
            if (++malformed_retries > 1) return false;
            Message nudge;
            nudge.role = Message::Role::User;
            nudge.text = "Your previous reply could not be parsed (" + std::string(e.what()) +
                         "). Reply again, either with tool calls or with the fenced answer "
                         "block exactly as specified.";
            history.push_back(std::move(nudge));
            continue;
        } catch (const Error&) {
            return false;  // transport/quota/replay failure: rescue or fallback
        }

        if (reply.is_tool_round()) {
            RoundRecord rec;
            rec.round_index = static_cast<int>(rounds.size());
            rec.tool_calls = reply.tool_calls;
            rec.model_raw = reply.raw_text;

            Message assistant;
            assistant.role = Message::Role::Assistant;
            assistant.text = reply.raw_text;
            assistant.tool_calls = reply.tool_calls;
            history.push_back(std::move(assistant));

            for (const auto& call : reply.tool_calls) {
                CallOutcome out = dispatch_one(registry, call, subset);
                history.push_back(make_tool_message(registry, call, out));
                rec.outcomes.push_back(std::move(out));
            }
            rounds.push_back(std::move(rec));
            continue;
        }

        try {
            FinalAnswer ans = reply.final_answer ? *reply.final_answer
                                                 : parse_final(reply.raw_text, task);
            ans.task = task;
            if (!verdict_legal(task, ans.verdict))
                throw MalformedReplyError("illegal verdict: " + ans.verdict, reply.raw_text);
            final = std::move(ans);
            return true;
        } catch (const MalformedReplyError& e) {
            if (++malformed_retries > 1) return false;
            Message assistant;
            assistant.role = Message::Role::Assistant;
            assistant.text = reply.raw_text;
            history.push_back(std::move(assistant));
            Message nudge;
            nudge.role = Message::Role::User;
            nudge.text = "Your reply did not contain a recognizable final answer (" +
                         std::string(e.what()) +
                         "). Reply with the fenced answer block exactly as specified.";
            history.push_back(std::move(nudge));
        }
    }
    return false;
}

void run_rescue(const AgentConfig& cfg, ModelBackend& backend, TaskKind task,
                const Raster& image, const std::string& question, Registry& registry,
                Transcript& t) {
    t.used_rescue = true;
    const auto subset = tool_subset(task);
    std::vector<nlohmann::json> schemas;
    for (const auto& name : subset) schemas.push_back(tool_schema(name));
    schemas.push_back(tool_schema(kShowResource));

    std::string answer_schema = build_system_prompt(task).answer_schema;
    Message system;
    system.role = Message::Role::System;
    system.text =
        "You are a visual analyst with a small budget of tool calls left. Classify the "
        "question into one of these categories and act fast:\n" +
        compressed_category_summary(task) +
        "\nEvery tool call creates a new immutable resource; cite resource ids.\n\n" +
        answer_schema;

    Message user;
    user.role = Message::Role::User;
    user.text = question + "\nThe image is registered as resource \"original\" (" +
                std::to_string(image.width()) + "x" + std::to_string(image.height()) + ").";
    user.images.push_back({"original", encode_png(image)});
    // Carry over the last two intermediate views from the main attempt.
    const auto ids = registry.list_ids();
    const std::size_t from = ids.size() > 3 ? ids.size() - 2 : 1;
    for (std::size_t i = from; i < ids.size(); ++i) {
        const auto& res = registry.get(ids[i]);
        user.images.push_back({res.id, encode_png(res.raster)});
    }

    std::vector<Message> history{std::move(system), std::move(user)};
    FinalAnswer final;
    if (run_loop(cfg, backend, task, subset, schemas, history, registry, t.rescue_rounds,
                 cfg.rescue_max_rounds, final)) {
        t.final = std::move(final);
    } else {
        t.final = cfg.fallback_answer(task);
        t.used_fallback = true;
    }
}

}  // namespace

RunResult run_sample(const AgentConfig& cfg, ModelBackend& backend, TaskKind task,
                     const Raster& image, const std::string& question,
                     const std::string& sample_id) {
    if (question.empty()) throw ConfigError("question must be non-empty");
    if (cfg.max_rounds < 1 || cfg.rescue_max_rounds < 1)
        throw ConfigError("round limits must be >= 1");

    const PromptBundle bundle = build_system_prompt(task);
    Registry registry(image);

    Transcript t;
    t.sample_id = sample_id;
    t.task = task;
    t.prompt_version = bundle.prompt_version;
    t.model_name = backend.name();

    std::vector<nlohmann::json> schemas;
    for (const auto& name : bundle.tool_subset) schemas.push_back(tool_schema(name));
    schemas.push_back(tool_schema(kShowResource));

    Message system;
    system.role = Message::Role::System;
    system.text = bundle.system_prompt;
    Message user;
    user.role = Message::Role::User;
    user.text = question + "\nThe image is registered as resource \"original\" (" +
                std::to_string(image.width()) + "x" + std::to_string(image.height()) + ").";
    user.images.push_back({"original", encode_png(image)});

    std::vector<Message> history{std::move(system), std::move(user)};
    FinalAnswer final;
    if (run_loop(cfg, backend, task, bundle.tool_subset, schemas, history, registry, t.rounds,
                 cfg.max_rounds, final)) {
        t.final = std::move(final);
    } else {
        run_rescue(cfg, backend, task, image, question, registry, t);
    }
    return {std::move(t), std::move(registry)};
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::optional<FinalAnswer> parse_strict(const std::string& raw, TaskKind task) {
    const auto open = raw.find("```");
    if (open == std::string::npos) return std::nullopt;
    auto body_start = raw.find('\n', open);
    if (body_start == std::string::npos) return std::nullopt;
    const auto close = raw.find("```", ++body_start);
    if (close == std::string::npos) return std::nullopt;

    const std::string key = task == TaskKind::TaskI ? "answer" : "choice";
    std::string verdict, rationale;
    std::stringstream ss(raw.substr(body_start, close - body_start));
    std::string line;
    while (std::getline(ss, line)) {
        const auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        const std::string k = trim(line.substr(0, colon));
        const std::string v = trim(line.substr(colon + 1));
        if (k == key)
            verdict = v;
        else if (k == "rationale")
            rationale = v;
    }
    if (task == TaskKind::TaskI) {
        std::string lower;
        for (char c : verdict) lower.push_back(static_cast<char>(std::tolower(c)));
        if (lower == "yes") verdict = "Yes";
        if (lower == "no") verdict = "No";
    }
    if (!verdict_legal(task, verdict)) return std::nullopt;
    return FinalAnswer{task, verdict, rationale};
}

std::optional<FinalAnswer> parse_lenient(const std::string& raw, TaskKind task) {
    std::string verdict;
    std::string token;
    auto consume = [&]() {
        if (token.empty()) return;
        if (task == TaskKind::TaskI) {
            std::string lower;
            for (char c : token) lower.push_back(static_cast<char>(std::tolower(c)));
            if (lower == "yes") verdict = "Yes";
            if (lower == "no") verdict = "No";
        } else {
            if (token.size() == 1 && token[0] >= 'A' && token[0] <= 'D') verdict = token;
        }
        token.clear();
    };
    for (char c : raw) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_')
            token.push_back(c);
        else
            consume();
    }
    consume();
    if (verdict.empty()) return std::nullopt;
    return FinalAnswer{task, verdict, "(extracted from free text)"};
}

}  // namespace

FinalAnswer parse_final(const std::string& raw_text, TaskKind task) {
    if (auto strict = parse_strict(raw_text, task)) return *strict;
    if (auto lenient = parse_lenient(raw_text, task)) return *lenient;
    throw MalformedReplyError("no recognizable verdict", raw_text);
}

namespace {

nlohmann::json round_to_json(const RoundRecord& r) {
    nlohmann::json calls = nlohmann::json::array();
    for (const auto& tc : r.tool_calls)
        calls.push_back({{"call_id", tc.call_id},
                         {"tool_name", tc.tool_name},
                         {"arguments", tc.arguments}});
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& o : r.outcomes) {
        nlohmann::json j{{"ok", o.ok}};
        if (o.ok) {
            j["new_id"] = o.outcome.new_id;
            j["observation"] = o.outcome.observation;
            if (o.outcome.value) j["value"] = *o.outcome.value;
        } else {
            j["error"] = o.error;
        }
        outs.push_back(std::move(j));
    }
    return {{"round_index", r.round_index},
            {"tool_calls", std::move(calls)},
            {"outcomes", std::move(outs)},
            {"model_raw", r.model_raw}};
}

RoundRecord round_from_json(const nlohmann::json& j) {
    RoundRecord r;
    r.round_index = j.at("round_index").get<int>();
    for (const auto& tc : j.at("tool_calls"))
        r.tool_calls.push_back({tc.at("call_id").get<std::string>(),
                                tc.at("tool_name").get<std::string>(), tc.at("arguments")});
    for (const auto& o : j.at("outcomes")) {
        CallOutcome out;
        out.ok = o.at("ok").get<bool>();
        if (out.ok) {
            out.outcome.new_id = o.at("new_id").get<std::string>();
            out.outcome.observation = o.at("observation").get<std::string>();
            if (o.contains("value")) out.outcome.value = o.at("value");
        } else {
            out.error = o.at("error").get<std::string>();
        }
        r.outcomes.push_back(std::move(out));
    }
    r.model_raw = j.at("model_raw").get<std::string>();
    return r;
}

}  // namespace

nlohmann::json Transcript::to_json() const {
    nlohmann::json main_rounds = nlohmann::json::array();
    for (const auto& r : rounds) main_rounds.push_back(round_to_json(r));
    nlohmann::json resc = nlohmann::json::array();
    for (const auto& r : rescue_rounds) resc.push_back(round_to_json(r));
    return {{"sample_id", sample_id},
            {"task", task_name(task)},
            {"prompt_version", prompt_version},
            {"rounds", std::move(main_rounds)},
            {"rescue_rounds", std::move(resc)},
            {"final",
             {{"verdict", final.verdict}, {"rationale", final.rationale}}},
            {"used_rescue", used_rescue},
            {"used_fallback", used_fallback},
            {"model_name", model_name}};
}

Transcript Transcript::from_json(const nlohmann::json& j) {
    Transcript t;
    t.sample_id = j.at("sample_id").get<std::string>();
    t.task = j.at("task").get<std::string>() == "task1" ? TaskKind::TaskI : TaskKind::TaskII;
    t.prompt_version = j.at("prompt_version").get<std::string>();
    for (const auto& r : j.at("rounds")) t.rounds.push_back(round_from_json(r));
    for (const auto& r : j.at("rescue_rounds")) t.rescue_rounds.push_back(round_from_json(r));
    t.final.task = t.task;
    t.final.verdict = j.at("final").at("verdict").get<std::string>();
    t.final.rationale = j.at("final").at("rationale").get<std::string>();
    t.used_rescue = j.at("used_rescue").get<bool>();
    t.used_fallback = j.at("used_fallback").get<bool>();
    t.model_name = j.at("model_name").get<std::string>();
    return t;
}

std::vector<std::string> Transcript::tools_used() const {
    std::set<std::string> names;
    for (const auto* phase : {&rounds, &rescue_rounds})
        for (const auto& r : *phase)
            for (const auto& tc : r.tool_calls) names.insert(tc.tool_name);
    return {names.begin(), names.end()};
}

void save_transcript(const Transcript& t, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error("cannot write transcript: " + path);
    f << t.to_json().dump(2) << "\n";
}

Transcript load_transcript(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open transcript: " + path);
    nlohmann::json j;
    f >> j;
    return Transcript::from_json(j);
}

}  // namespace toolsight
