#include "toolsight/model.hpp"

namespace toolsight {

nlohmann::json ProbeInfo::to_json() const {
    auto pt = [](Point p) { return nlohmann::json{{"x", p.x}, {"y", p.y}}; };
    auto rc = [](Rect r) {
        return nlohmann::json{{"x0", r.x0}, {"y0", r.y0}, {"x1", r.x1}, {"y1", r.y1}};
    };
    return {{"kind", kind},
            {"patch_a_center", pt(patch_a_center)},
            {"patch_b_center", pt(patch_b_center)},
            {"patch_a_rect", rc(patch_a_rect)},
            {"patch_b_rect", rc(patch_b_rect)},
            {"interface_rect", rc(interface_rect)},
            {"line_region", rc(line_region)},
            {"line_y", line_y}};
}

ProbeInfo ProbeInfo::from_json(const nlohmann::json& j) {
    auto pt = [](const nlohmann::json& p) { return Point{p.at("x"), p.at("y")}; };
    auto rc = [](const nlohmann::json& r) {
        return Rect{r.at("x0"), r.at("y0"), r.at("x1"), r.at("y1")};
    };
    ProbeInfo info;
    info.kind = j.at("kind").get<std::string>();
    info.patch_a_center = pt(j.at("patch_a_center"));
    info.patch_b_center = pt(j.at("patch_b_center"));
    info.patch_a_rect = rc(j.at("patch_a_rect"));
    info.patch_b_rect = rc(j.at("patch_b_rect"));
    info.interface_rect = rc(j.at("interface_rect"));
    info.line_region = rc(j.at("line_region"));
    info.line_y = j.at("line_y").get<int>();
    return info;
}

void validate_history(const std::vector<Message>& history) {
    if (history.empty() || history.front().role != Message::Role::System)
        throw ConfigError("history must begin with a system message");
    for (std::size_t i = 1; i < history.size(); ++i)
        if (history[i].role == Message::Role::System)
            throw ConfigError("history contains more than one system message");
}

std::string history_hash(const std::vector<Message>& history) {
    std::string buf;
    for (const auto& m : history) {
        buf += std::to_string(static_cast<int>(m.role));
        buf += '\x1f';
        buf += m.text;
        buf += '\x1f';
        for (const auto& img : m.images) {
            buf += img.id;
            buf += ':';
            buf += sha256_hex(std::string(img.png.begin(), img.png.end()));
            buf += ';';
        }
        buf += '\x1f';
        for (const auto& tc : m.tool_calls) {
            buf += tc.call_id + '|' + tc.tool_name + '|' + tc.arguments.dump();
            buf += ';';
        }
        buf += '\x1f';
        buf += m.tool_result_for;
        buf += '\x1e';
    }
    return sha256_hex(buf);
}

nlohmann::json reply_to_json(const ModelReply& reply) {
    nlohmann::json calls = nlohmann::json::array();
    for (const auto& tc : reply.tool_calls)
        calls.push_back({{"call_id", tc.call_id},
                         {"tool_name", tc.tool_name},
                         {"arguments", tc.arguments}});
    nlohmann::json j{{"tool_calls", calls}, {"raw_text", reply.raw_text}};
    if (reply.final_answer) {
        j["final"] = {{"task", task_name(reply.final_answer->task)},
                      {"verdict", reply.final_answer->verdict},
                      {"rationale", reply.final_answer->rationale}};
    } else {
        j["final"] = nullptr;
    }
    return j;
}

ModelReply reply_from_json(const nlohmann::json& j) {
    ModelReply reply;
    for (const auto& tc : j.at("tool_calls"))
        reply.tool_calls.push_back({tc.at("call_id").get<std::string>(),
                                    tc.at("tool_name").get<std::string>(),
                                    tc.at("arguments")});
    reply.raw_text = j.at("raw_text").get<std::string>();
    if (!j.at("final").is_null()) {
        const auto& f = j.at("final");
        FinalAnswer ans;
        ans.task = f.at("task").get<std::string>() == "task1" ? TaskKind::TaskI : TaskKind::TaskII;
        ans.verdict = f.at("verdict").get<std::string>();
        ans.rationale = f.at("rationale").get<std::string>();
        reply.final_answer = std::move(ans);
    }
    return reply;
}

ScriptedPolicy scripted_policy_from_name(const std::string& name) {
    if (name == "oracle") return ScriptedPolicy::Oracle;
    if (name == "always_positive") return ScriptedPolicy::AlwaysPositive;
    if (name == "never_finalize") return ScriptedPolicy::NeverFinalize;
    throw ConfigError("unknown scripted policy: " + name);
}

}  // namespace toolsight
