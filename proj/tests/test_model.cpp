#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "toolsight/image_io.hpp"
#include "toolsight/model.hpp"
#include "toolsight/stimulus.hpp"

using namespace toolsight;

namespace {

Message sys(const std::string& text = "system prompt") {
    Message m;
    m.role = Message::Role::System;
    m.text = text;
    return m;
}

Message user(const std::string& text) {
    Message m;
    m.role = Message::Role::User;
    m.text = text;
    return m;
}

SampleContext contrast_ctx(TaskKind task = TaskKind::TaskI) {
    StimulusSpec spec;
    spec.kind = StimulusKind::ContrastPair;
    spec.seed = 3;
    const GeneratedSample s = generate(spec);
    return {s.sample_id, task, s.question, s.probes};
}

}  // namespace

TEST_CASE("history validation requires one leading system message") {
    CHECK_NOTHROW(validate_history({sys(), user("q")}));
    CHECK_THROWS_AS(validate_history({}), ConfigError);
    CHECK_THROWS_AS(validate_history({user("q")}), ConfigError);
    CHECK_THROWS_AS(validate_history({sys(), user("q"), sys()}), ConfigError);
}

TEST_CASE("history hash is content-sensitive") {
    const auto base = history_hash({sys(), user("is the line straight?")});
    CHECK(base == history_hash({sys(), user("is the line straight?")}));
    CHECK(base != history_hash({sys(), user("is the line straight!")}));
    CHECK(base != history_hash({sys("other"), user("is the line straight?")}));

    // images participate in the hash
    Message with_img = user("q");
    with_img.images.push_back({"original", encode_png(Raster(2, 2))});
    Message with_other = user("q");
    with_other.images.push_back({"original", encode_png(Raster(2, 2, Rgb{1, 1, 1}))});
    CHECK(history_hash({sys(), with_img}) != history_hash({sys(), with_other}));
}

TEST_CASE("model replies serialize round-trip") {
    ModelReply tool_round;
    tool_round.raw_text = "calling";
    tool_round.tool_calls.push_back(
        {"call_1", "crop", {{"resource_id", "original"}, {"x0", 0}, {"y0", 0}, {"x1", 4}, {"y1", 4}}});
    const ModelReply back = reply_from_json(reply_to_json(tool_round));
    CHECK(back.is_tool_round());
    CHECK(back.tool_calls[0].call_id == "call_1");
    CHECK(back.tool_calls[0].tool_name == "crop");
    CHECK(back.tool_calls[0].arguments.at("x1") == 4);
    CHECK(back.raw_text == "calling");

    ModelReply final_round;
    final_round.final_answer = FinalAnswer::yes_no(false, "pixels differ");
    final_round.raw_text = "```\nanswer: No\n```";
    const ModelReply fb = reply_from_json(reply_to_json(final_round));
    CHECK_FALSE(fb.is_tool_round());
    REQUIRE(fb.final_answer.has_value());
    CHECK(fb.final_answer->verdict == "No");
    CHECK(fb.final_answer->rationale == "pixels differ");
}

TEST_CASE("policy names parse") {
    CHECK(scripted_policy_from_name("oracle") == ScriptedPolicy::Oracle);
    CHECK(scripted_policy_from_name("always_positive") == ScriptedPolicy::AlwaysPositive);
    CHECK(scripted_policy_from_name("never_finalize") == ScriptedPolicy::NeverFinalize);
    CHECK_THROWS_AS(scripted_policy_from_name("wishful"), ConfigError);
}

TEST_CASE("always_positive finalizes immediately with the affirming answer") {
    auto b1 = make_scripted_backend(ScriptedPolicy::AlwaysPositive, contrast_ctx(TaskKind::TaskI));
    const auto r1 = b1->generate({sys(), user("q")}, {}, {});
    CHECK_FALSE(r1.is_tool_round());
    CHECK(r1.final_answer->verdict == "Yes");

    auto b2 = make_scripted_backend(ScriptedPolicy::AlwaysPositive, contrast_ctx(TaskKind::TaskII));
    CHECK(b2->generate({sys(), user("q")}, {}, {}).final_answer->verdict == "A");
}

TEST_CASE("never_finalize emits a crop call every round") {
    auto b = make_scripted_backend(ScriptedPolicy::NeverFinalize, contrast_ctx());
    std::vector<Message> history{sys(), user("q")};
    for (int round = 0; round < 12; ++round) {
        const auto r = b->generate(history, {}, {});
        REQUIRE(r.is_tool_round());
        CHECK(r.tool_calls[0].tool_name == "crop");
        Message assistant;
        assistant.role = Message::Role::Assistant;
        assistant.tool_calls = r.tool_calls;
        history.push_back(assistant);
    }
}

TEST_CASE("oracle requires probe metadata") {
    SampleContext ctx{"s", TaskKind::TaskI, "q", std::nullopt};
    CHECK_THROWS_AS(make_scripted_backend(ScriptedPolicy::Oracle, ctx), ConfigError);
}

TEST_CASE("task II contrast oracle opens with two sample_color calls") {
    auto ctx = contrast_ctx(TaskKind::TaskII);
    auto b = make_scripted_backend(ScriptedPolicy::Oracle, ctx);
    const auto r = b->generate({sys(), user(ctx.question)}, {}, {});
    REQUIRE(r.is_tool_round());
    REQUIRE(r.tool_calls.size() == 2);
    CHECK(r.tool_calls[0].tool_name == "sample_color");
    CHECK(r.tool_calls[1].tool_name == "sample_color");
    CHECK(r.tool_calls[0].arguments.at("x") == ctx.probes->patch_a_center.x);
    CHECK(r.tool_calls[1].arguments.at("x") == ctx.probes->patch_b_center.x);
}

TEST_CASE("task II contrast oracle decides by exact hex equality") {
    auto ctx = contrast_ctx(TaskKind::TaskII);
    auto b = make_scripted_backend(ScriptedPolicy::Oracle, ctx);

    auto decide = [&](const std::string& hex_a, const std::string& hex_b) {
        std::vector<Message> history{sys(), user(ctx.question)};
        Message assistant;
        assistant.role = Message::Role::Assistant;
        assistant.tool_calls = {{"call_1a", "sample_color", nlohmann::json::object()},
                                {"call_1b", "sample_color", nlohmann::json::object()}};
        history.push_back(assistant);
        Message ta;
        ta.role = Message::Role::Tool;
        ta.tool_result_for = "call_1a";
        ta.text = "Sampled original: " + hex_a;
        Message tb = ta;
        tb.tool_result_for = "call_1b";
        tb.text = "Sampled original: " + hex_b;
        history.push_back(ta);
        history.push_back(tb);
        return b->generate(history, {}, {}).final_answer->verdict;
    };
    CHECK(decide("#8F8F8F", "#8F8F8F") == "A");
    CHECK(decide("#8F8F8F", "#909090") == "B");
}

TEST_CASE("task I contrast oracle compares the patch crops side by side") {
    auto ctx = contrast_ctx(TaskKind::TaskI);
    auto b = make_scripted_backend(ScriptedPolicy::Oracle, ctx);
    const auto r = b->generate({sys(), user(ctx.question)}, {}, {});
    REQUIRE(r.is_tool_round());
    CHECK(r.tool_calls[0].tool_name == "compare_crops");
}

TEST_CASE("recording then replay round-trips byte-identically") {
    namespace fs = std::filesystem;
    const std::string path =
        (fs::temp_directory_path() / "toolsight_replay_test.json").string();
    auto ctx = contrast_ctx(TaskKind::TaskII);

    std::vector<ModelReply> recorded;
    {
        RecordingBackend rec(make_scripted_backend(ScriptedPolicy::AlwaysPositive, ctx), path);
        recorded.push_back(rec.generate({sys(), user("q")}, {}, {}));
        rec.flush();
    }
    auto replay = make_replay_backend(path);
    CHECK(replay->name() == "scripted");
    const auto replayed = replay->generate({sys(), user("q")}, {}, {});
    CHECK(reply_to_json(replayed) == reply_to_json(recorded[0]));
    fs::remove(path);
}

TEST_CASE("replay detects divergence and exhaustion with round numbers") {
    namespace fs = std::filesystem;
    const std::string path =
        (fs::temp_directory_path() / "toolsight_replay_div.json").string();
    auto ctx = contrast_ctx(TaskKind::TaskI);
    {
        RecordingBackend rec(make_scripted_backend(ScriptedPolicy::NeverFinalize, ctx), path);
        std::vector<Message> history{sys(), user("q")};
        for (int i = 0; i < 3; ++i) {
            const auto r = rec.generate(history, {}, {});
            Message assistant;
            assistant.role = Message::Role::Assistant;
            assistant.tool_calls = r.tool_calls;
            history.push_back(assistant);
        }
        rec.flush();
    }

    // edited question: divergence at round 1
    auto diverging = make_replay_backend(path);
    try {
        diverging->generate({sys(), user("edited question")}, {}, {});
        FAIL("expected divergence");
    } catch (const ReplayDivergenceError& e) {
        CHECK(e.round == 1);
    }

    // faithful replay runs out after the recorded three rounds
    auto exhausted = make_replay_backend(path);
    std::vector<Message> history{sys(), user("q")};
    for (int i = 0; i < 3; ++i) {
        const auto r = exhausted->generate(history, {}, {});
        Message assistant;
        assistant.role = Message::Role::Assistant;
        assistant.tool_calls = r.tool_calls;
        history.push_back(assistant);
    }
    try {
        exhausted->generate(history, {}, {});
        FAIL("expected exhaustion");
    } catch (const ReplayExhaustedError& e) {
        CHECK(e.round == 4);
    }
    fs::remove(path);

    CHECK_THROWS_AS(make_replay_backend("/nonexistent/recording.json"), ConfigError);
}

TEST_CASE("factories build per-sample backends") {
    auto factory = scripted_factory(ScriptedPolicy::AlwaysPositive);
    auto backend = factory->make(contrast_ctx());
    CHECK(backend->generate({sys(), user("q")}, {}, {}).final_answer->verdict == "Yes");
}

TEST_CASE("offline paths never touch the live transport") {
    CHECK(live_connection_attempts() == 0);
}

TEST_CASE("live backend validates configuration before connecting") {
    LiveConfig cfg;
    cfg.base_url = "";  // missing endpoint
    CHECK_THROWS_AS(make_live_backend(cfg), ConfigError);
    CHECK(live_connection_attempts() == 0);
}
