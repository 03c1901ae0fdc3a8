#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <functional>

#include "toolsight/agent.hpp"
#include "toolsight/stimulus.hpp"

using namespace toolsight;

namespace {

// Backend scripted directly from a reply list; repeats the last entry.
class SequenceBackend : public ModelBackend {
public:
    explicit SequenceBackend(std::vector<ModelReply> replies)
        : replies_(std::move(replies)) {}

    ModelReply generate(const std::vector<Message>&, const std::vector<nlohmann::json>&,
                        const GenerationSettings&) override {
        ++calls;
        const std::size_t i = std::min(pos_++, replies_.size() - 1);
        return replies_[i];
    }
    std::string name() const override { return "sequence"; }

    int calls = 0;

private:
    std::vector<ModelReply> replies_;
    std::size_t pos_ = 0;
};

ModelReply tool_reply(const std::string& tool, nlohmann::json args) {
    ModelReply r;
    r.tool_calls.push_back({"c", tool, std::move(args)});
    r.raw_text = "calling " + tool;
    return r;
}

ModelReply crop_reply(int x1 = 4, int y1 = 4) {
    return tool_reply("crop",
                      {{"resource_id", "original"}, {"x0", 0}, {"y0", 0}, {"x1", x1}, {"y1", y1}});
}

ModelReply text_reply(const std::string& text) {
    ModelReply r;
    r.raw_text = text;
    return r;
}

GeneratedSample contrast(Polarity polarity, unsigned seed = 5) {
    StimulusSpec spec;
    spec.kind = StimulusKind::ContrastPair;
    spec.polarity = polarity;
    spec.seed = seed;
    return generate(spec);
}

std::unique_ptr<ModelBackend> oracle_for(const GeneratedSample& s,
                                         TaskKind task = TaskKind::TaskI) {
    return make_scripted_backend(ScriptedPolicy::Oracle,
                                 {s.sample_id, task, s.question, s.probes});
}

}  // namespace

TEST_CASE("always_positive: zero tool rounds, final Yes") {
    const auto s = contrast(Polarity::Positive);
    auto backend = make_scripted_backend(ScriptedPolicy::AlwaysPositive,
                                         {s.sample_id, TaskKind::TaskI, s.question, s.probes});
    const auto result = run_sample({}, *backend, TaskKind::TaskI, s.raster, s.question);
    CHECK(result.transcript.rounds.empty());
    CHECK(result.transcript.final.verdict == "Yes");
    CHECK_FALSE(result.transcript.used_rescue);
    CHECK_FALSE(result.transcript.used_fallback);
    CHECK(result.registry.size() == 1);
}

TEST_CASE("never_finalize: 10 main rounds, 3 rescue rounds, fallback") {
    const auto s = contrast(Polarity::Positive);
    auto backend = make_scripted_backend(ScriptedPolicy::NeverFinalize,
                                         {s.sample_id, TaskKind::TaskI, s.question, s.probes});
    const auto result = run_sample({}, *backend, TaskKind::TaskI, s.raster, s.question);
    CHECK(result.transcript.rounds.size() == 10);
    CHECK(result.transcript.rescue_rounds.size() == 3);
    CHECK(result.transcript.used_rescue);
    CHECK(result.transcript.used_fallback);
    CHECK(result.transcript.final.verdict == "No");  // bias-countering default
    // 13 crop calls succeeded, each allocating one resource
    CHECK(result.registry.size() == 14);
}

TEST_CASE("oracle verifies genuine and counterfactual contrast pairs") {
    const auto pos = contrast(Polarity::Positive);
    auto ob = oracle_for(pos);
    const auto r = run_sample({}, *ob, TaskKind::TaskI, pos.raster, pos.question);
    CHECK(r.transcript.rounds.size() <= 4);
    CHECK(r.transcript.final.verdict == "Yes");
    CHECK(r.registry.size() >= 2);  // at least the compare composite

    const auto neg = contrast(Polarity::Negative, 16);  // offset 1: #8F8F8F vs #909090
    auto nb = oracle_for(neg);
    const auto rn = run_sample({}, *nb, TaskKind::TaskI, neg.raster, neg.question);
    CHECK(rn.transcript.final.verdict == "No");
    CHECK(rn.transcript.final.rationale.find("genuinely differ") != std::string::npos);
}

TEST_CASE("rescue: a backend that finalizes only in rescue") {
    // 10 crop rounds exhaust the main loop; reply 11 finalizes.
    std::vector<ModelReply> replies(10, crop_reply());
    replies.push_back(text_reply("```\nanswer: Yes\nrationale: late\n```"));
    SequenceBackend backend(std::move(replies));
    const auto result = run_sample({}, backend, TaskKind::TaskI, Raster(16, 16), "q?");
    CHECK(result.transcript.rounds.size() == 10);
    CHECK(result.transcript.used_rescue);
    CHECK_FALSE(result.transcript.used_fallback);
    CHECK(result.transcript.rescue_rounds.empty());
    CHECK(result.transcript.final.verdict == "Yes");
}

TEST_CASE("rescue with a 1-call-then-final policy records one rescue round") {
    std::vector<ModelReply> replies(10, crop_reply());
    replies.push_back(crop_reply(8, 8));  // rescue round 1 exhausts the budget
    replies.push_back(text_reply("```\nanswer: No\nrationale: checked\n```"));
    SequenceBackend backend(std::move(replies));
    AgentConfig cfg;
    cfg.rescue_max_rounds = 1;
    const auto result = run_sample(cfg, backend, TaskKind::TaskI, Raster(16, 16), "q?");
    CHECK(result.transcript.rescue_rounds.size() == 1);
    CHECK(result.transcript.used_rescue);
    // the tool round consumed the whole rescue budget, so the fallback fires
    CHECK(result.transcript.used_fallback);
    CHECK(verdict_legal(TaskKind::TaskI, result.transcript.final.verdict));
}

TEST_CASE("round bound holds for any adversarial limits") {
    for (int max_rounds : {1, 3, 7}) {
        const auto s = contrast(Polarity::Positive);
        auto backend = make_scripted_backend(
            ScriptedPolicy::NeverFinalize, {s.sample_id, TaskKind::TaskI, s.question, s.probes});
        AgentConfig cfg;
        cfg.max_rounds = max_rounds;
        cfg.rescue_max_rounds = 2;
        const auto result = run_sample(cfg, *backend, TaskKind::TaskI, s.raster, s.question);
        CHECK(static_cast<int>(result.transcript.rounds.size()) == max_rounds);
        CHECK(result.transcript.rescue_rounds.size() == 2);
        CHECK(verdict_legal(TaskKind::TaskI, result.transcript.final.verdict));
    }
}

TEST_CASE("invalid tool calls become observations, not aborts") {
    std::vector<ModelReply> replies;
    replies.push_back(crop_reply(500, 500));  // clamps fine
    replies.push_back(tool_reply("crop", {{"resource_id", "ghost"},
                                          {"x0", 0}, {"y0", 0}, {"x1", 2}, {"y1", 2}}));
    replies.push_back(tool_reply("blur", {{"resource_id", "original"}, {"radius", 1}}));
    replies.push_back(text_reply("```\nanswer: Yes\nrationale: done\n```"));
    SequenceBackend backend(std::move(replies));
    const auto result = run_sample({}, backend, TaskKind::TaskI, Raster(16, 16), "q?");
    REQUIRE(result.transcript.rounds.size() == 3);
    CHECK(result.transcript.rounds[0].outcomes[0].ok);
    CHECK_FALSE(result.transcript.rounds[1].outcomes[0].ok);
    CHECK(result.transcript.rounds[1].outcomes[0].error.find("ghost") != std::string::npos);
    // blur is outside the Task I subset: surfaced as an error, not executed
    CHECK_FALSE(result.transcript.rounds[2].outcomes[0].ok);
    CHECK(result.transcript.rounds[2].outcomes[0].error.find("not available") !=
          std::string::npos);
    CHECK(result.transcript.final.verdict == "Yes");
    CHECK(result.registry.size() == 2);  // only the first crop allocated
}

TEST_CASE("show_resource re-sends without allocating") {
    std::vector<ModelReply> replies;
    replies.push_back(crop_reply());
    replies.push_back(tool_reply("show_resource", {{"resource_id", "img_001"}}));
    replies.push_back(text_reply("```\nanswer: No\nrationale: seen\n```"));
    SequenceBackend backend(std::move(replies));
    const auto result = run_sample({}, backend, TaskKind::TaskI, Raster(16, 16), "q?");
    CHECK(result.transcript.rounds.size() == 2);
    CHECK(result.transcript.rounds[1].outcomes[0].ok);
    CHECK(result.transcript.rounds[1].outcomes[0].outcome.new_id == "img_001");
    CHECK(result.registry.size() == 2);
}

TEST_CASE("one malformed final gets a re-ask; two go to rescue") {
    std::vector<ModelReply> once{text_reply("thinking out loud, cannot decide"),
                                 text_reply("```\nanswer: Yes\nrationale: r\n```")};
    SequenceBackend recovers(std::move(once));
    const auto ok = run_sample({}, recovers, TaskKind::TaskI, Raster(16, 16), "q?");
    CHECK(ok.transcript.final.verdict == "Yes");
    CHECK_FALSE(ok.transcript.used_rescue);
    CHECK(recovers.calls == 2);

    SequenceBackend hopeless({text_reply("hmm, uncertain still"), text_reply("cannot tell")});
    const auto fb = run_sample({}, hopeless, TaskKind::TaskI, Raster(16, 16), "q?");
    CHECK(fb.transcript.used_rescue);
    CHECK(fb.transcript.used_fallback);
    CHECK(fb.transcript.final.verdict == "No");
}

TEST_CASE("illegal verdict for the task counts as malformed") {
    SequenceBackend backend({text_reply("```\nchoice: E\nrationale: r\n```"),
                             text_reply("```\nchoice: C\nrationale: r\n```")});
    const auto result = run_sample({}, backend, TaskKind::TaskII, Raster(16, 16), "q?");
    CHECK(result.transcript.final.verdict == "C");
}

TEST_CASE("run_sample validates its inputs") {
    SequenceBackend backend({text_reply("```\nanswer: Yes\nrationale: r\n```")});
    CHECK_THROWS_AS(run_sample({}, backend, TaskKind::TaskI, Raster(16, 16), ""), ConfigError);
    AgentConfig bad;
    bad.max_rounds = 0;
    CHECK_THROWS_AS(run_sample(bad, backend, TaskKind::TaskI, Raster(16, 16), "q"), ConfigError);
}

TEST_CASE("parse_final: strict fenced block") {
    const auto yes = parse_final("```\nanswer: Yes\nrationale: identical pixels\n```",
                                 TaskKind::TaskI);
    CHECK(yes.verdict == "Yes");
    CHECK(yes.rationale == "identical pixels");
    CHECK(parse_final("```\nanswer: no\n```", TaskKind::TaskI).verdict == "No");
    CHECK(parse_final("prefix\n```\nchoice: B\nrationale: r\n```\nsuffix",
                      TaskKind::TaskII).verdict == "B");
}

TEST_CASE("parse_final: lenient scan") {
    CHECK(parse_final("... so the answer is B.", TaskKind::TaskII).verdict == "B");
    CHECK(parse_final("I think yes, clearly.", TaskKind::TaskI).verdict == "Yes");
    CHECK(parse_final("Yes at first glance, but ultimately no.", TaskKind::TaskI).verdict ==
          "No");  // last standalone token wins
    CHECK(parse_final("Between A and C, C fits better", TaskKind::TaskII).verdict == "C");
    // 'D' inside a word does not count
    CHECK(parse_final("options Dull and B", TaskKind::TaskII).verdict == "B");
}

TEST_CASE("parse_final: no verdict is malformed") {
    CHECK_THROWS_AS(parse_final("the image shows bands", TaskKind::TaskI), MalformedReplyError);
    CHECK_THROWS_AS(parse_final("yes", TaskKind::TaskII), MalformedReplyError);
    try {
        parse_final("garbled output", TaskKind::TaskI);
        FAIL("expected malformed");
    } catch (const MalformedReplyError& e) {
        CHECK(e.raw_text == "garbled output");
    }
}

TEST_CASE("transcripts serialize round-trip") {
    const auto s = contrast(Polarity::Negative, 16);
    auto backend = oracle_for(s);
    const auto result = run_sample({}, *backend, TaskKind::TaskI, s.raster, s.question,
                                   s.sample_id);
    const auto path = (std::filesystem::temp_directory_path() /
                       "toolsight_transcript_test.json").string();
    save_transcript(result.transcript, path);
    const Transcript back = load_transcript(path);
    CHECK(back.to_json() == result.transcript.to_json());
    CHECK(back.sample_id == s.sample_id);
    CHECK(back.prompt_version == result.transcript.prompt_version);
    std::filesystem::remove(path);
}

TEST_CASE("tools_used reports each tool once across phases") {
    std::vector<ModelReply> replies(10, crop_reply());
    replies[1] = tool_reply("draw_line", {{"resource_id", "original"}, {"x0", 0}, {"y0", 0},
                                          {"x1", 5}, {"y1", 5}, {"color", "#FF0000"}});
    SequenceBackend backend(std::move(replies));  // repeats crop into rescue
    const auto result = run_sample({}, backend, TaskKind::TaskI, Raster(16, 16), "q?");
    CHECK(result.transcript.tools_used() == std::vector<std::string>{"crop", "draw_line"});
}

TEST_CASE("registry/transcript coherence") {
    const auto s = contrast(Polarity::Positive);
    auto backend = oracle_for(s);
    const auto result = run_sample({}, *backend, TaskKind::TaskI, s.raster, s.question);
    std::size_t successes = 0;
    for (const auto* phase : {&result.transcript.rounds, &result.transcript.rescue_rounds})
        for (const auto& round : *phase)
            for (std::size_t i = 0; i < round.outcomes.size(); ++i) {
                if (!round.outcomes[i].ok) continue;
                CHECK(result.registry.contains(round.outcomes[i].outcome.new_id));
                if (round.tool_calls[i].tool_name != "show_resource") ++successes;
            }
    CHECK(result.registry.size() == successes + 1);
}
