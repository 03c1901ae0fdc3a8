#include <algorithm>
#include <set>

#include "toolsight/image_io.hpp"
#include "toolsight/model.hpp"

namespace toolsight {

namespace {

std::string fenced_final(TaskKind task, const std::string& verdict,
                         const std::string& rationale) {
    const char* key = task == TaskKind::TaskI ? "answer" : "choice";
    return std::string("```\n") + key + ": " + verdict + "\nrationale: " + rationale + "\n```\n";
}

ModelReply final_reply(TaskKind task, const std::string& verdict, const std::string& rationale) {
    ModelReply r;
    r.final_answer = FinalAnswer{task, verdict, rationale};
    r.raw_text = fenced_final(task, verdict, rationale);
    return r;
}

int count_assistant_rounds(const std::vector<Message>& history) {
    int n = 0;
    for (const auto& m : history)
        if (m.role == Message::Role::Assistant && !m.tool_calls.empty()) ++n;
    return n;
}

const Message* last_tool_message_with_image(const std::vector<Message>& history) {
    for (auto it = history.rbegin(); it != history.rend(); ++it)
        if (it->role == Message::Role::Tool && !it->images.empty()) return &*it;
    return nullptr;
}

std::vector<std::string> extract_hexes(const std::string& text) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i + 6 < text.size(); ++i) {
        if (text[i] != '#') continue;
        bool ok = true;
        for (std::size_t k = 1; k <= 6; ++k) {
            const char c = text[i + k];
            if (!((c >= '0' && c <= '9') || (c >= 'A' && c <= 'F'))) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(text.substr(i, 7));
    }
    return out;
}

class ScriptedBackend : public ModelBackend {
public:
    ScriptedBackend(ScriptedPolicy policy, SampleContext ctx)
        : policy_(policy), ctx_(std::move(ctx)) {
        if (policy_ == ScriptedPolicy::Oracle && !ctx_.probes)
            throw ConfigError("oracle policy requires probe metadata for sample " +
                              ctx_.sample_id);
    }

    ModelReply generate(const std::vector<Message>& history,
                        const std::vector<nlohmann::json>&,
                        const GenerationSettings&) override {
        validate_history(history);
        switch (policy_) {
            case ScriptedPolicy::AlwaysPositive:
                // Affirm the illusion without looking at anything.
                return ctx_.task == TaskKind::TaskI
                           ? final_reply(ctx_.task, "Yes", "the illusion is present")
                           : final_reply(ctx_.task, "A", "the illusion is present");
            case ScriptedPolicy::NeverFinalize: {
                ModelReply r;
                r.tool_calls.push_back(
                    {next_call_id(history), "crop",
                     {{"resource_id", "original"}, {"x0", 0}, {"y0", 0}, {"x1", 4}, {"y1", 4}}});
                return r;
            }
            case ScriptedPolicy::Oracle:
                return oracle(history);
        }
        throw ConfigError("unreachable");
    }

    std::string name() const override { return "scripted"; }

private:
    static std::string next_call_id(const std::vector<Message>& history) {
        return "call_" + std::to_string(count_assistant_rounds(history) + 1);
    }

    ModelReply oracle(const std::vector<Message>& history) const {
        const ProbeInfo& p = *ctx_.probes;
        const int round = count_assistant_rounds(history);
        if (p.kind == "contrast_pair")
            return ctx_.task == TaskKind::TaskII ? oracle_contrast_sample(history, round, p)
                                                 : oracle_contrast_compare(history, round, p);
        if (p.kind == "band_stack") return oracle_bands(history, round, p);
        if (p.kind == "reference_line") return oracle_line(history, round, p);
        throw ConfigError("oracle: unknown stimulus kind " + p.kind);
    }

    // Task I color comparison: compare_crops of the two patches, then read
    // the seam of the decoded composite.
    ModelReply oracle_contrast_compare(const std::vector<Message>& history, int round,
                                       const ProbeInfo& p) const {
        if (round == 0) {
            ModelReply r;
            r.tool_calls.push_back({next_call_id(history), "compare_crops",
                                    {{"resource_id_a", "original"},
                                     {"ax0", p.patch_a_rect.x0},
                                     {"ay0", p.patch_a_rect.y0},
                                     {"ax1", p.patch_a_rect.x1},
                                     {"ay1", p.patch_a_rect.y1},
                                     {"resource_id_b", "original"},
                                     {"bx0", p.patch_b_rect.x0},
                                     {"by0", p.patch_b_rect.y0},
                                     {"bx1", p.patch_b_rect.x1},
                                     {"by1", p.patch_b_rect.y1}}});
            return r;
        }
        const Message* msg = last_tool_message_with_image(history);
        if (!msg) throw ConfigError("oracle: missing composite image");
        const Raster composite = decode_png(msg->images.front().png);
        const int wa = p.patch_a_rect.width();
        const Rgb left = composite.at(wa / 2, p.patch_a_rect.height() / 2);
        const Rgb right = composite.at(wa + 8 + p.patch_b_rect.width() / 2,
                                       p.patch_b_rect.height() / 2);
        const bool equal = left == right;
        return final_reply(ctx_.task, equal ? "Yes" : "No",
                           equal ? "patch pixels are identical (" + left.to_hex() +
                                       "); the apparent difference is illusory"
                                 : "patch pixels differ (" + left.to_hex() + " vs " +
                                       right.to_hex() + "); the colors genuinely differ");
    }

    // Task II color comparison: two sample_color calls, exact hex equality.
    ModelReply oracle_contrast_sample(const std::vector<Message>& history, int round,
                                      const ProbeInfo& p) const {
        if (round == 0) {
            ModelReply r;
            r.tool_calls.push_back({"call_1a", "sample_color",
                                    {{"resource_id", "original"},
                                     {"x", p.patch_a_center.x},
                                     {"y", p.patch_a_center.y},
                                     {"window", 1}}});
            r.tool_calls.push_back({"call_1b", "sample_color",
                                    {{"resource_id", "original"},
                                     {"x", p.patch_b_center.x},
                                     {"y", p.patch_b_center.y},
                                     {"window", 1}}});
            return r;
        }
        std::vector<std::string> hexes;
        for (const auto& m : history)
            if (m.role == Message::Role::Tool)
                for (const auto& h : extract_hexes(m.text)) hexes.push_back(h);
        if (hexes.size() < 2) throw ConfigError("oracle: expected two sampled hex codes");
        const bool equal = hexes[hexes.size() - 2] == hexes.back();
        return final_reply(ctx_.task, equal ? "A" : "B",
                           equal ? "sampled hex codes are identical; illusory difference"
                                 : "sampled hex codes differ; real difference");
    }

    // Boundary detection: crop the interface; more than two distinct colors
    // in the crop means a physical separator is present.
    ModelReply oracle_bands(const std::vector<Message>& history, int round,
                            const ProbeInfo& p) const {
        if (round == 0) {
            ModelReply r;
            r.tool_calls.push_back({next_call_id(history), "crop",
                                    {{"resource_id", "original"},
                                     {"x0", p.interface_rect.x0},
                                     {"y0", p.interface_rect.y0},
                                     {"x1", p.interface_rect.x1},
                                     {"y1", p.interface_rect.y1}}});
            return r;
        }
        const Message* msg = last_tool_message_with_image(history);
        if (!msg) throw ConfigError("oracle: missing interface crop");
        const Raster crop_img = decode_png(msg->images.front().png);
        std::set<std::string> colors;
        for (int y = 0; y < crop_img.height(); ++y)
            for (int x = 0; x < crop_img.width(); ++x)
                colors.insert(crop_img.at(x, y).to_hex());
        const bool no_separator = colors.size() <= 2;
        return final_reply(ctx_.task, no_separator ? "Yes" : "No",
                           no_separator
                               ? "the interface crop contains only the two band colors; the "
                                 "apparent edge is illusory"
                               : "the interface crop contains a separator color between the "
                                 "bands; a physical line is present");
    }

    // Line straightness: draw a straight reference below the target, crop
    // the region, measure the spread of target-line y coordinates.
    ModelReply oracle_line(const std::vector<Message>& history, int round,
                           const ProbeInfo& p) const {
        if (round == 0) {
            ModelReply r;
            r.tool_calls.push_back({next_call_id(history), "draw_line",
                                    {{"resource_id", "original"},
                                     {"x0", p.line_region.x0},
                                     {"y0", p.line_y + 10},
                                     {"x1", p.line_region.x1 - 1},
                                     {"y1", p.line_y + 10},
                                     {"color", "#FF0000"},
                                     {"thickness", 1}}});
            return r;
        }
        if (round == 1) {
            const Message* msg = last_tool_message_with_image(history);
            if (!msg) throw ConfigError("oracle: missing annotated image");
            ModelReply r;
            r.tool_calls.push_back({next_call_id(history), "crop",
                                    {{"resource_id", msg->images.front().id},
                                     {"x0", p.line_region.x0},
                                     {"y0", p.line_region.y0},
                                     {"x1", p.line_region.x1},
                                     {"y1", p.line_region.y1}}});
            return r;
        }
        const Message* msg = last_tool_message_with_image(history);
        if (!msg) throw ConfigError("oracle: missing line crop");
        const Raster crop_img = decode_png(msg->images.front().png);
        int min_y = crop_img.height(), max_y = -1;
        for (int y = 0; y < crop_img.height(); ++y)
            for (int x = 0; x < crop_img.width(); ++x)
                if (crop_img.at(x, y) == Rgb{0, 0, 0}) {
                    min_y = std::min(min_y, y);
                    max_y = std::max(max_y, y);
                }
        if (max_y < 0) throw ConfigError("oracle: target line not found in crop");
        const bool straight = max_y == min_y;
        return final_reply(ctx_.task, straight ? "Yes" : "No",
                           straight ? "target-line pixels share one y coordinate; the line is "
                                      "perfectly straight and the curvature is illusory"
                                    : "target-line y coordinates spread over " +
                                          std::to_string(max_y - min_y + 1) +
                                          " rows; the line is genuinely bowed");
    }

    ScriptedPolicy policy_;
    SampleContext ctx_;
};

class ScriptedFactory : public BackendFactory {
public:
    explicit ScriptedFactory(ScriptedPolicy policy) : policy_(policy) {}
    std::unique_ptr<ModelBackend> make(const SampleContext& ctx) override {
        return std::make_unique<ScriptedBackend>(policy_, ctx);
    }

private:
    ScriptedPolicy policy_;
};

}  // namespace

std::unique_ptr<ModelBackend> make_scripted_backend(ScriptedPolicy policy,
                                                    const SampleContext& ctx) {
    return std::make_unique<ScriptedBackend>(policy, ctx);
}

std::unique_ptr<BackendFactory> scripted_factory(ScriptedPolicy policy) {
    return std::make_unique<ScriptedFactory>(policy);
}

}  // namespace toolsight
