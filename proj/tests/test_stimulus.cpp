#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "toolsight/stimulus.hpp"

using namespace toolsight;

namespace {

StimulusSpec spec_of(StimulusKind kind, Polarity polarity, unsigned seed,
                     Orientation orientation = Orientation::Vertical) {
    StimulusSpec s;
    s.kind = kind;
    s.polarity = polarity;
    s.seed = seed;
    s.orientation = orientation;
    return s;
}

// Independent label-soundness decision rules, straight from the stimulus
// definitions: exact pixel inspection only.
bool decide_genuine(const GeneratedSample& s) {
    const Raster& img = s.raster;
    const ProbeInfo& p = s.probes;
    if (p.kind == "contrast_pair")
        return img.at(p.patch_a_center.x, p.patch_a_center.y) ==
               img.at(p.patch_b_center.x, p.patch_b_center.y);
    if (p.kind == "band_stack") {
        std::set<std::string> colors;
        for (int y = p.interface_rect.y0; y < p.interface_rect.y1; ++y)
            for (int x = p.interface_rect.x0; x < p.interface_rect.x1; ++x)
                colors.insert(img.at(x, y).to_hex());
        return colors.size() <= 2;
    }
    // reference_line: zero y-spread of pure-black pixels in the line region
    int min_y = img.height(), max_y = -1;
    for (int y = p.line_region.y0; y < p.line_region.y1; ++y)
        for (int x = p.line_region.x0; x < p.line_region.x1; ++x)
            if (img.at(x, y) == Rgb{0, 0, 0}) {
                min_y = std::min(min_y, y);
                max_y = std::max(max_y, y);
            }
    REQUIRE(max_y >= 0);
    return min_y == max_y;
}

}  // namespace

TEST_CASE("generation is deterministic") {
    for (StimulusKind kind : {StimulusKind::ContrastPair, StimulusKind::BandStack,
                              StimulusKind::ReferenceLine}) {
        const auto a = generate(spec_of(kind, Polarity::Negative, 9));
        const auto b = generate(spec_of(kind, Polarity::Negative, 9));
        CHECK(a.raster == b.raster);
        CHECK(a.sample_id == b.sample_id);
        CHECK(a.question == b.question);
        CHECK(a.probes.to_json() == b.probes.to_json());
    }
}

TEST_CASE("undersized canvases are rejected") {
    StimulusSpec s = spec_of(StimulusKind::ContrastPair, Polarity::Positive, 1);
    s.width = 63;
    CHECK_THROWS_AS(generate(s), InvalidArgsError);
    s.width = 128;
    s.height = 32;
    CHECK_THROWS_AS(generate(s), InvalidArgsError);
}

TEST_CASE("sample ids encode kind, polarity and seed") {
    CHECK(generate(spec_of(StimulusKind::ContrastPair, Polarity::Positive, 7)).sample_id ==
          "contrast_pair_pos_0007");
    CHECK(generate(spec_of(StimulusKind::BandStack, Polarity::Negative, 42)).sample_id ==
          "band_stack_neg_0042");
    CHECK(generate(spec_of(StimulusKind::BandStack, Polarity::Negative, 42,
                           Orientation::Horizontal)).sample_id == "band_stack_neg_0042_h");
    CHECK(generate(spec_of(StimulusKind::ReferenceLine, Polarity::Positive, 3)).sample_id ==
          "reference_line_pos_0003");
}

TEST_CASE("contrast pair: identical pigments iff positive") {
    const auto pos = generate(spec_of(StimulusKind::ContrastPair, Polarity::Positive, 11));
    const Rgb a = pos.raster.at(pos.probes.patch_a_center.x, pos.probes.patch_a_center.y);
    const Rgb b = pos.raster.at(pos.probes.patch_b_center.x, pos.probes.patch_b_center.y);
    CHECK(a == b);
    CHECK(a == Rgb{0x8F, 0x8F, 0x8F});
    CHECK(pos.label.verdict == "Yes");

    // seed chosen so the offset is exactly 1 level: the canonical hex pair
    const auto neg = generate(spec_of(StimulusKind::ContrastPair, Polarity::Negative, 16));
    const Rgb na = neg.raster.at(neg.probes.patch_a_center.x, neg.probes.patch_a_center.y);
    const Rgb nb = neg.raster.at(neg.probes.patch_b_center.x, neg.probes.patch_b_center.y);
    CHECK(na.to_hex() == "#8F8F8F");
    CHECK(nb.to_hex() == "#909090");
    CHECK(neg.label.verdict == "No");

    // offsets stay within 1..16 levels
    for (unsigned seed = 0; seed < 32; ++seed) {
        const auto s = generate(spec_of(StimulusKind::ContrastPair, Polarity::Negative, seed));
        const int delta = s.raster.at(s.probes.patch_b_center.x, s.probes.patch_b_center.y).r -
                          s.raster.at(s.probes.patch_a_center.x, s.probes.patch_a_center.y).r;
        CHECK(delta >= 1);
        CHECK(delta <= 16);
    }
}

TEST_CASE("contrast pair: patch rects are interior to the patches") {
    const auto s = generate(spec_of(StimulusKind::ContrastPair, Polarity::Positive, 2));
    for (const Rect& r : {s.probes.patch_a_rect, s.probes.patch_b_rect}) {
        CHECK(r.width() > 0);
        CHECK(r.height() > 0);
        const Rgb expected = s.raster.at((r.x0 + r.x1) / 2, (r.y0 + r.y1) / 2);
        for (int y = r.y0; y < r.y1; ++y)
            for (int x = r.x0; x < r.x1; ++x) CHECK(s.raster.at(x, y) == expected);
    }
}

TEST_CASE("band stack: separator only in negatives, inside the flagged interface") {
    const auto pos = generate(spec_of(StimulusKind::BandStack, Polarity::Positive, 5));
    const auto neg = generate(spec_of(StimulusKind::BandStack, Polarity::Negative, 5));
    const Rgb separator{0x80, 0x00, 0x00};

    auto count_separator = [&](const GeneratedSample& s) {
        int n = 0;
        for (int y = 0; y < s.raster.height(); ++y)
            for (int x = 0; x < s.raster.width(); ++x)
                if (s.raster.at(x, y) == separator) ++n;
        return n;
    };
    CHECK(count_separator(pos) == 0);
    CHECK(count_separator(neg) == neg.raster.width());  // exactly one 1-px row

    // the separator row lies inside the probe interface rect
    bool inside = true;
    for (int x = 0; x < neg.raster.width(); ++x) {
        bool found = false;
        for (int y = neg.probes.interface_rect.y0; y < neg.probes.interface_rect.y1; ++y)
            if (neg.raster.at(x, y) == separator) found = true;
        inside = inside && found;
    }
    CHECK(inside);
    CHECK(pos.label.verdict == "Yes");
    CHECK(neg.label.verdict == "No");
}

TEST_CASE("band stack: horizontal variants are exact transposes") {
    for (unsigned seed = 0; seed < 8; ++seed) {
        for (Polarity pol : {Polarity::Positive, Polarity::Negative}) {
            const auto v = generate(spec_of(StimulusKind::BandStack, pol, seed));
            const auto h = generate(
                spec_of(StimulusKind::BandStack, pol, seed, Orientation::Horizontal));
            CHECK(h.raster == v.raster.transposed());
            CHECK(h.label.verdict == v.label.verdict);
            // a negative horizontal variant carries a 1-px separator column
            if (pol == Polarity::Negative) {
                const Rect r = h.probes.interface_rect;
                std::set<std::string> colors;
                for (int y = r.y0; y < r.y1; ++y)
                    for (int x = r.x0; x < r.x1; ++x)
                        colors.insert(h.raster.at(x, y).to_hex());
                CHECK(colors.count("#800000") == 1);
            }
        }
    }
}

TEST_CASE("reference line: straight iff positive, bow within 2..8 px") {
    const auto pos = generate(spec_of(StimulusKind::ReferenceLine, Polarity::Positive, 3));
    CHECK(decide_genuine(pos));
    CHECK(pos.label.verdict == "Yes");

    for (unsigned seed = 0; seed < 16; ++seed) {
        const auto neg = generate(spec_of(StimulusKind::ReferenceLine, Polarity::Negative, seed));
        CHECK_FALSE(decide_genuine(neg));
        CHECK(neg.label.verdict == "No");
        int min_y = neg.raster.height(), max_y = -1;
        for (int y = 0; y < neg.raster.height(); ++y)
            for (int x = 0; x < neg.raster.width(); ++x)
                if (neg.raster.at(x, y) == Rgb{0, 0, 0}) {
                    min_y = std::min(min_y, y);
                    max_y = std::max(max_y, y);
                }
        const int deflection = max_y - min_y;
        CHECK(deflection >= 2);
        CHECK(deflection <= 8);
    }
}

TEST_CASE("label soundness across kinds, polarities and seeds") {
    for (StimulusKind kind : {StimulusKind::ContrastPair, StimulusKind::BandStack,
                              StimulusKind::ReferenceLine})
        for (Polarity pol : {Polarity::Positive, Polarity::Negative})
            for (unsigned seed = 0; seed < 10; ++seed) {
                const auto s = generate(spec_of(kind, pol, seed));
                CHECK(s.label.verdict == (decide_genuine(s) ? "Yes" : "No"));
                CHECK((s.polarity == Polarity::Positive) == (s.label.verdict == "Yes"));
            }
}

TEST_CASE("emit_manifest writes a balanced, reproducible dataset") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "toolsight_stimulus_manifest";
    fs::remove_all(dir);

    std::vector<StimulusSpec> specs;
    for (unsigned seed = 0; seed < 3; ++seed)
        for (Polarity pol : {Polarity::Positive, Polarity::Negative})
            specs.push_back(spec_of(StimulusKind::ContrastPair, pol, seed));

    const auto out = emit_manifest(specs, dir.string());
    CHECK(out.n_positive == 3);
    CHECK(out.n_negative == 3);
    CHECK(fs::exists(out.manifest_path));
    CHECK(fs::exists(out.probes_path));
    CHECK(fs::exists(dir / "contrast_pair_pos_0000.png"));

    auto slurp = [](const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(f), {});
    };
    const std::string manifest_once = slurp(out.manifest_path);
    const std::string png_once = slurp((dir / "contrast_pair_neg_0001.png").string());

    // manifest lines carry the expected fields
    CHECK(manifest_once.find("\"task\":1") != std::string::npos);
    CHECK(manifest_once.find("\"label\":\"Yes\"") != std::string::npos);
    CHECK(manifest_once.find("\"polarity\":\"negative\"") != std::string::npos);
    CHECK(manifest_once.find("\"category\":\"color comparison\"") != std::string::npos);

    const auto again = emit_manifest(specs, dir.string());
    CHECK(slurp(again.manifest_path) == manifest_once);
    CHECK(slurp((dir / "contrast_pair_neg_0001.png").string()) == png_once);
    fs::remove_all(dir);
}

TEST_CASE("probe serialization round-trips") {
    const auto s = generate(spec_of(StimulusKind::BandStack, Polarity::Negative, 4,
                                    Orientation::Horizontal));
    const ProbeInfo back = ProbeInfo::from_json(s.probes.to_json());
    CHECK(back.to_json() == s.probes.to_json());
    CHECK(back.kind == "band_stack");
    CHECK(back.interface_rect == s.probes.interface_rect);
}
