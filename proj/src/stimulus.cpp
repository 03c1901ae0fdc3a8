#include "toolsight/stimulus.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "toolsight/image_io.hpp"

namespace toolsight {

StimulusKind stimulus_kind_from_name(const std::string& name) {
    if (name == "contrast_pair") return StimulusKind::ContrastPair;
    if (name == "band_stack") return StimulusKind::BandStack;
    if (name == "reference_line") return StimulusKind::ReferenceLine;
    throw ConfigError("unknown stimulus kind: " + name);
}

std::string stimulus_kind_name(StimulusKind k) {
    switch (k) {
        case StimulusKind::ContrastPair: return "contrast_pair";
        case StimulusKind::BandStack: return "band_stack";
        case StimulusKind::ReferenceLine: return "reference_line";
    }
    return "?";
}

namespace {

Rect transpose_rect(Rect r) { return {r.y0, r.x0, r.y1, r.x1}; }
Point transpose_point(Point p) { return {p.y, p.x}; }

void fill_rect(Raster& img, Rect r, Rgb c) {
    for (int y = r.y0; y < r.y1; ++y)
        for (int x = r.x0; x < r.x1; ++x) img.set_clipped(x, y, c);
}

// Simultaneous contrast: two gray patches on opposing dark/light halves.
// Positive: identical pigments. Negative: patch B brighter by 1..16 levels.
GeneratedSample gen_contrast(const StimulusSpec& spec) {
    const int w = spec.width, h = spec.height;
    Raster img(w, h);
    fill_rect(img, {0, 0, w / 2, h}, {0x30, 0x30, 0x30});
    fill_rect(img, {w / 2, 0, w, h}, {0xD0, 0xD0, 0xD0});

    const std::uint8_t base = 0x8F;
    const int offset = spec.polarity == Polarity::Negative ? 1 + static_cast<int>(spec.seed % 16) : 0;
    const std::uint8_t other = static_cast<std::uint8_t>(base + offset);

    const int side = std::max(12, w / 6);
    const Point ca{w / 4, h / 2}, cb{3 * w / 4, h / 2};
    const Rect ra{ca.x - side / 2, ca.y - side / 2, ca.x + side / 2, ca.y + side / 2};
    const Rect rb{cb.x - side / 2, cb.y - side / 2, cb.x + side / 2, cb.y + side / 2};
    fill_rect(img, ra, {base, base, base});
    fill_rect(img, rb, {other, other, other});

    GeneratedSample s;
    s.raster = std::move(img);
    s.category = "color comparison";
    s.question = "The two gray patches appear different in brightness. Are their pigments "
                 "actually identical?";
    s.polarity = spec.polarity;
    s.label = FinalAnswer::yes_no(spec.polarity == Polarity::Positive);
    s.probes.kind = "contrast_pair";
    s.probes.patch_a_center = ca;
    s.probes.patch_b_center = cb;
    // Inner sub-rects keep the crops away from patch borders.
    const int inset = side / 4;
    s.probes.patch_a_rect = {ra.x0 + inset, ra.y0 + inset, ra.x1 - inset, ra.y1 - inset};
    s.probes.patch_b_rect = {rb.x0 + inset, rb.y0 + inset, rb.x1 - inset, rb.y1 - inset};
    return s;
}

// Luminance bands (Cornsweet/Mach-Bands style). Canonical orientation is
// vertical stacking; horizontal variants are exact transposes.
GeneratedSample gen_bands(const StimulusSpec& spec) {
    const int w = spec.width, h = spec.height;
    constexpr int kBands = 6;
    Raster img(w, h);
    std::vector<int> edges(kBands + 1);
    for (int i = 0; i <= kBands; ++i) edges[i] = i * h / kBands;
    for (int i = 0; i < kBands; ++i) {
        const std::uint8_t v = static_cast<std::uint8_t>(0x50 + i * 0x18);
        fill_rect(img, {0, edges[i], w, edges[i + 1]}, {v, v, v});
    }
    const int iface = 1 + static_cast<int>(spec.seed % (kBands - 1));  // 1..5
    const int y = edges[iface];
    if (spec.polarity == Polarity::Negative)
        fill_rect(img, {0, y, w, y + 1}, {0x80, 0x00, 0x00});  // genuine 1-px separator

    ProbeInfo probes;
    probes.kind = "band_stack";
    probes.interface_rect = {0, y - 2, w, y + 3};

    if (spec.orientation == Orientation::Horizontal) {
        img = img.transposed();
        probes.interface_rect = transpose_rect(probes.interface_rect);
    }

    GeneratedSample s;
    s.raster = std::move(img);
    s.category = "boundary detection";
    s.question = "The stacked bands appear divided by distinct edges. Are the bands actually "
                 "directly adjacent, with no physical separator line between them?";
    s.polarity = spec.polarity;
    s.label = FinalAnswer::yes_no(spec.polarity == Polarity::Positive);
    s.probes = probes;
    return s;
}

// Hering-style curvature: a black target line over a radial gray fan.
// Positive: geometrically straight. Negative: bowed by 2..8 px.
GeneratedSample gen_line(const StimulusSpec& spec) {
    const int w = spec.width, h = spec.height;
    Raster img(w, h, Rgb{0xFF, 0xFF, 0xFF});

    // Radial fan from the center, drawn before the target so the target
    // stays the only pure-black content.
    const Point center{w / 2, h / 2};
    const Rgb ray{0xB0, 0xB0, 0xB0};
    for (int k = 0; k < 24; ++k) {
        const double angle = k * 3.14159265358979 / 12.0;
        const int ex = center.x + static_cast<int>(std::round(std::cos(angle) * w));
        const int ey = center.y + static_cast<int>(std::round(std::sin(angle) * h));
        // integer stepping along the ray, clipped
        int steps = std::max(std::abs(ex - center.x), std::abs(ey - center.y));
        for (int t = 0; t <= steps; ++t) {
            const int x = center.x + (ex - center.x) * t / std::max(1, steps);
            const int y = center.y + (ey - center.y) * t / std::max(1, steps);
            img.set_clipped(x, y, ray);
        }
    }

    const int y0 = h / 2 - 16;
    const int x0 = 8, x1 = w - 8;  // [x0, x1)
    const int deflection =
        spec.polarity == Polarity::Negative ? 2 + static_cast<int>(spec.seed % 7) : 0;
    const double span = x1 - 1 - x0;
    for (int x = x0; x < x1; ++x) {
        const double u = (x - x0) / span * 2.0 - 1.0;  // -1..1
        const int bow = static_cast<int>(std::round(deflection * (1.0 - u * u)));
        img.set(x, y0 + bow, {0, 0, 0});
    }

    GeneratedSample s;
    s.raster = std::move(img);
    s.category = "line straightness";
    s.question = "The horizontal line appears to curve against the radiating background. Is "
                 "the line actually perfectly straight?";
    s.polarity = spec.polarity;
    s.label = FinalAnswer::yes_no(spec.polarity == Polarity::Positive);
    s.probes.kind = "reference_line";
    s.probes.line_region = {x0, y0 - 12, x1, y0 + 13};
    s.probes.line_y = y0;
    return s;
}

}  // namespace

GeneratedSample generate(const StimulusSpec& spec) {
    if (spec.width < 64 || spec.height < 64)
        throw InvalidArgsError("stimulus canvas must be at least 64x64");
    GeneratedSample s;
    switch (spec.kind) {
        case StimulusKind::ContrastPair: s = gen_contrast(spec); break;
        case StimulusKind::BandStack: s = gen_bands(spec); break;
        case StimulusKind::ReferenceLine: s = gen_line(spec); break;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%s_%04u", stimulus_kind_name(spec.kind).c_str(),
                  spec.polarity == Polarity::Positive ? "pos" : "neg", spec.seed);
    s.sample_id = buf;
    if (spec.kind == StimulusKind::BandStack && spec.orientation == Orientation::Horizontal)
        s.sample_id += "_h";
    return s;
}

ManifestOutput emit_manifest(const std::vector<StimulusSpec>& specs,
                             const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    ManifestOutput out;
    out.manifest_path = (dir / "manifest.jsonl").string();
    out.probes_path = (dir / "probes.json").string();

    std::ofstream manifest(out.manifest_path);
    if (!manifest) throw Error("cannot write " + out.manifest_path);
    nlohmann::json probes = nlohmann::json::object();

    for (const auto& spec : specs) {
        GeneratedSample s = generate(spec);
        const std::string png_name = s.sample_id + ".png";
        write_png(s.raster, (dir / png_name).string());
        nlohmann::json line{{"sample_id", s.sample_id},
                            {"task", 1},
                            {"image_path", png_name},
                            {"question", s.question},
                            {"category", s.category},
                            {"label", s.label.verdict},
                            {"polarity",
                             s.polarity == Polarity::Positive ? "positive" : "negative"}};
        manifest << line.dump() << "\n";
        probes[s.sample_id] = s.probes.to_json();
        (s.polarity == Polarity::Positive ? out.n_positive : out.n_negative)++;
    }
    manifest.close();
    if (!manifest) throw Error("write failed: " + out.manifest_path);

    std::ofstream pf(out.probes_path);
    if (!pf) throw Error("cannot write " + out.probes_path);
    pf << probes.dump(2) << "\n";
    return out;
}

}  // namespace toolsight
