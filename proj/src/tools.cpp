#include "toolsight/tools.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace toolsight {

namespace {

std::string canon(const nlohmann::json& args) { return args.dump(); }

std::string dims(const Raster& r) {
    return std::to_string(r.width()) + "x" + std::to_string(r.height());
}

std::string rect_str(const Rect& r) {
    return "(" + std::to_string(r.x0) + "," + std::to_string(r.y0) + ")-(" +
           std::to_string(r.x1) + "," + std::to_string(r.y1) + ")";
}

ResourceId allocate(Registry& reg, Raster raster, const std::string& tool,
                    const nlohmann::json& args, std::vector<ResourceId> sources) {
    return reg.allocate(std::move(raster),
                        Provenance{tool, canon(args), std::move(sources), 0});
}

// Filled disc of diameter = thickness stamped at (cx, cy), clipped.
void stamp_disc(Raster& img, int cx, int cy, int thickness, Rgb color) {
    const int r = thickness / 2;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
            if (dx * dx + dy * dy <= r * r) img.set_clipped(cx + dx, cy + dy, color);
}

// Integer midpoint (Bresenham) stepping, both endpoints included.
template <typename Fn>
void step_line(Point p0, Point p1, Fn&& plot) {
    int x = p0.x, y = p0.y;
    const int dx = std::abs(p1.x - p0.x), dy = -std::abs(p1.y - p0.y);
    const int sx = p0.x < p1.x ? 1 : -1, sy = p0.y < p1.y ? 1 : -1;
    int err = dx + dy;
    while (true) {
        plot(x, y);
        if (x == p1.x && y == p1.y) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y += sy;
        }
    }
}

void paint_line(Raster& img, Point p0, Point p1, Rgb color, int thickness) {
    step_line(p0, p1, [&](int x, int y) { stamp_disc(img, x, y, thickness, color); });
}

// Midpoint circle outline, stamped per plotted point.
void paint_circle(Raster& img, Point c, int radius, Rgb color, int thickness) {
    if (radius == 0) {
        stamp_disc(img, c.x, c.y, thickness, color);
        return;
    }
    int x = radius, y = 0, err = 1 - radius;
    auto plot8 = [&](int px, int py) {
        stamp_disc(img, c.x + px, c.y + py, thickness, color);
        stamp_disc(img, c.x - px, c.y + py, thickness, color);
        stamp_disc(img, c.x + px, c.y - py, thickness, color);
        stamp_disc(img, c.x - px, c.y - py, thickness, color);
        stamp_disc(img, c.x + py, c.y + px, thickness, color);
        stamp_disc(img, c.x - py, c.y + px, thickness, color);
        stamp_disc(img, c.x + py, c.y - px, thickness, color);
        stamp_disc(img, c.x - py, c.y - px, thickness, color);
    };
    while (x >= y) {
        plot8(x, y);
        ++y;
        if (err < 0) {
            err += 2 * y + 1;
        } else {
            --x;
            err += 2 * (y - x) + 1;
        }
    }
}

Rect clamp_rect(Rect r, const Raster& img) {
    if (r.x0 >= r.x1 || r.y0 >= r.y1)
        throw InvalidArgsError("degenerate rect " + rect_str(r));
    Rect c{std::max(r.x0, 0), std::max(r.y0, 0), std::min(r.x1, img.width()),
           std::min(r.y1, img.height())};
    if (c.x0 >= c.x1 || c.y0 >= c.y1)
        throw InvalidArgsError("crop outside image: " + rect_str(r));
    return c;
}

Raster crop_raster(const Raster& src, Rect clamped) {
    Raster out(clamped.width(), clamped.height());
    for (int y = 0; y < clamped.height(); ++y)
        for (int x = 0; x < clamped.width(); ++x)
            out.set(x, y, src.at(clamped.x0 + x, clamped.y0 + y));
    return out;
}

// Round half up on a nonnegative ratio.
int div_round_half_up(long long num, long long den) {
    return static_cast<int>((2 * num + den) / (2 * den));
}

// One 1D box sweep with clamp-to-edge and round half up. horizontal=false
// sweeps columns.
Raster box_sweep(const Raster& src, int radius, bool horizontal) {
    const int w = src.width(), h = src.height();
    const int n = 2 * radius + 1;
    Raster out(w, h);
    const int outer = horizontal ? h : w;
    const int inner = horizontal ? w : h;
    for (int o = 0; o < outer; ++o) {
        long long sum[3] = {0, 0, 0};
        auto sample = [&](int i) {
            const int c = std::clamp(i, 0, inner - 1);
            return horizontal ? src.at(c, o) : src.at(o, c);
        };
        for (int i = -radius; i <= radius; ++i) {
            const Rgb p = sample(i);
            sum[0] += p.r;
            sum[1] += p.g;
            sum[2] += p.b;
        }
        for (int i = 0; i < inner; ++i) {
            const Rgb v{static_cast<std::uint8_t>((sum[0] + radius) / n),
                        static_cast<std::uint8_t>((sum[1] + radius) / n),
                        static_cast<std::uint8_t>((sum[2] + radius) / n)};
            if (horizontal)
                out.set(i, o, v);
            else
                out.set(o, i, v);
            const Rgb in = sample(i + radius + 1);
            const Rgb off = sample(i - radius);
            sum[0] += in.r - off.r;
            sum[1] += in.g - off.g;
            sum[2] += in.b - off.b;
        }
    }
    return out;
}

struct Hsv {
    double h;  // [0,360)
    double s;  // [0,1]
    double v;  // [0,1]
};

Hsv rgb_to_hsv(Rgb c) {
    const double r = c.r / 255.0, g = c.g / 255.0, b = c.b / 255.0;
    const double mx = std::max({r, g, b}), mn = std::min({r, g, b});
    const double d = mx - mn;
    double h = 0;
    if (d > 0) {
        if (mx == r)
            h = 60.0 * std::fmod((g - b) / d, 6.0);
        else if (mx == g)
            h = 60.0 * ((b - r) / d + 2.0);
        else
            h = 60.0 * ((r - g) / d + 4.0);
        if (h < 0) h += 360.0;
    }
    return {h, mx > 0 ? d / mx : 0.0, mx};
}

double hue_distance(double a, double b) {
    const double d = std::fabs(a - b);
    return std::min(d, 360.0 - d);
}

constexpr struct {
    ColorFamily family;
    const char* name;
    double center;
} kFamilies[] = {
    {ColorFamily::Red, "red", 0.0},       {ColorFamily::Orange, "orange", 30.0},
    {ColorFamily::Yellow, "yellow", 60.0}, {ColorFamily::Green, "green", 120.0},
    {ColorFamily::Cyan, "cyan", 180.0},    {ColorFamily::Blue, "blue", 240.0},
    {ColorFamily::Purple, "purple", 275.0}, {ColorFamily::Magenta, "magenta", 310.0},
};

}  // namespace

ColorFamily color_family_from_name(const std::string& name) {
    for (const auto& f : kFamilies)
        if (name == f.name) return f.family;
    throw InvalidArgsError("unknown color family: " + name);
}

std::string color_family_name(ColorFamily f) {
    for (const auto& e : kFamilies)
        if (e.family == f) return e.name;
    return "?";
}

ToolOutcome draw_line(Registry& reg, const ResourceId& src, Point p0, Point p1,
                      Rgb color, int thickness) {
    if (thickness < 1) throw InvalidArgsError("thickness must be >= 1");
    Raster img = reg.get(src).raster;
    paint_line(img, p0, p1, color, thickness);
    nlohmann::json args{{"resource_id", src}, {"x0", p0.x}, {"y0", p0.y},
                        {"x1", p1.x},         {"y1", p1.y}, {"color", color.to_hex()},
                        {"thickness", thickness}};
    std::string obs = "Drew line (" + std::to_string(p0.x) + "," + std::to_string(p0.y) +
                      ")->(" + std::to_string(p1.x) + "," + std::to_string(p1.y) + ") in " +
                      color.to_hex() + " on " + src;
    ResourceId id = allocate(reg, std::move(img), "draw_line", args, {src});
    return {id, obs + "; new resource " + id, std::nullopt};
}

ToolOutcome draw_rectangle(Registry& reg, const ResourceId& src, Point c0, Point c1,
                           Rgb color, int thickness) {
    if (thickness < 1) throw InvalidArgsError("thickness must be >= 1");
    Raster img = reg.get(src).raster;
    paint_line(img, {c0.x, c0.y}, {c1.x, c0.y}, color, thickness);
    paint_line(img, {c1.x, c0.y}, {c1.x, c1.y}, color, thickness);
    paint_line(img, {c1.x, c1.y}, {c0.x, c1.y}, color, thickness);
    paint_line(img, {c0.x, c1.y}, {c0.x, c0.y}, color, thickness);
    nlohmann::json args{{"resource_id", src}, {"x0", c0.x}, {"y0", c0.y},
                        {"x1", c1.x},         {"y1", c1.y}, {"color", color.to_hex()},
                        {"thickness", thickness}};
    std::string obs = "Drew rectangle outline (" + std::to_string(c0.x) + "," +
                      std::to_string(c0.y) + ")-(" + std::to_string(c1.x) + "," +
                      std::to_string(c1.y) + ") in " + color.to_hex() + " on " + src;
    ResourceId id = allocate(reg, std::move(img), "draw_rectangle", args, {src});
    return {id, obs + "; new resource " + id, std::nullopt};
}

ToolOutcome draw_circle(Registry& reg, const ResourceId& src, Point center, int radius,
                        Rgb color, int thickness) {
    if (thickness < 1) throw InvalidArgsError("thickness must be >= 1");
    if (radius < 0) throw InvalidArgsError("radius must be >= 0");
    Raster img = reg.get(src).raster;
    paint_circle(img, center, radius, color, thickness);
    nlohmann::json args{{"resource_id", src}, {"x", center.x},           {"y", center.y},
                        {"radius", radius},   {"color", color.to_hex()}, {"thickness", thickness}};
    std::string obs = "Drew circle center (" + std::to_string(center.x) + "," +
                      std::to_string(center.y) + ") radius " + std::to_string(radius) +
                      " in " + color.to_hex() + " on " + src;
    ResourceId id = allocate(reg, std::move(img), "draw_circle", args, {src});
    return {id, obs + "; new resource " + id, std::nullopt};
}

ToolOutcome crop(Registry& reg, const ResourceId& src, Rect rect) {
    const Raster& source = reg.get(src).raster;
    const Rect clamped = clamp_rect(rect, source);
    Raster out = crop_raster(source, clamped);
    nlohmann::json args{{"resource_id", src}, {"x0", rect.x0}, {"y0", rect.y0},
                        {"x1", rect.x1},      {"y1", rect.y1}};
    std::string obs = "Cropped " + src + " at " + rect_str(clamped) +
                      (clamped == rect ? "" : " (clamped from " + rect_str(rect) + ")") +
                      "; new resource is " + dims(out);
    ResourceId id = allocate(reg, std::move(out), "crop", args, {src});
    return {id, obs + " " + id, std::nullopt};
}

ToolOutcome compare_crops(Registry& reg, const ResourceId& src_a, Rect rect_a,
                          const ResourceId& src_b, Rect rect_b) {
    static constexpr int kSeparator = 8;
    const Raster& a_img = reg.get(src_a).raster;
    const Raster& b_img = reg.get(src_b).raster;
    const Rect ca = clamp_rect(rect_a, a_img);
    const Rect cb = clamp_rect(rect_b, b_img);
    Raster left = crop_raster(a_img, ca);
    Raster right = crop_raster(b_img, cb);
    const int h = std::max(left.height(), right.height());
    const int w = left.width() + kSeparator + right.width();
    Raster out(w, h, Rgb{255, 255, 255});
    for (int y = 0; y < left.height(); ++y)
        for (int x = 0; x < left.width(); ++x) out.set(x, y, left.at(x, y));
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < kSeparator; ++x)
            out.set(left.width() + x, y, {0x80, 0x80, 0x80});
    for (int y = 0; y < right.height(); ++y)
        for (int x = 0; x < right.width(); ++x)
            out.set(left.width() + kSeparator + x, y, right.at(x, y));
    nlohmann::json args{{"resource_id_a", src_a}, {"ax0", rect_a.x0}, {"ay0", rect_a.y0},
                        {"ax1", rect_a.x1},       {"ay1", rect_a.y1}, {"resource_id_b", src_b},
                        {"bx0", rect_b.x0},       {"by0", rect_b.y0}, {"bx1", rect_b.x1},
                        {"by1", rect_b.y1}};
    std::string obs = "left = " + src_a + " " + rect_str(ca) + ", right = " + src_b + " " +
                      rect_str(cb) + "; composite is " + dims(out);
    ResourceId id = allocate(reg, std::move(out), "compare_crops", args, {src_a, src_b});
    return {id, obs + " " + id, std::nullopt};
}

ToolOutcome overlay_grid(Registry& reg, const ResourceId& src, int rows, int cols, Rgb color) {
    if (rows < 1 || cols < 1) throw InvalidArgsError("rows and cols must be >= 1");
    Raster img = reg.get(src).raster;
    if (rows > img.height() || cols > img.width())
        throw InvalidArgsError("grid finer than the raster");
    for (int j = 1; j < cols; ++j) {
        const int x = div_round_half_up(static_cast<long long>(j) * img.width(), cols);
        for (int y = 0; y < img.height(); ++y) img.set_clipped(x, y, color);
    }
    for (int i = 1; i < rows; ++i) {
        const int y = div_round_half_up(static_cast<long long>(i) * img.height(), rows);
        for (int x = 0; x < img.width(); ++x) img.set_clipped(x, y, color);
    }
    nlohmann::json args{{"resource_id", src}, {"rows", rows}, {"cols", cols},
                        {"color", color.to_hex()}};
    std::string obs = "Overlaid " + std::to_string(rows) + "x" + std::to_string(cols) +
                      " grid on " + src;
    ResourceId id = allocate(reg, std::move(img), "overlay_grid", args, {src});
    return {id, obs + "; new resource " + id, std::nullopt};
}

ToolOutcome extract_channel(Registry& reg, const ResourceId& src, Channel channel) {
    const Raster& source = reg.get(src).raster;
    Raster out(source.width(), source.height());
    for (int y = 0; y < source.height(); ++y)
        for (int x = 0; x < source.width(); ++x) {
            const Rgb p = source.at(x, y);
            const std::uint8_t v = channel == Channel::R ? p.r
                                 : channel == Channel::G ? p.g
                                                         : p.b;
            out.set(x, y, {v, v, v});
        }
    const char* ch = channel == Channel::R ? "R" : channel == Channel::G ? "G" : "B";
    nlohmann::json args{{"resource_id", src}, {"channel", ch}};
    ResourceId id = allocate(reg, std::move(out), "extract_channel", args, {src});
    return {id, std::string("Extracted ") + ch + " channel of " + src + " as grayscale " + id,
            std::nullopt};
}

ToolOutcome sample_color(Registry& reg, const ResourceId& src, Point p, int window) {
    const Raster& source = reg.get(src).raster;
    if (window < 1 || window % 2 == 0) throw InvalidArgsError("window must be odd and >= 1");
    if (!source.in_bounds(p.x, p.y))
        throw InvalidArgsError("sample point out of bounds");
    const int half = (window - 1) / 2;
    const int x0 = std::max(0, p.x - half), x1 = std::min(source.width() - 1, p.x + half);
    const int y0 = std::max(0, p.y - half), y1 = std::min(source.height() - 1, p.y + half);
    long long sum[3] = {0, 0, 0};
    long long count = 0;
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            const Rgb c = source.at(x, y);
            sum[0] += c.r;
            sum[1] += c.g;
            sum[2] += c.b;
            ++count;
        }
    const Rgb mean{static_cast<std::uint8_t>(div_round_half_up(sum[0], count)),
                   static_cast<std::uint8_t>(div_round_half_up(sum[1], count)),
                   static_cast<std::uint8_t>(div_round_half_up(sum[2], count))};

    Raster img = source;
    const Rgb marker{0xFF, 0x00, 0xFF};
    for (int d = -4; d <= 4; ++d) {
        img.set_clipped(p.x + d, p.y, marker);
        img.set_clipped(p.x, p.y + d, marker);
    }
    nlohmann::json args{{"resource_id", src}, {"x", p.x}, {"y", p.y}, {"window", window}};
    std::string obs = "Sampled " + src + " at (" + std::to_string(p.x) + "," +
                      std::to_string(p.y) + ") window " + std::to_string(window) + ": " +
                      mean.to_hex();
    ResourceId id = allocate(reg, std::move(img), "sample_color", args, {src});
    nlohmann::json value{{"hex", mean.to_hex()}, {"r", mean.r}, {"g", mean.g}, {"b", mean.b}};
    return {id, obs + "; marker at " + id, value};
}

ToolOutcome isolate_color(Registry& reg, const ResourceId& src, ColorFamily family,
                          double hue_tolerance) {
    if (hue_tolerance <= 0.0 || hue_tolerance >= 180.0)
        throw InvalidArgsError("hue_tolerance must be in (0,180)");
    double center = 0;
    for (const auto& e : kFamilies)
        if (e.family == family) center = e.center;
    const Raster& source = reg.get(src).raster;
    Raster out(source.width(), source.height());
    for (int y = 0; y < source.height(); ++y)
        for (int x = 0; x < source.width(); ++x) {
            const Rgb p = source.at(x, y);
            const Hsv hsv = rgb_to_hsv(p);
            const bool keep = hsv.s >= 0.2 && hsv.v >= 0.15 &&
                              hue_distance(hsv.h, center) <= hue_tolerance;
            out.set(x, y, keep ? p : Rgb{255, 255, 255});
        }
    nlohmann::json args{{"resource_id", src}, {"family", color_family_name(family)},
                        {"hue_tolerance", hue_tolerance}};
    ResourceId id = allocate(reg, std::move(out), "isolate_color", args, {src});
    return {id, "Isolated " + color_family_name(family) + " family of " + src +
                    "; non-matching pixels whited out in " + id,
            std::nullopt};
}

ToolOutcome blur(Registry& reg, const ResourceId& src, int radius) {
    if (radius < 1) throw InvalidArgsError("radius must be >= 1");
    Raster img = reg.get(src).raster;
    for (int pass = 0; pass < 3; ++pass) {
        img = box_sweep(img, radius, true);
        img = box_sweep(img, radius, false);
    }
    nlohmann::json args{{"resource_id", src}, {"radius", radius}};
    ResourceId id = allocate(reg, std::move(img), "blur", args, {src});
    return {id, "Blurred " + src + " with radius " + std::to_string(radius) +
                    " (3 box passes); new resource " + id,
            std::nullopt};
}

const std::vector<std::string>& all_tool_names() {
    static const std::vector<std::string> names = {
        "draw_line",   "draw_rectangle",  "draw_circle",  "crop",
        "compare_crops", "overlay_grid",  "extract_channel", "sample_color",
        "isolate_color", "blur"};
    return names;
}

namespace {

int get_int(const nlohmann::json& args, const std::string& key) {
    if (!args.contains(key) || !args[key].is_number_integer())
        throw InvalidArgsError("missing or non-integer argument: " + key);
    return args[key].get<int>();
}

int get_int_or(const nlohmann::json& args, const std::string& key, int fallback) {
    return args.contains(key) ? get_int(args, key) : fallback;
}

std::string get_str(const nlohmann::json& args, const std::string& key) {
    if (!args.contains(key) || !args[key].is_string())
        throw InvalidArgsError("missing or non-string argument: " + key);
    return args[key].get<std::string>();
}

Rgb get_color(const nlohmann::json& args, const std::string& key) {
    return Rgb::from_hex(get_str(args, key));
}

Rect get_rect(const nlohmann::json& args, const char* x0, const char* y0, const char* x1,
              const char* y1) {
    return {get_int(args, x0), get_int(args, y0), get_int(args, x1), get_int(args, y1)};
}

}  // namespace

ToolOutcome execute_tool(Registry& reg, const std::string& name, const nlohmann::json& args) {
    if (!args.is_object()) throw InvalidArgsError("tool arguments must be an object");
    if (name == "draw_line") {
        return draw_line(reg, get_str(args, "resource_id"),
                         {get_int(args, "x0"), get_int(args, "y0")},
                         {get_int(args, "x1"), get_int(args, "y1")}, get_color(args, "color"),
                         get_int_or(args, "thickness", 1));
    }
    if (name == "draw_rectangle") {
        return draw_rectangle(reg, get_str(args, "resource_id"),
                              {get_int(args, "x0"), get_int(args, "y0")},
                              {get_int(args, "x1"), get_int(args, "y1")},
                              get_color(args, "color"), get_int_or(args, "thickness", 1));
    }
    if (name == "draw_circle") {
        return draw_circle(reg, get_str(args, "resource_id"),
                           {get_int(args, "x"), get_int(args, "y")}, get_int(args, "radius"),
                           get_color(args, "color"), get_int_or(args, "thickness", 1));
    }
    if (name == "crop")
        return crop(reg, get_str(args, "resource_id"), get_rect(args, "x0", "y0", "x1", "y1"));
    if (name == "compare_crops") {
        return compare_crops(reg, get_str(args, "resource_id_a"),
                             get_rect(args, "ax0", "ay0", "ax1", "ay1"),
                             get_str(args, "resource_id_b"),
                             get_rect(args, "bx0", "by0", "bx1", "by1"));
    }
    if (name == "overlay_grid")
        return overlay_grid(reg, get_str(args, "resource_id"), get_int(args, "rows"),
                            get_int(args, "cols"), get_color(args, "color"));
    if (name == "extract_channel") {
        const std::string ch = get_str(args, "channel");
        Channel c;
        if (ch == "R")
            c = Channel::R;
        else if (ch == "G")
            c = Channel::G;
        else if (ch == "B")
            c = Channel::B;
        else
            throw InvalidArgsError("channel must be R, G or B");
        return extract_channel(reg, get_str(args, "resource_id"), c);
    }
    if (name == "sample_color")
        return sample_color(reg, get_str(args, "resource_id"),
                            {get_int(args, "x"), get_int(args, "y")},
                            get_int_or(args, "window", 1));
    if (name == "isolate_color") {
        double tol = 25.0;
        if (args.contains("hue_tolerance")) {
            if (!args["hue_tolerance"].is_number())
                throw InvalidArgsError("hue_tolerance must be a number");
            tol = args["hue_tolerance"].get<double>();
        }
        return isolate_color(reg, get_str(args, "resource_id"),
                             color_family_from_name(get_str(args, "family")), tol);
    }
    if (name == "blur")
        return blur(reg, get_str(args, "resource_id"), get_int(args, "radius"));
    throw InvalidArgsError("unknown tool: " + name);
}

nlohmann::json tool_schema(const std::string& name) {
    auto prop = [](const char* type, const char* desc) {
        return nlohmann::json{{"type", type}, {"description", desc}};
    };
    const auto rid = prop("string", "source image resource id, e.g. \"original\" or \"img_001\"");
    const auto color = prop("string", "hex color \"#RRGGBB\"");
    nlohmann::json params{{"type", "object"}, {"properties", nlohmann::json::object()},
                          {"required", nlohmann::json::array()}};
    auto& props = params["properties"];
    auto& req = params["required"];
    auto add = [&](const std::string& key, nlohmann::json p, bool required = true) {
        props[key] = std::move(p);
        if (required) req.push_back(key);
    };
    std::string description;
    if (name == "draw_line" || name == "draw_rectangle") {
        description = name == "draw_line"
                          ? "Draw a straight line between two points onto a copy of the image."
                          : "Draw a rectangle outline through two corner points onto a copy of the image.";
        add("resource_id", rid);
        add("x0", prop("integer", "first point x"));
        add("y0", prop("integer", "first point y"));
        add("x1", prop("integer", "second point x"));
        add("y1", prop("integer", "second point y"));
        add("color", color);
        add("thickness", prop("integer", "stroke thickness in pixels (default 1)"), false);
    } else if (name == "draw_circle") {
        description = "Draw a circle outline onto a copy of the image.";
        add("resource_id", rid);
        add("x", prop("integer", "center x"));
        add("y", prop("integer", "center y"));
        add("radius", prop("integer", "radius in pixels"));
        add("color", color);
        add("thickness", prop("integer", "stroke thickness in pixels (default 1)"), false);
    } else if (name == "crop") {
        description = "Crop a rectangular region [x0,x1) x [y0,y1) into a new image for zoom-in inspection.";
        add("resource_id", rid);
        add("x0", prop("integer", "left (inclusive)"));
        add("y0", prop("integer", "top (inclusive)"));
        add("x1", prop("integer", "right (exclusive)"));
        add("y1", prop("integer", "bottom (exclusive)"));
    } else if (name == "compare_crops") {
        description = "Place two cropped regions side by side (left|separator|right) for direct comparison.";
        add("resource_id_a", rid);
        add("ax0", prop("integer", "left crop: left"));
        add("ay0", prop("integer", "left crop: top"));
        add("ax1", prop("integer", "left crop: right (exclusive)"));
        add("ay1", prop("integer", "left crop: bottom (exclusive)"));
        add("resource_id_b", rid);
        add("bx0", prop("integer", "right crop: left"));
        add("by0", prop("integer", "right crop: top"));
        add("bx1", prop("integer", "right crop: right (exclusive)"));
        add("by1", prop("integer", "right crop: bottom (exclusive)"));
    } else if (name == "overlay_grid") {
        description = "Overlay an evenly spaced grid for categorical grouping and counting.";
        add("resource_id", rid);
        add("rows", prop("integer", "number of grid rows (>=1)"));
        add("cols", prop("integer", "number of grid columns (>=1)"));
        add("color", color);
    } else if (name == "extract_channel") {
        description = "Render a single color channel as a grayscale image.";
        add("resource_id", rid);
        add("channel", prop("string", "one of R, G, B"));
    } else if (name == "sample_color") {
        description = "Report the mean color of a small window at a point; the returned image marks the sampled location.";
        add("resource_id", rid);
        add("x", prop("integer", "sample x"));
        add("y", prop("integer", "sample y"));
        add("window", prop("integer", "odd window size (default 1)"), false);
    } else if (name == "isolate_color") {
        description = "Keep only pixels of one color family (Ishihara-style isolation); everything else becomes white.";
        add("resource_id", rid);
        add("family", prop("string", "red|orange|yellow|green|cyan|blue|purple|magenta"));
        add("hue_tolerance", prop("number", "hue tolerance in degrees (default 25)"), false);
    } else if (name == "blur") {
        description = "Large-radius blur (Gaussian approximation) for revealing hidden patterns.";
        add("resource_id", rid);
        add("radius", prop("integer", "blur radius in pixels (>=1)"));
    } else if (name == "show_resource") {
        description = "Re-send a previously created image resource without modifying anything.";
        add("resource_id", rid);
    } else {
        throw InvalidArgsError("unknown tool: " + name);
    }
    return nlohmann::json{{"name", name}, {"description", description}, {"parameters", params}};
}

}  // namespace toolsight
