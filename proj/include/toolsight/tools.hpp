#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "toolsight/registry.hpp"

namespace toolsight {

/// Result of one tool invocation: the freshly allocated resource, a
/// model-readable observation, and an optional structured payload
/// (e.g. a sampled color).
struct ToolOutcome {
    ResourceId new_id;
    std::string observation;
    std::optional<nlohmann::json> value;
};

enum class Channel { R, G, B };

enum class ColorFamily { Red, Orange, Yellow, Green, Cyan, Blue, Purple, Magenta };

ColorFamily color_family_from_name(const std::string& name);  // throws InvalidArgsError
std::string color_family_name(ColorFamily f);

// All operations copy the source raster, never touch existing registry
// entries, and allocate exactly one new resource on success. Failures
// leave the registry unchanged.

ToolOutcome draw_line(Registry& reg, const ResourceId& src, Point p0, Point p1,
                      Rgb color, int thickness);
/// Outline through the two corner points (inclusive).
ToolOutcome draw_rectangle(Registry& reg, const ResourceId& src, Point c0, Point c1,
                           Rgb color, int thickness);
ToolOutcome draw_circle(Registry& reg, const ResourceId& src, Point center, int radius,
                        Rgb color, int thickness);
/// Rect is clamped to the raster; a fully disjoint rect is invalid-args.
ToolOutcome crop(Registry& reg, const ResourceId& src, Rect rect);
/// Horizontal composite [cropA | 8px #808080 separator | cropB], top-aligned,
/// slack filled #FFFFFF.
ToolOutcome compare_crops(Registry& reg, const ResourceId& src_a, Rect rect_a,
                          const ResourceId& src_b, Rect rect_b);
ToolOutcome overlay_grid(Registry& reg, const ResourceId& src, int rows, int cols, Rgb color);
ToolOutcome extract_channel(Registry& reg, const ResourceId& src, Channel channel);
/// Mean color of the k x k window centered at p (k odd, window clamped to
/// bounds, integer mean round half up). The new resource carries a
/// crosshair marker at p; the sampled value is read before marking.
ToolOutcome sample_color(Registry& reg, const ResourceId& src, Point p, int window = 1);
ToolOutcome isolate_color(Registry& reg, const ResourceId& src, ColorFamily family,
                          double hue_tolerance = 25.0);
/// Three iterated box-blur passes (separable, clamp-to-edge, integer
/// round half up per 1D sweep).
ToolOutcome blur(Registry& reg, const ResourceId& src, int radius);

/// External tool names in catalogue order.
const std::vector<std::string>& all_tool_names();

/// Dispatch by external tool name with a flat JSON argument record
/// (resource ids, integers, hex color strings). Throws InvalidArgsError /
/// UnknownResourceError.
ToolOutcome execute_tool(Registry& reg, const std::string& name, const nlohmann::json& args);

/// Function-call schema for the live wire protocol.
nlohmann::json tool_schema(const std::string& name);

}  // namespace toolsight
