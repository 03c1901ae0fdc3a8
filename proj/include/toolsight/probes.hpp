#pragma once

#include <json.hpp>

#include <string>

#include "toolsight/raster.hpp"

namespace toolsight {

/// Ground-truth geometry hints emitted by the stimulus generator and
/// consumed only by the scripted oracle policy (to locate probe points,
/// never to answer directly).
struct ProbeInfo {
    std::string kind;  // contrast_pair | band_stack | reference_line

    // contrast_pair
    Point patch_a_center{};
    Point patch_b_center{};
    Rect patch_a_rect{};
    Rect patch_b_rect{};

    // band_stack
    Rect interface_rect{};

    // reference_line
    Rect line_region{};
    int line_y = 0;

    nlohmann::json to_json() const;
    static ProbeInfo from_json(const nlohmann::json& j);
};

}  // namespace toolsight
