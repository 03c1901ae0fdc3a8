#pragma once

#include <string>
#include <vector>

#include "toolsight/probes.hpp"
#include "toolsight/task.hpp"

namespace toolsight {

enum class StimulusKind { ContrastPair, BandStack, ReferenceLine };
enum class Polarity { Positive, Negative };
enum class Orientation { Vertical, Horizontal };  // band_stack only

StimulusKind stimulus_kind_from_name(const std::string& name);
std::string stimulus_kind_name(StimulusKind k);

struct StimulusSpec {
    StimulusKind kind = StimulusKind::ContrastPair;
    Polarity polarity = Polarity::Positive;
    Orientation orientation = Orientation::Vertical;
    unsigned seed = 0;
    int width = 128;
    int height = 128;
};

struct GeneratedSample {
    std::string sample_id;
    Raster raster;
    std::string question;
    std::string category;      // Task I category the question belongs to
    FinalAnswer label;         // Yes iff the illusion genuinely holds
    Polarity polarity = Polarity::Positive;
    ProbeInfo probes;
};

/// Deterministic rendering; identical specs yield identical samples.
/// Throws InvalidArgsError for canvases below 64x64.
GeneratedSample generate(const StimulusSpec& spec);

struct ManifestOutput {
    std::string manifest_path;
    std::string probes_path;
    int n_positive = 0;
    int n_negative = 0;
};

/// Writes PNGs, a JSONL manifest and the probe sidecar under out_dir.
ManifestOutput emit_manifest(const std::vector<StimulusSpec>& specs,
                             const std::string& out_dir);

}  // namespace toolsight
