#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "toolsight/agent.hpp"
#include "toolsight/model.hpp"

namespace toolsight {

struct SampleManifestEntry {
    std::string sample_id;
    TaskKind task = TaskKind::TaskI;
    std::string image_path;  // resolved against the manifest's directory
    std::string question;
    std::vector<std::string> options;          // Task II: exactly 4
    std::optional<std::string> label;          // Yes/No or A..D
    std::optional<std::string> polarity;       // positive | negative
    std::optional<std::string> category;
};

/// One JSON record per line; validates schema, uniqueness and image
/// existence/decodability. Throws IngestionError with line numbers.
std::vector<SampleManifestEntry> load_manifest(const std::string& path);

/// Probe sidecar (sample_id -> ProbeInfo), as written by emit_manifest.
std::map<std::string, ProbeInfo> load_probes(const std::string& path);

struct ResultRecord {
    std::string sample_id;
    std::string answer;
    std::optional<bool> correct;
    int rounds_used = 0;
    bool rescue_used = false;
    bool fallback_used = false;
    std::vector<std::string> tools_used;

    nlohmann::json to_json() const;
    static ResultRecord from_json(const nlohmann::json& j);
};

struct BatchConfig {
    AgentConfig agent;
    int workers = 1;
    bool overwrite = false;
    bool archive_registry = true;
};

struct BatchOutput {
    std::string results_path;     // <out>/results.jsonl
    std::string transcript_dir;   // <out>
    std::vector<ResultRecord> results;
};

/// Fans samples out to a bounded worker pool. Per-sample failures are
/// isolated: a crashed sample yields the fallback answer, never aborts
/// the batch. Refuses an existing results file unless cfg.overwrite.
BatchOutput run_batch(const std::vector<SampleManifestEntry>& manifest,
                      const std::map<std::string, ProbeInfo>& probes, const BatchConfig& cfg,
                      BackendFactory& factory, const std::string& out_dir);

std::vector<ResultRecord> load_results(const std::string& path);

struct ScoreReport {
    double overall_accuracy = 0.0;
    std::optional<double> positive_accuracy;
    std::optional<double> negative_accuracy;
    int n_total = 0;
    int n_positive = 0;
    int n_negative = 0;
    int n_unlabeled = 0;
    std::map<std::string, std::pair<int, int>> per_category;  // correct, total

    nlohmann::json to_json() const;
    std::string to_table() const;
};

/// Pure function of (results, manifest); permutation-invariant.
/// Throws IngestionError when no labeled entries exist.
ScoreReport score(const std::vector<ResultRecord>& results,
                  const std::vector<SampleManifestEntry>& manifest);

struct ToolUsageReport {
    /// (tool name, fraction of samples invoking it at least once),
    /// sorted descending by fraction.
    std::vector<std::pair<std::string, double>> fractions;
    int n_samples = 0;

    nlohmann::json to_json() const;
    std::string to_table() const;
};

ToolUsageReport tool_usage_stats(const std::string& transcript_dir);
ToolUsageReport tool_usage_stats(const std::vector<Transcript>& transcripts);

struct ProbeDelta {
    Point probe;
    std::string hex_lossless;
    std::string hex_compressed;
    int dr = 0, dg = 0, db = 0;    // compressed minus lossless
    int max_abs_delta = 0;
    bool flagged = false;          // any |delta| >= 1
};

struct SweepEntry {
    int quality = 0;
    std::vector<ProbeDelta> probes;
};

struct SweepReport {
    std::string codec;  // pinned encoder identification
    std::vector<SweepEntry> entries;

    nlohmann::json to_json() const;
    std::string to_table() const;
};

/// Encode/decode at each JPEG quality and report per-probe color deltas
/// vs the lossless original (k=1 sampling).
SweepReport compression_sweep(const Raster& image, const std::vector<Point>& probes,
                              const std::vector<int>& qualities);

}  // namespace toolsight
