#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "toolsight/harness.hpp"
#include "toolsight/image_io.hpp"
#include "toolsight/stimulus.hpp"

namespace fs = std::filesystem;
using namespace toolsight;

namespace {

int cmd_gen(const std::string& kinds_csv, int per_kind, bool balance, unsigned seed,
            const std::string& out_dir, int size, const std::string& orientation) {
    std::vector<StimulusKind> kinds;
    std::stringstream ss(kinds_csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) kinds.push_back(stimulus_kind_from_name(item));
    if (kinds.empty()) throw ConfigError("--kinds must name at least one stimulus kind");
    const Orientation orient = orientation == "horizontal" ? Orientation::Horizontal
                                                           : Orientation::Vertical;

    std::vector<StimulusSpec> specs;
    for (auto kind : kinds)
        for (int i = 0; i < per_kind; ++i) {
            StimulusSpec spec;
            spec.kind = kind;
            spec.seed = seed + static_cast<unsigned>(i);
            spec.width = spec.height = size;
            spec.orientation = orient;
            if (balance) {
                spec.polarity = Polarity::Positive;
                specs.push_back(spec);
                spec.polarity = Polarity::Negative;
                specs.push_back(spec);
            } else {
                spec.polarity = Polarity::Positive;
                specs.push_back(spec);
            }
        }
    const ManifestOutput out = emit_manifest(specs, out_dir);
    std::cout << "wrote " << out.manifest_path << " (" << out.n_positive << " positive, "
              << out.n_negative << " negative)\nprobe sidecar: " << out.probes_path << "\n";
    return 0;
}

std::unique_ptr<BackendFactory> make_factory(const std::string& backend_spec,
                                             const LiveConfig& live_cfg) {
    if (backend_spec == "live") return live_factory(live_cfg);
    if (backend_spec.rfind("scripted:", 0) == 0)
        return scripted_factory(scripted_policy_from_name(backend_spec.substr(9)));
    if (backend_spec.rfind("replay:", 0) == 0) return replay_factory(backend_spec.substr(7));
    throw ConfigError("backend must be live, scripted:<policy> or replay:<dir>");
}

int cmd_run(int task, const std::string& manifest_path, const std::string& out_dir,
            const std::string& backend_spec, const std::string& probes_path,
            const std::string& record_dir, BatchConfig cfg, const LiveConfig& live_cfg) {
    auto manifest = load_manifest(manifest_path);
    const TaskKind expected = task_from_int(task);
    for (const auto& e : manifest)
        if (e.task != expected)
            throw ConfigError("sample " + e.sample_id + " is not a task " +
                              std::to_string(task) + " entry");

    std::map<std::string, ProbeInfo> probes;
    std::string probes_file = probes_path;
    if (probes_file.empty()) {
        const fs::path guess = fs::path(manifest_path).parent_path() / "probes.json";
        if (fs::exists(guess)) probes_file = guess.string();
    }
    if (!probes_file.empty()) probes = load_probes(probes_file);

    auto factory = make_factory(backend_spec, live_cfg);
    if (!record_dir.empty()) factory = recording_factory(std::move(factory), record_dir);

    if (manifest.empty())
        std::cerr << "warning: empty manifest, nothing to run\n";
    const BatchOutput out = run_batch(manifest, probes, cfg, *factory, out_dir);
    std::cout << "wrote " << out.results_path << " (" << out.results.size() << " samples)\n";
    return 0;
}

int cmd_score(const std::string& results_path, const std::string& manifest_path) {
    const auto results = load_results(results_path);
    const auto manifest = load_manifest(manifest_path);
    const ScoreReport report = score(results, manifest);
    const std::string json_path =
        (fs::path(results_path).parent_path() / "score.json").string();
    std::ofstream f(json_path);
    f << report.to_json().dump(2) << "\n";
    std::cout << report.to_table() << "report: " << json_path << "\n";
    return 0;
}

int cmd_stats(const std::string& transcripts_dir) {
    const ToolUsageReport report = tool_usage_stats(transcripts_dir);
    const std::string json_path = (fs::path(transcripts_dir) / "tool_usage.json").string();
    std::ofstream f(json_path);
    f << report.to_json().dump(2) << "\n";
    std::cout << report.to_table() << "report: " << json_path << "\n";
    return 0;
}

int cmd_sweep(const std::string& image_path, const std::string& probes_path,
              const std::string& qualities_csv, const std::string& json_out) {
    const Raster image = read_png(image_path);
    std::ifstream pf(probes_path);
    if (!pf) throw IngestionError("cannot open probes file: " + probes_path);
    nlohmann::json pj;
    pf >> pj;
    std::vector<Point> probes;
    for (const auto& p : pj) probes.push_back({p.at("x").get<int>(), p.at("y").get<int>()});

    std::vector<int> qualities;
    std::stringstream ss(qualities_csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) qualities.push_back(std::stoi(item));

    const SweepReport report = compression_sweep(image, probes, qualities);
    std::cout << report.to_table();
    if (!json_out.empty()) {
        std::ofstream f(json_out);
        f << report.to_json().dump(2) << "\n";
        std::cout << "report: " << json_out << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"toolsight: tool-guided visual illusion verification"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate synthetic illusion stimuli");
    std::string kinds = "contrast_pair,band_stack,reference_line";
    int per_kind = 10, size = 128;
    bool balance = false;
    unsigned seed = 42;
    std::string gen_out, orientation = "vertical";
    gen->add_option("--kinds", kinds, "comma-separated stimulus kinds");
    gen->add_option("--per-kind", per_kind, "samples per kind (per polarity with --balance)");
    gen->add_flag("--balance", balance, "emit a negative counterpart for every positive");
    gen->add_option("--seed", seed, "base seed");
    gen->add_option("--size", size, "canvas edge in pixels (min 64)");
    gen->add_option("--orientation", orientation, "band_stack orientation: vertical|horizontal");
    gen->add_option("--out", gen_out, "output directory")->required();

    // run
    auto* run = app.add_subcommand("run", "run the agent over a manifest");
    int task = 1;
    std::string manifest_path, run_out, backend_spec = "scripted:oracle";
    std::string probes_path, record_dir;
    BatchConfig batch_cfg;
    LiveConfig live_cfg;
    run->add_option("--task", task, "1 or 2")->required();
    run->add_option("--manifest", manifest_path, "JSONL manifest")->required();
    run->add_option("--out", run_out, "output directory")->required();
    run->add_option("--backend", backend_spec, "live | scripted:<policy> | replay:<dir>");
    run->add_option("--workers", batch_cfg.workers, "concurrent samples");
    run->add_option("--max-rounds", batch_cfg.agent.max_rounds, "main round limit");
    run->add_option("--rescue-rounds", batch_cfg.agent.rescue_max_rounds, "rescue round limit");
    run->add_option("--probes", probes_path, "probe sidecar (default: probes.json next to manifest)");
    run->add_option("--record-dir", record_dir, "record replies for later replay");
    run->add_flag("--overwrite", batch_cfg.overwrite, "replace an existing results file");
    run->add_option("--base-url", live_cfg.base_url, "live backend base URL");
    run->add_option("--model", live_cfg.model_name, "live backend model name");
    run->add_option("--api-key-env", live_cfg.api_key_env, "env var holding the API key");
    run->add_option("--max-image-edge", live_cfg.max_image_edge,
                    "downscale images for transport (0 = full resolution)");
    run->add_flag("--verbose", live_cfg.verbose, "log live requests (credentials redacted)");

    // score
    auto* score_cmd = app.add_subcommand("score", "score a results file against its manifest");
    std::string results_path, score_manifest;
    score_cmd->add_option("--results", results_path, "results.jsonl")->required();
    score_cmd->add_option("--manifest", score_manifest, "JSONL manifest")->required();

    // stats
    auto* stats = app.add_subcommand("stats", "tool-usage analytics over transcripts");
    std::string transcripts_dir;
    stats->add_option("--transcripts", transcripts_dir, "transcript directory")->required();

    // sweep
    auto* sweep = app.add_subcommand("sweep", "JPEG compression sensitivity sweep");
    std::string image_path, sweep_probes, qualities = "30,50,70,90", sweep_json;
    sweep->add_option("--image", image_path, "PNG image")->required();
    sweep->add_option("--probes", sweep_probes, "JSON probe list [{x,y},...]")->required();
    sweep->add_option("--qualities", qualities, "comma-separated JPEG qualities");
    sweep->add_option("--json-out", sweep_json, "also write the report as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_gen(kinds, per_kind, balance, seed, gen_out, size, orientation);
        if (run->parsed()) {
            batch_cfg.agent.settings.model_name =
                backend_spec == "live" ? live_cfg.model_name : backend_spec;
            return cmd_run(task, manifest_path, run_out, backend_spec, probes_path, record_dir,
                           batch_cfg, live_cfg);
        }
        if (score_cmd->parsed()) return cmd_score(results_path, score_manifest);
        if (stats->parsed()) return cmd_stats(transcripts_dir);
        if (sweep->parsed()) return cmd_sweep(image_path, sweep_probes, qualities, sweep_json);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const IngestionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const InvalidArgsError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
