#include "toolsight/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include "toolsight/image_io.hpp"

namespace toolsight {

namespace fs = std::filesystem;

std::vector<SampleManifestEntry> load_manifest(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IngestionError("cannot open manifest: " + path);
    const fs::path base = fs::path(path).parent_path();

    std::vector<SampleManifestEntry> entries;
    std::set<std::string> seen;
    std::string line;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw IngestionError("manifest line " + std::to_string(line_no) +
                                 ": parse error: " + e.what());
        }
        auto fail = [&](const std::string& why) -> IngestionError {
            return IngestionError("manifest line " + std::to_string(line_no) + ": " + why);
        };
        SampleManifestEntry e;
        try {
            e.sample_id = j.at("sample_id").get<std::string>();
            e.task = task_from_int(j.at("task").get<int>());
            e.image_path = j.at("image_path").get<std::string>();
            e.question = j.at("question").get<std::string>();
        } catch (const std::exception& ex) {
            throw fail(ex.what());
        }
        if (e.sample_id.empty()) throw fail("empty sample_id");
        if (!seen.insert(e.sample_id).second)
            throw fail("duplicate sample_id " + e.sample_id);
        if (e.question.empty()) throw fail("empty question");
        if (j.contains("options")) {
            for (const auto& o : j["options"]) e.options.push_back(o.get<std::string>());
        }
        if (e.task == TaskKind::TaskII && e.options.size() != 4)
            throw fail("Task II entries need exactly 4 options");
        if (j.contains("label") && !j["label"].is_null()) {
            e.label = j["label"].get<std::string>();
            if (!verdict_legal(e.task, *e.label)) throw fail("illegal label " + *e.label);
        }
        if (j.contains("polarity") && !j["polarity"].is_null()) {
            e.polarity = j["polarity"].get<std::string>();
            if (*e.polarity != "positive" && *e.polarity != "negative")
                throw fail("polarity must be positive or negative");
        }
        if (j.contains("category") && !j["category"].is_null())
            e.category = j["category"].get<std::string>();

        const fs::path img = fs::path(e.image_path).is_absolute()
                                 ? fs::path(e.image_path)
                                 : base / e.image_path;
        e.image_path = img.string();
        entries.push_back(std::move(e));
    }

    std::vector<std::string> missing;
    for (const auto& e : entries) {
        try {
            read_png(e.image_path);
        } catch (const std::exception&) {
            missing.push_back(e.sample_id);
        }
    }
    if (!missing.empty()) {
        std::string ids;
        for (const auto& id : missing) ids += (ids.empty() ? "" : ", ") + id;
        throw IngestionError("missing or undecodable images for: " + ids);
    }
    return entries;
}

std::map<std::string, ProbeInfo> load_probes(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IngestionError("cannot open probe sidecar: " + path);
    nlohmann::json j;
    f >> j;
    std::map<std::string, ProbeInfo> out;
    for (auto it = j.begin(); it != j.end(); ++it)
        out[it.key()] = ProbeInfo::from_json(it.value());
    return out;
}

nlohmann::json ResultRecord::to_json() const {
    nlohmann::json j{{"sample_id", sample_id},       {"answer", answer},
                     {"rounds_used", rounds_used},   {"rescue_used", rescue_used},
                     {"fallback_used", fallback_used}, {"tools_used", tools_used}};
    j["correct"] = correct ? nlohmann::json(*correct) : nlohmann::json(nullptr);
    return j;
}

ResultRecord ResultRecord::from_json(const nlohmann::json& j) {
    ResultRecord r;
    r.sample_id = j.at("sample_id").get<std::string>();
    r.answer = j.at("answer").get<std::string>();
    if (!j.at("correct").is_null()) r.correct = j.at("correct").get<bool>();
    r.rounds_used = j.at("rounds_used").get<int>();
    r.rescue_used = j.at("rescue_used").get<bool>();
    r.fallback_used = j.at("fallback_used").get<bool>();
    r.tools_used = j.at("tools_used").get<std::vector<std::string>>();
    return r;
}

BatchOutput run_batch(const std::vector<SampleManifestEntry>& manifest,
                      const std::map<std::string, ProbeInfo>& probes, const BatchConfig& cfg,
                      BackendFactory& factory, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const std::string results_path = (fs::path(out_dir) / "results.jsonl").string();
    if (fs::exists(results_path) && !cfg.overwrite)
        throw ConfigError("results file exists (pass overwrite to replace): " + results_path);

    std::vector<ResultRecord> results(manifest.size());
    std::atomic<std::size_t> next{0};
    const int workers = std::max(1, cfg.workers);

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= manifest.size()) return;
            const auto& entry = manifest[i];
            ResultRecord rec;
            rec.sample_id = entry.sample_id;
            try {
                SampleContext ctx;
                ctx.sample_id = entry.sample_id;
                ctx.task = entry.task;
                ctx.question = entry.question;
                if (auto it = probes.find(entry.sample_id); it != probes.end())
                    ctx.probes = it->second;
                auto backend = factory.make(ctx);
                const Raster image = read_png(entry.image_path);
                RunResult run = run_sample(cfg.agent, *backend, entry.task, image,
                                           entry.question, entry.sample_id);

                const fs::path sample_dir = fs::path(out_dir) / entry.sample_id;
                fs::create_directories(sample_dir);
                save_transcript(run.transcript, (sample_dir / "transcript.json").string());
                if (cfg.archive_registry) run.registry.archive(sample_dir.string());

                rec.answer = run.transcript.final.verdict;
                rec.rounds_used = static_cast<int>(run.transcript.rounds.size() +
                                                   run.transcript.rescue_rounds.size());
                rec.rescue_used = run.transcript.used_rescue;
                rec.fallback_used = run.transcript.used_fallback;
                rec.tools_used = run.transcript.tools_used();
            } catch (const std::exception&) {
                // Failure isolation: the sample gets the fallback answer.
                rec.answer = cfg.agent.fallback_answer(entry.task).verdict;
                rec.fallback_used = true;
            }
            if (entry.label) rec.correct = rec.answer == *entry.label;
            results[i] = std::move(rec);
        }
    };

    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::ofstream out(results_path);
    if (!out) throw Error("cannot write results: " + results_path);
    std::set<std::string> tasks_present;
    for (const auto& e : manifest) tasks_present.insert(task_name(e.task));
    nlohmann::json versions = nlohmann::json::object();
    for (const auto& t : tasks_present)
        versions[t] = build_system_prompt(t == "task1" ? TaskKind::TaskI : TaskKind::TaskII)
                          .prompt_version;
    nlohmann::json header{{"run_metadata",
                           {{"prompt_versions", versions},
                            {"model_name", cfg.agent.settings.model_name},
                            {"max_rounds", cfg.agent.max_rounds},
                            {"rescue_max_rounds", cfg.agent.rescue_max_rounds},
                            {"workers", workers},
                            {"n_samples", manifest.size()}}}};
    out << header.dump() << "\n";
    for (const auto& r : results) out << r.to_json().dump() << "\n";
    if (!out) throw Error("write failed: " + results_path);
    return {results_path, out_dir, std::move(results)};
}

std::vector<ResultRecord> load_results(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IngestionError("cannot open results: " + path);
    std::vector<ResultRecord> out;
    std::string line;
    while (std::getline(f, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        if (j.contains("run_metadata")) continue;  // header record
        out.push_back(ResultRecord::from_json(j));
    }
    return out;
}

nlohmann::json ScoreReport::to_json() const {
    nlohmann::json j{{"overall_accuracy", overall_accuracy},
                     {"n_total", n_total},
                     {"n_positive", n_positive},
                     {"n_negative", n_negative},
                     {"n_unlabeled", n_unlabeled}};
    j["positive_accuracy"] =
        positive_accuracy ? nlohmann::json(*positive_accuracy) : nlohmann::json(nullptr);
    j["negative_accuracy"] =
        negative_accuracy ? nlohmann::json(*negative_accuracy) : nlohmann::json(nullptr);
    nlohmann::json cats = nlohmann::json::object();
    for (const auto& [name, ct] : per_category)
        cats[name] = {{"correct", ct.first}, {"total", ct.second}};
    j["per_category"] = std::move(cats);
    return j;
}

std::string ScoreReport::to_table() const {
    char buf[256];
    std::string s = "metric               value\n";
    auto row = [&](const char* name, const std::optional<double>& v, int n) {
        if (v)
            std::snprintf(buf, sizeof(buf), "%-20s %.4f (n=%d)\n", name, *v, n);
        else
            std::snprintf(buf, sizeof(buf), "%-20s -      (n=%d)\n", name, n);
        s += buf;
    };
    row("overall_accuracy", overall_accuracy, n_total);
    row("positive_accuracy", positive_accuracy, n_positive);
    row("negative_accuracy", negative_accuracy, n_negative);
    for (const auto& [name, ct] : per_category) {
        std::snprintf(buf, sizeof(buf), "%-20s %.4f (n=%d)\n", name.c_str(),
                      ct.second ? static_cast<double>(ct.first) / ct.second : 0.0, ct.second);
        s += buf;
    }
    if (n_unlabeled) {
        std::snprintf(buf, sizeof(buf), "unlabeled            %d (excluded)\n", n_unlabeled);
        s += buf;
    }
    return s;
}

ScoreReport score(const std::vector<ResultRecord>& results,
                  const std::vector<SampleManifestEntry>& manifest) {
    std::map<std::string, const SampleManifestEntry*> by_id;
    for (const auto& e : manifest) by_id[e.sample_id] = &e;

    ScoreReport r;
    int correct = 0, pos_correct = 0, neg_correct = 0;
    for (const auto& res : results) {
        auto it = by_id.find(res.sample_id);
        if (it == by_id.end())
            throw IngestionError("result for unknown sample " + res.sample_id);
        const auto& entry = *it->second;
        if (!entry.label) {
            ++r.n_unlabeled;
            continue;
        }
        const bool ok = res.answer == *entry.label;
        ++r.n_total;
        correct += ok;
        if (entry.polarity) {
            if (*entry.polarity == "positive") {
                ++r.n_positive;
                pos_correct += ok;
            } else {
                ++r.n_negative;
                neg_correct += ok;
            }
        }
        if (entry.category) {
            auto& ct = r.per_category[*entry.category];
            ct.first += ok;
            ct.second += 1;
        }
    }
    if (r.n_total == 0) throw IngestionError("no labeled entries to score");
    r.overall_accuracy = static_cast<double>(correct) / r.n_total;
    if (r.n_positive) r.positive_accuracy = static_cast<double>(pos_correct) / r.n_positive;
    if (r.n_negative) r.negative_accuracy = static_cast<double>(neg_correct) / r.n_negative;
    return r;
}

nlohmann::json ToolUsageReport::to_json() const {
    nlohmann::json tools = nlohmann::json::array();
    for (const auto& [name, frac] : fractions)
        tools.push_back({{"tool", name}, {"fraction", frac}});
    return {{"n_samples", n_samples}, {"tools", std::move(tools)}};
}

std::string ToolUsageReport::to_table() const {
    std::string s = "tool                  samples-using\n";
    char buf[128];
    for (const auto& [name, frac] : fractions) {
        std::snprintf(buf, sizeof(buf), "%-21s %6.1f%%\n", name.c_str(), frac * 100.0);
        s += buf;
    }
    return s;
}

ToolUsageReport tool_usage_stats(const std::vector<Transcript>& transcripts) {
    if (transcripts.empty()) throw IngestionError("no transcripts to analyze");
    std::map<std::string, int> counts;
    std::set<std::string> listed;
    for (const auto& t : transcripts) {
        for (const auto& name : tool_subset(t.task)) listed.insert(name);
        for (const auto& name : t.tools_used()) {
            listed.insert(name);
            counts[name] += 1;  // at most once per sample
        }
    }
    ToolUsageReport r;
    r.n_samples = static_cast<int>(transcripts.size());
    for (const auto& name : listed)
        r.fractions.emplace_back(name, static_cast<double>(counts[name]) / r.n_samples);
    std::sort(r.fractions.begin(), r.fractions.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return r;
}

ToolUsageReport tool_usage_stats(const std::string& transcript_dir) {
    std::vector<Transcript> transcripts;
    if (fs::is_directory(transcript_dir))
        for (const auto& entry : fs::recursive_directory_iterator(transcript_dir))
            if (entry.is_regular_file() && entry.path().filename() == "transcript.json")
                transcripts.push_back(load_transcript(entry.path().string()));
    if (transcripts.empty())
        throw IngestionError("no transcripts found under " + transcript_dir);
    std::sort(transcripts.begin(), transcripts.end(),
              [](const Transcript& a, const Transcript& b) { return a.sample_id < b.sample_id; });
    return tool_usage_stats(transcripts);
}

nlohmann::json SweepReport::to_json() const {
    nlohmann::json entries_j = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json probes_j = nlohmann::json::array();
        for (const auto& p : e.probes)
            probes_j.push_back({{"x", p.probe.x},
                                {"y", p.probe.y},
                                {"hex_lossless", p.hex_lossless},
                                {"hex_compressed", p.hex_compressed},
                                {"dr", p.dr},
                                {"dg", p.dg},
                                {"db", p.db},
                                {"max_abs_delta", p.max_abs_delta},
                                {"flagged", p.flagged}});
        entries_j.push_back({{"quality", e.quality}, {"probes", std::move(probes_j)}});
    }
    return {{"codec", codec}, {"entries", std::move(entries_j)}};
}

std::string SweepReport::to_table() const {
    std::string s = "codec: " + codec + "\n";
    s += "quality  probe        lossless  compressed  dR  dG  dB  flag\n";
    char buf[160];
    for (const auto& e : entries)
        for (const auto& p : e.probes) {
            std::snprintf(buf, sizeof(buf), "%7d  (%4d,%4d)  %s   %s    %+3d %+3d %+3d  %s\n",
                          e.quality, p.probe.x, p.probe.y, p.hex_lossless.c_str(),
                          p.hex_compressed.c_str(), p.dr, p.dg, p.db,
                          p.flagged ? "*" : "");
            s += buf;
        }
    return s;
}

SweepReport compression_sweep(const Raster& image, const std::vector<Point>& probes,
                              const std::vector<int>& qualities) {
    for (const auto& p : probes)
        if (!image.in_bounds(p.x, p.y))
            throw InvalidArgsError("probe out of bounds: (" + std::to_string(p.x) + "," +
                                   std::to_string(p.y) + ")");
    SweepReport report;
    report.codec = jpeg_codec_id();
    for (int q : qualities) {
        const Raster decoded = decode_jpeg(encode_jpeg(image, q));
        SweepEntry entry;
        entry.quality = q;
        for (const auto& p : probes) {
            const Rgb a = image.at(p.x, p.y);
            const Rgb b = decoded.at(p.x, p.y);
            ProbeDelta d;
            d.probe = p;
            d.hex_lossless = a.to_hex();
            d.hex_compressed = b.to_hex();
            d.dr = b.r - a.r;
            d.dg = b.g - a.g;
            d.db = b.b - a.b;
            d.max_abs_delta = std::max({std::abs(d.dr), std::abs(d.dg), std::abs(d.db)});
            d.flagged = d.max_abs_delta >= 1;
            entry.probes.push_back(d);
        }
        report.entries.push_back(std::move(entry));
    }
    return report;
}

}  // namespace toolsight
