#include <filesystem>
#include <fstream>

#include "toolsight/model.hpp"

namespace toolsight {

RecordingBackend::RecordingBackend(std::unique_ptr<ModelBackend> inner, std::string path)
    : inner_(std::move(inner)), path_(std::move(path)) {}

RecordingBackend::~RecordingBackend() {
    try {
        flush();
    } catch (...) {
        // destructor must not throw; an unwritable recording surfaces on
        // explicit flush()
    }
}

ModelReply RecordingBackend::generate(const std::vector<Message>& history,
                                      const std::vector<nlohmann::json>& tools,
                                      const GenerationSettings& settings) {
    ModelReply reply = inner_->generate(history, tools, settings);
    rounds_.push_back({{"history_hash", history_hash(history)}, {"reply", reply_to_json(reply)}});
    flushed_ = false;
    return reply;
}

std::string RecordingBackend::name() const { return inner_->name(); }

void RecordingBackend::flush() {
    if (flushed_) return;
    std::filesystem::path p(path_);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(path_);
    if (!f) throw Error("cannot write recording: " + path_);
    // Keep the source backend's name so a later replay is indistinguishable
    // in transcripts from the original run.
    const nlohmann::json doc{{"backend", inner_->name()}, {"rounds", rounds_}};
    f << doc.dump(2) << "\n";
    flushed_ = true;
}

namespace {

class ReplayBackend : public ModelBackend {
public:
    explicit ReplayBackend(const std::string& path) : path_(path) {
        std::ifstream f(path);
        if (!f) throw ConfigError("cannot open recording: " + path);
        nlohmann::json doc;
        f >> doc;
        name_ = doc.at("backend").get<std::string>();
        for (const auto& r : doc.at("rounds"))
            rounds_.push_back({r.at("history_hash").get<std::string>(),
                               reply_from_json(r.at("reply"))});
    }

    ModelReply generate(const std::vector<Message>& history,
                        const std::vector<nlohmann::json>&,
                        const GenerationSettings&) override {
        validate_history(history);
        const int round = static_cast<int>(pos_) + 1;
        if (pos_ >= rounds_.size())
            throw ReplayExhaustedError("recording " + path_ + " exhausted at round " +
                                           std::to_string(round),
                                       round);
        const auto& [expected_hash, reply] = rounds_[pos_];
        if (history_hash(history) != expected_hash)
            throw ReplayDivergenceError("replay divergence at round " + std::to_string(round) +
                                            " (" + path_ + ")",
                                        round);
        ++pos_;
        return reply;
    }

    std::string name() const override { return name_; }

private:
    std::string path_;
    std::string name_;
    std::vector<std::pair<std::string, ModelReply>> rounds_;
    std::size_t pos_ = 0;
};

class ReplayFactory : public BackendFactory {
public:
    explicit ReplayFactory(std::string dir) : dir_(std::move(dir)) {}
    std::unique_ptr<ModelBackend> make(const SampleContext& ctx) override {
        const auto path = std::filesystem::path(dir_) / (ctx.sample_id + ".replay.json");
        return std::make_unique<ReplayBackend>(path.string());
    }

private:
    std::string dir_;
};

class RecordingFactory : public BackendFactory {
public:
    RecordingFactory(std::unique_ptr<BackendFactory> inner, std::string dir)
        : inner_(std::move(inner)), dir_(std::move(dir)) {}
    std::unique_ptr<ModelBackend> make(const SampleContext& ctx) override {
        const auto path = std::filesystem::path(dir_) / (ctx.sample_id + ".replay.json");
        return std::make_unique<RecordingBackend>(inner_->make(ctx), path.string());
    }

private:
    std::unique_ptr<BackendFactory> inner_;
    std::string dir_;
};

}  // namespace

std::unique_ptr<ModelBackend> make_replay_backend(const std::string& path) {
    return std::make_unique<ReplayBackend>(path);
}

std::unique_ptr<BackendFactory> replay_factory(std::string dir) {
    return std::make_unique<ReplayFactory>(std::move(dir));
}

std::unique_ptr<BackendFactory> recording_factory(std::unique_ptr<BackendFactory> inner,
                                                  std::string dir) {
    return std::make_unique<RecordingFactory>(std::move(inner), std::move(dir));
}

}  // namespace toolsight
