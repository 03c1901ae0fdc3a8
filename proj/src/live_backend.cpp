#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <thread>

#include "toolsight/image_io.hpp"
#include "toolsight/model.hpp"

namespace toolsight {

namespace {

std::atomic<std::uint64_t> g_connection_attempts{0};

std::string base64_encode(const std::vector<std::uint8_t>& data) {
    static const char* k = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 3 <= data.size()) {
        const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
        out.push_back(k[(v >> 18) & 63]);
        out.push_back(k[(v >> 12) & 63]);
        out.push_back(k[(v >> 6) & 63]);
        out.push_back(k[v & 63]);
        i += 3;
    }
    if (i + 1 == data.size()) {
        const std::uint32_t v = data[i] << 16;
        out.push_back(k[(v >> 18) & 63]);
        out.push_back(k[(v >> 12) & 63]);
        out += "==";
    } else if (i + 2 == data.size()) {
        const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8);
        out.push_back(k[(v >> 18) & 63]);
        out.push_back(k[(v >> 12) & 63]);
        out.push_back(k[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

Raster downscale_max_edge(const Raster& src, int max_edge) {
    const int longest = std::max(src.width(), src.height());
    if (longest <= max_edge) return src;
    const double scale = static_cast<double>(max_edge) / longest;
    const int w = std::max(1, static_cast<int>(src.width() * scale));
    const int h = std::max(1, static_cast<int>(src.height() * scale));
    Raster out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out.set(x, y, src.at(std::min(src.width() - 1, x * src.width() / w),
                                 std::min(src.height() - 1, y * src.height() / h)));
    return out;
}

class LiveBackend : public ModelBackend {
public:
    explicit LiveBackend(LiveConfig cfg) : cfg_(std::move(cfg)) {
        if (cfg_.base_url.empty()) throw ConfigError("live backend requires a base URL");
        const char* key = std::getenv(cfg_.api_key_env.c_str());
        api_key_ = key ? key : "";
        if (api_key_.empty())
            throw ConfigError("live backend: credentials env var " + cfg_.api_key_env +
                              " is empty or unset");
    }

    ModelReply generate(const std::vector<Message>& history,
                        const std::vector<nlohmann::json>& tools,
                        const GenerationSettings& settings) override {
        validate_history(history);
        const std::string body = build_request(history, tools, settings).dump();
        if (cfg_.verbose)
            std::cerr << "[live] POST " << cfg_.base_url << cfg_.path << " (auth redacted)\n"
                      << body.substr(0, 2000) << "\n";

        std::string last_error;
        for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
            if (attempt > 0)
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(cfg_.retry_base_ms << (attempt - 1)));
            g_connection_attempts.fetch_add(1, std::memory_order_relaxed);
            httplib::Client client(cfg_.base_url);
            client.set_read_timeout(120, 0);
            httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};
            auto res = client.Post(cfg_.path, headers, body, "application/json");
            if (!res) {
                last_error = httplib::to_string(res.error());
                continue;  // transport failure, retryable
            }
            if (res->status == 401 || res->status == 403 || res->status == 429)
                throw QuotaError("provider refused request (HTTP " +
                                 std::to_string(res->status) + "): " + res->body);
            if (res->status >= 500) {
                last_error = "HTTP " + std::to_string(res->status);
                continue;
            }
            if (res->status != 200)
                throw MalformedReplyError(
                    "unexpected HTTP " + std::to_string(res->status), res->body);
            if (cfg_.verbose) std::cerr << "[live] response: " << res->body.substr(0, 2000) << "\n";
            return parse_response(res->body);
        }
        throw TransportError("live backend: transport failed after " +
                             std::to_string(cfg_.max_retries + 1) + " attempts: " + last_error);
    }

    std::string name() const override { return cfg_.model_name; }

private:
    nlohmann::json build_request(const std::vector<Message>& history,
                                 const std::vector<nlohmann::json>& tools,
                                 const GenerationSettings& settings) const {
        nlohmann::json messages = nlohmann::json::array();
        for (const auto& m : history) {
            switch (m.role) {
                case Message::Role::System:
                    messages.push_back({{"role", "system"}, {"content", m.text}});
                    break;
                case Message::Role::User:
                    messages.push_back({{"role", "user"}, {"content", content_parts(m)}});
                    break;
                case Message::Role::Assistant: {
                    nlohmann::json msg{{"role", "assistant"}};
                    msg["content"] = m.text.empty() ? nlohmann::json(nullptr)
                                                    : nlohmann::json(m.text);
                    if (!m.tool_calls.empty()) {
                        nlohmann::json calls = nlohmann::json::array();
                        for (const auto& tc : m.tool_calls)
                            calls.push_back({{"id", tc.call_id},
                                             {"type", "function"},
                                             {"function",
                                              {{"name", tc.tool_name},
                                               {"arguments", tc.arguments.dump()}}}});
                        msg["tool_calls"] = std::move(calls);
                    }
                    messages.push_back(std::move(msg));
                    break;
                }
                case Message::Role::Tool:
                    messages.push_back({{"role", "tool"},
                                        {"tool_call_id", m.tool_result_for},
                                        {"content", m.text}});
                    // Tool messages cannot carry images on this wire shape;
                    // attach them as a follow-up user message.
                    if (!m.images.empty())
                        messages.push_back({{"role", "user"}, {"content", content_parts(m)}});
                    break;
            }
        }
        nlohmann::json wrapped_tools = nlohmann::json::array();
        for (const auto& t : tools)
            wrapped_tools.push_back({{"type", "function"}, {"function", t}});
        return {{"model", settings.model_name.empty() ? cfg_.model_name : settings.model_name},
                {"temperature", settings.temperature},
                {"max_tokens", settings.max_output_tokens},
                {"messages", std::move(messages)},
                {"tools", std::move(wrapped_tools)}};
    }

    nlohmann::json content_parts(const Message& m) const {
        nlohmann::json parts = nlohmann::json::array();
        if (!m.text.empty() && m.role == Message::Role::User)
            parts.push_back({{"type", "text"}, {"text", m.text}});
        for (const auto& img : m.images) {
            std::vector<std::uint8_t> png = img.png;
            if (cfg_.max_image_edge > 0) {
                Raster r = downscale_max_edge(decode_png(png), cfg_.max_image_edge);
                png = encode_png(r);
            }
            parts.push_back({{"type", "text"}, {"text", "resource " + img.id + ":"}});
            parts.push_back({{"type", "image_url"},
                             {"image_url",
                              {{"url", "data:image/png;base64," + base64_encode(png)}}}});
        }
        return parts;
    }

    static ModelReply parse_response(const std::string& body) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(body);
        } catch (const nlohmann::json::exception&) {
            throw MalformedReplyError("response is not JSON", body);
        }
        try {
            const auto& msg = j.at("choices").at(0).at("message");
            ModelReply reply;
            if (msg.contains("tool_calls") && msg["tool_calls"].is_array() &&
                !msg["tool_calls"].empty()) {
                for (const auto& tc : msg["tool_calls"]) {
                    nlohmann::json args;
                    const auto& fn = tc.at("function");
                    try {
                        args = nlohmann::json::parse(fn.at("arguments").get<std::string>());
                    } catch (const nlohmann::json::exception&) {
                        throw MalformedReplyError("tool-call arguments are not JSON", body);
                    }
                    reply.tool_calls.push_back({tc.value("id", "call"),
                                                fn.at("name").get<std::string>(), args});
                }
                return reply;
            }
            if (msg.contains("content") && msg["content"].is_string()) {
                reply.raw_text = msg["content"].get<std::string>();
                return reply;
            }
        } catch (const MalformedReplyError&) {
            throw;
        } catch (const nlohmann::json::exception&) {
        }
        throw MalformedReplyError("response has neither tool calls nor content", body);
    }

    LiveConfig cfg_;
    std::string api_key_;
};

class LiveFactory : public BackendFactory {
public:
    explicit LiveFactory(LiveConfig cfg) : cfg_(std::move(cfg)) {}
    std::unique_ptr<ModelBackend> make(const SampleContext&) override {
        return std::make_unique<LiveBackend>(cfg_);
    }

private:
    LiveConfig cfg_;
};

}  // namespace

std::unique_ptr<ModelBackend> make_live_backend(LiveConfig cfg) {
    return std::make_unique<LiveBackend>(std::move(cfg));
}

std::uint64_t live_connection_attempts() {
    return g_connection_attempts.load(std::memory_order_relaxed);
}

std::unique_ptr<BackendFactory> live_factory(LiveConfig cfg) {
    return std::make_unique<LiveFactory>(std::move(cfg));
}

}  // namespace toolsight
