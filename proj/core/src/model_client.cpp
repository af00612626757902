#include "lifegraph/model_client.hpp"

#include "lifegraph/json_util.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <semaphore>
#include <thread>

namespace lifegraph {

const char* to_string(Role r) {
    switch (r) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "user";
}

void validate_conversation(const Conversation& conversation) {
    if (conversation.empty()) {
        throw std::invalid_argument("complete: empty conversation");
    }
    if (conversation.back().role != Role::User) {
        throw std::invalid_argument("complete: last turn must be a user turn");
    }
    for (const auto& turn : conversation) {
        if (turn.role == Role::Assistant && !turn.media.empty()) {
            throw std::invalid_argument("complete: assistant turns carry no media");
        }
    }
}

MockMatcher contains_all_matcher(std::vector<std::string> needles, std::string response) {
    return {[needles = std::move(needles)](const Conversation& conv) {
                std::string transcript;
                for (const auto& t : conv) {
                    transcript += t.text;
                    transcript += '\n';
                }
                for (const auto& n : needles) {
                    if (transcript.find(n) == std::string::npos) return false;
                }
                return true;
            },
            std::move(response)};
}

ModelResponse ScriptedMock::complete(const Conversation& conversation) {
    validate_conversation(conversation);
    for (const auto& m : matchers_) {
        if (m.predicate(conversation)) return {m.response, std::nullopt};
    }
    if (strict_) {
        throw ModelError("scripted mock: no matcher for conversation (strict mode), last turn: " +
                         conversation.back().text.substr(0, 200));
    }
    return {default_response_, std::nullopt};
}

ScriptedMock ScriptedMock::from_script_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open mock script: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw LoadError("bad mock script " + path + ": " + e.what());
    }
    ScriptedMock mock;
    mock.set_default(doc.value("default", std::string("{}")));
    mock.set_strict(doc.value("strict", false));
    for (const auto& m : doc.value("matchers", nlohmann::json::array())) {
        mock.add(contains_all_matcher(m.at("contains_all").get<std::vector<std::string>>(),
                                      m.at("response").get<std::string>()));
    }
    return mock;
}

// ---------------------------------------------------------------------------

namespace {

std::string base64_encode(std::string_view in) {
    static const char* tbl = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((in.size() + 2) / 3 * 4);
    size_t i = 0;
    for (; i + 2 < in.size(); i += 3) {
        uint32_t v = (uint8_t(in[i]) << 16) | (uint8_t(in[i + 1]) << 8) | uint8_t(in[i + 2]);
        out.push_back(tbl[(v >> 18) & 63]);
        out.push_back(tbl[(v >> 12) & 63]);
        out.push_back(tbl[(v >> 6) & 63]);
        out.push_back(tbl[v & 63]);
    }
    if (i + 1 == in.size()) {
        uint32_t v = uint8_t(in[i]) << 16;
        out.push_back(tbl[(v >> 18) & 63]);
        out.push_back(tbl[(v >> 12) & 63]);
        out += "==";
    } else if (i + 2 == in.size()) {
        uint32_t v = (uint8_t(in[i]) << 16) | (uint8_t(in[i + 1]) << 8);
        out.push_back(tbl[(v >> 18) & 63]);
        out.push_back(tbl[(v >> 12) & 63]);
        out.push_back(tbl[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

}  // namespace

HttpModelConfig HttpModelConfig::from_env() {
    HttpModelConfig cfg;
    if (const char* v = std::getenv("MODEL_BASE_URL")) cfg.base_url = v;
    if (const char* v = std::getenv("MODEL_NAME")) cfg.model_name = v;
    if (const char* v = std::getenv("MODEL_API_KEY")) cfg.api_key = v;
    if (const char* v = std::getenv("MODEL_TIMEOUT_MS")) cfg.timeout_ms = std::atoi(v);
    return cfg;
}

struct HttpChatClient::Impl {
    explicit Impl(const HttpModelConfig& cfg)
        : client(cfg.base_url), slots(cfg.max_parallel > 0 ? cfg.max_parallel : 1) {
        client.set_connection_timeout(0, cfg.timeout_ms * 1000LL);
        client.set_read_timeout(cfg.timeout_ms / 1000, (cfg.timeout_ms % 1000) * 1000);
    }
    httplib::Client client;
    std::counting_semaphore<256> slots;
};

HttpChatClient::HttpChatClient(HttpModelConfig config)
    : config_(std::move(config)), impl_(std::make_unique<Impl>(config_)) {
    if (config_.base_url.empty()) {
        throw ModelError("http client: MODEL_BASE_URL not configured");
    }
}

HttpChatClient::~HttpChatClient() = default;

ModelResponse HttpChatClient::complete(const Conversation& conversation) {
    validate_conversation(conversation);
    long request_id = ++request_counter_;

    nlohmann::json body;
    body["model"] = config_.model_name;
    auto messages = nlohmann::json::array();
    for (const auto& turn : conversation) {
        nlohmann::json msg;
        msg["role"] = to_string(turn.role);
        if (turn.media.empty()) {
            msg["content"] = turn.text;
        } else {
            auto parts = nlohmann::json::array();
            parts.push_back({{"type", "text"}, {"text", turn.text}});
            for (const auto& m : turn.media) {
                parts.push_back({{"type", "media_base64"},
                                 {"media_id", m.media_id},
                                 {"mime", m.mime},
                                 {"data", base64_encode(m.bytes)}});
            }
            msg["content"] = std::move(parts);
        }
        messages.push_back(std::move(msg));
    }
    body["messages"] = std::move(messages);
    std::string payload = body.dump();

    httplib::Headers headers;
    if (!config_.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + config_.api_key);
    }

    impl_->slots.acquire();
    struct Release {
        std::counting_semaphore<256>& s;
        ~Release() { s.release(); }
    } release{impl_->slots};

    int backoff = config_.retry_backoff_ms;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            total_retries_.fetch_add(1);
            std::cerr << "[model] request " << request_id << ": retry " << attempt << "/"
                      << config_.max_retries << " after " << backoff << "ms\n";
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
            backoff *= 2;
        }
        auto res = impl_->client.Post("/v1/chat/completions", headers, payload,
                                      "application/json");
        if (!res) {
            if (attempt == config_.max_retries) {
                throw ModelError("request " + std::to_string(request_id) +
                                 ": transport failure after retries: " +
                                 httplib::to_string(res.error()));
            }
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            if (attempt == config_.max_retries) {
                throw ModelError("request " + std::to_string(request_id) +
                                 ": retryable HTTP " + std::to_string(res->status) +
                                 " persisted after retries");
            }
            continue;
        }
        if (res->status != 200) {
            throw ModelError("request " + std::to_string(request_id) + ": HTTP " +
                             std::to_string(res->status) + ": " + res->body.substr(0, 300));
        }
        auto doc = try_parse_json(res->body);
        if (!doc) {
            throw ModelError("request " + std::to_string(request_id) +
                             ": unparseable response body");
        }
        ModelResponse out;
        try {
            out.text = doc->at("choices").at(0).at("message").value("content", "");
        } catch (const std::exception& e) {
            throw ModelError("request " + std::to_string(request_id) +
                             ": unexpected response shape: " + e.what());
        }
        if (doc->contains("usage")) {
            TokenUsage usage;
            usage.prompt_tokens = (*doc)["usage"].value("prompt_tokens", 0L);
            usage.completion_tokens = (*doc)["usage"].value("completion_tokens", 0L);
            out.usage = usage;
        }
        return out;
    }
    throw ModelError("request " + std::to_string(request_id) + ": unreachable retry exit");
}

}  // namespace lifegraph
