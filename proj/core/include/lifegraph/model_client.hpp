#pragma once
// Abstract multimodal chat interface with two backends: a real HTTP
// chat-completions client and a deterministic scripted mock used by every
// test suite. Other modules depend only on ModelClient.

#include "lifegraph/errors.hpp"

#include <atomic>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lifegraph {

enum class Role { System, User, Assistant };

const char* to_string(Role r);

struct MediaPayload {
    std::string media_id;
    std::string mime;   // "image/jpeg", "text/plain", ...
    std::string bytes;  // raw content; base64-encoded on the wire
};

struct ChatTurn {
    Role role = Role::User;
    std::string text;
    std::vector<MediaPayload> media;  // assistant turns must carry none
};

struct TokenUsage {
    long prompt_tokens = 0;
    long completion_tokens = 0;
};

struct ModelResponse {
    std::string text;  // present even when empty
    std::optional<TokenUsage> usage;
};

using Conversation = std::vector<ChatTurn>;

// Throws std::invalid_argument on contract violations (empty conversation,
// last turn not user, media on an assistant turn).
void validate_conversation(const Conversation& conversation);

class ModelClient {
public:
    virtual ~ModelClient() = default;
    virtual ModelResponse complete(const Conversation& conversation) = 0;
};

// ---------------------------------------------------------------------------
// Scripted mock: an ordered list of (predicate over transcript -> canned
// response) plus a fallback. Pure function of the input conversation.

struct MockMatcher {
    std::function<bool(const Conversation&)> predicate;
    std::string response;
};

// Predicate matching when every needle occurs somewhere in the concatenated
// turn texts.
MockMatcher contains_all_matcher(std::vector<std::string> needles, std::string response);

class ScriptedMock : public ModelClient {
public:
    ScriptedMock() = default;
    explicit ScriptedMock(std::string default_response)
        : default_response_(std::move(default_response)) {}

    void add(MockMatcher matcher) { matchers_.push_back(std::move(matcher)); }
    void set_default(std::string response) { default_response_ = std::move(response); }
    // In strict mode an unmatched conversation throws instead of falling back.
    void set_strict(bool strict) { strict_ = strict; }

    ModelResponse complete(const Conversation& conversation) override;

    // Script file schema:
    //   {"strict": false, "default": "...",
    //    "matchers": [{"contains_all": ["a","b"], "response": "..."}]}
    static ScriptedMock from_script_file(const std::string& path);

private:
    std::vector<MockMatcher> matchers_;
    std::string default_response_ = "{}";
    bool strict_ = false;
};

// Test helper backend: computes the response from the conversation.
class CallbackClient : public ModelClient {
public:
    explicit CallbackClient(std::function<std::string(const Conversation&)> fn)
        : fn_(std::move(fn)) {}
    ModelResponse complete(const Conversation& conversation) override {
        validate_conversation(conversation);
        return {fn_(conversation), std::nullopt};
    }

private:
    std::function<std::string(const Conversation&)> fn_;
};

// ---------------------------------------------------------------------------
// HTTP backend: single JSON chat-completions-style POST endpoint.

struct HttpModelConfig {
    std::string base_url;  // e.g. http://localhost:8080
    std::string model_name;
    std::string api_key;
    int timeout_ms = 30000;
    int max_retries = 3;        // transient failures: timeout, 429, 5xx
    int retry_backoff_ms = 200;  // doubled per attempt
    int max_parallel = 4;

    // MODEL_BASE_URL, MODEL_NAME, MODEL_API_KEY, MODEL_TIMEOUT_MS
    static HttpModelConfig from_env();
};

class HttpChatClient : public ModelClient {
public:
    explicit HttpChatClient(HttpModelConfig config);
    ~HttpChatClient() override;

    ModelResponse complete(const Conversation& conversation) override;

    long total_retries() const { return total_retries_.load(); }

private:
    HttpModelConfig config_;
    std::atomic<long> total_retries_{0};
    std::atomic<long> request_counter_{0};
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace lifegraph
