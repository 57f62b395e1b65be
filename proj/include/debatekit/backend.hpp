#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "debatekit/debate.hpp"
#include "debatekit/memory.hpp"

namespace debatekit {

struct TextPart {
    std::string text;
};
struct ImagePart {
    std::string media_type;       // e.g. "image/png"
    std::string base64_data;
};
using ContentPart = std::variant<TextPart, ImagePart>;

struct ChatMessage {
    std::string role;  // "system" | "user" | "assistant"
    std::vector<ContentPart> content;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    int max_tokens = 1024;
    double temperature = 0.0;

    // Routing metadata for the scripted mock; ignored on the wire.
    std::string query_id;
    int agent_index = 0;
    int round = 0;

    void validate() const;
    /// Concatenated text parts across all messages.
    std::string joined_text() const;
    int image_part_count() const;
};

struct ChatResponse {
    std::string text;
    int prompt_tokens = 0;
    int completion_tokens = 0;
    double latency_ms = 0.0;
};

class ChatBackendIface {
public:
    virtual ~ChatBackendIface() = default;
    virtual ChatResponse chat(const ChatRequest& request) = 0;
};

/// Chat-completions wire body: messages[].content arrays of
/// {type:"text"|"image_url"} parts, images as data URIs.
std::string serialize_chat_body(const ChatRequest& request);

struct EndpointConfig {
    std::string base_url;       // e.g. "http://localhost:8080"
    std::string path = "/v1/chat/completions";
    std::string api_key;        // sent as Bearer token when non-empty
    int max_attempts = 3;
    int backoff_initial_ms = 500;
    int timeout_seconds = 120;

    /// Reads DEBATEKIT_ENDPOINT / DEBATEKIT_API_KEY.
    static EndpointConfig from_env();
};

/// OpenAI-compatible HTTP client with retry + exponential backoff.
/// Context-length rejections surface as ContextLengthError.
class HttpBackend final : public ChatBackendIface {
public:
    explicit HttpBackend(EndpointConfig config) : config_(std::move(config)) {}
    ChatResponse chat(const ChatRequest& request) override;

private:
    EndpointConfig config_;
};

/// Deterministic scripted backend keyed by (query_id, agent_index, round).
/// Lookup is total: misses fall back to default_response.
class MockScript {
public:
    struct Entry {
        std::string text;
        double latency_ms = 0.0;
    };

    void set(const std::string& query_id, int agent, int round, std::string text,
             double latency_ms = 0.0);
    void set_default(std::string text) { default_response_ = Entry{std::move(text), 0.0}; }
    const Entry& lookup(const std::string& query_id, int agent, int round) const;

    /// Loads a JSON object keyed "query_id/agent/round" -> text or
    /// {text, latency_ms}; the optional "default" key sets the fallback.
    static MockScript load(const std::string& path);

private:
    std::map<std::tuple<std::string, int, int>, Entry> entries_;
    Entry default_response_{std::string{}, 0.0};
};

class MockBackend final : public ChatBackendIface {
public:
    explicit MockBackend(MockScript script, const Tokenizer& tokenizer = default_tokenizer(),
                         int tokens_per_image = 256)
        : script_(std::move(script)), tokenizer_(tokenizer), tokens_per_image_(tokens_per_image) {}

    ChatResponse chat(const ChatRequest& request) override;

    /// Simulated context window; 0 disables the limit. Requests whose prompt
    /// tokens exceed it raise ContextLengthError, like a real endpoint.
    void set_context_limit(int tokens) { context_limit_ = tokens; }

private:
    MockScript script_;
    const Tokenizer& tokenizer_;
    int tokens_per_image_;
    int context_limit_ = 0;
};

enum class PromptTemplate { vision, text, summary };

/// Builds the round prompt for one agent from the query and the compressed
/// context, with image pages attached in page order for the vision template.
ChatRequest build_prompt(PromptTemplate tmpl, const Query& query, const MemoryContext& context,
                         int num_agents);

std::string base64_encode(const std::uint8_t* data, std::size_t len);

}  // namespace debatekit
