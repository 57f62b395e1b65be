#include "debatekit/backend.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "debatekit/errors.hpp"

// httplib pulls in a lot; keep it out of the public headers.
#include <httplib.h>

namespace debatekit {

using nlohmann::json;

void ChatRequest::validate() const {
    if (messages.empty()) throw UsageError("chat request needs at least one message");
    for (const auto& msg : messages) {
        if (msg.role != "user") {
            for (const auto& part : msg.content)
                if (std::holds_alternative<ImagePart>(part))
                    throw UsageError("image parts are only allowed in user messages");
        }
    }
}

std::string ChatRequest::joined_text() const {
    std::string out;
    for (const auto& msg : messages)
        for (const auto& part : msg.content)
            if (const auto* text = std::get_if<TextPart>(&part)) {
                if (!out.empty()) out.push_back('\n');
                out += text->text;
            }
    return out;
}

int ChatRequest::image_part_count() const {
    int n = 0;
    for (const auto& msg : messages)
        for (const auto& part : msg.content)
            if (std::holds_alternative<ImagePart>(part)) ++n;
    return n;
}

std::string base64_encode(const std::uint8_t* data, std::size_t len) {
    static const char* alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((len + 2) / 3 * 4);
    for (std::size_t i = 0; i < len; i += 3) {
        std::uint32_t chunk = std::uint32_t(data[i]) << 16;
        if (i + 1 < len) chunk |= std::uint32_t(data[i + 1]) << 8;
        if (i + 2 < len) chunk |= std::uint32_t(data[i + 2]);
        out.push_back(alphabet[(chunk >> 18) & 0x3f]);
        out.push_back(alphabet[(chunk >> 12) & 0x3f]);
        out.push_back(i + 1 < len ? alphabet[(chunk >> 6) & 0x3f] : '=');
        out.push_back(i + 2 < len ? alphabet[chunk & 0x3f] : '=');
    }
    return out;
}

std::string serialize_chat_body(const ChatRequest& request) {
    request.validate();
    json body;
    body["model"] = request.model;
    body["max_tokens"] = request.max_tokens;
    body["temperature"] = request.temperature;
    json messages = json::array();
    for (const auto& msg : request.messages) {
        json parts = json::array();
        for (const auto& part : msg.content) {
            if (const auto* text = std::get_if<TextPart>(&part)) {
                parts.push_back({{"type", "text"}, {"text", text->text}});
            } else {
                const auto& img = std::get<ImagePart>(part);
                parts.push_back(
                    {{"type", "image_url"},
                     {"image_url",
                      {{"url", "data:" + img.media_type + ";base64," + img.base64_data}}}});
            }
        }
        messages.push_back({{"role", msg.role}, {"content", std::move(parts)}});
    }
    body["messages"] = std::move(messages);
    return body.dump();
}

EndpointConfig EndpointConfig::from_env() {
    EndpointConfig config;
    if (const char* url = std::getenv("DEBATEKIT_ENDPOINT")) config.base_url = url;
    if (const char* key = std::getenv("DEBATEKIT_API_KEY")) config.api_key = key;
    return config;
}

ChatResponse HttpBackend::chat(const ChatRequest& request) {
    if (config_.base_url.empty()) throw UsageError("endpoint URL not configured");
    const std::string body = serialize_chat_body(request);

    httplib::Client client(config_.base_url);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!config_.api_key.empty())
        headers.emplace("Authorization", "Bearer " + config_.api_key);

    std::string last_error;
    int backoff_ms = config_.backoff_initial_ms;
    for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
        auto start = std::chrono::steady_clock::now();
        auto result = client.Post(config_.path, headers, body, "application/json");
        auto elapsed = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
        if (result) {
            if (result->status == 401 || result->status == 403)
                throw AuthError("authentication failed (HTTP " +
                                std::to_string(result->status) + ")");
            if (result->status == 400 &&
                result->body.find("context_length_exceeded") != std::string::npos)
                throw ContextLengthError("context length exceeded: " + result->body);
            if (result->status >= 200 && result->status < 300) {
                json parsed = json::parse(result->body);
                ChatResponse response;
                response.text =
                    parsed.at("choices").at(0).at("message").at("content").get<std::string>();
                if (parsed.contains("usage")) {
                    response.prompt_tokens = parsed["usage"].value("prompt_tokens", 0);
                    response.completion_tokens = parsed["usage"].value("completion_tokens", 0);
                }
                response.latency_ms = elapsed;
                return response;
            }
            last_error = "HTTP " + std::to_string(result->status) + ": " + result->body;
        } else {
            last_error = httplib::to_string(result.error());
        }
        if (attempt < config_.max_attempts) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
            backoff_ms *= 2;
        }
    }
    throw BackendError("chat request failed after " + std::to_string(config_.max_attempts) +
                       " attempts: " + last_error);
}

void MockScript::set(const std::string& query_id, int agent, int round, std::string text,
                     double latency_ms) {
    entries_[{query_id, agent, round}] = Entry{std::move(text), latency_ms};
}

const MockScript::Entry& MockScript::lookup(const std::string& query_id, int agent,
                                            int round) const {
    auto it = entries_.find({query_id, agent, round});
    return it == entries_.end() ? default_response_ : it->second;
}

MockScript MockScript::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open mock script: " + path);
    json doc = json::parse(in);
    MockScript script;
    for (const auto& [key, value] : doc.items()) {
        std::string text;
        double latency = 0.0;
        if (value.is_string()) {
            text = value.get<std::string>();
        } else {
            text = value.value("text", "");
            latency = value.value("latency_ms", 0.0);
        }
        if (key == "default") {
            script.default_response_ = Entry{std::move(text), latency};
            continue;
        }
        std::istringstream parts(key);
        std::string query_id, agent_str, round_str;
        if (!std::getline(parts, query_id, '/') || !std::getline(parts, agent_str, '/') ||
            !std::getline(parts, round_str))
            throw UsageError("mock script key must be query_id/agent/round: " + key);
        script.set(query_id, std::stoi(agent_str), std::stoi(round_str), std::move(text),
                   latency);
    }
    return script;
}

ChatResponse MockBackend::chat(const ChatRequest& request) {
    request.validate();
    const std::string prompt_text = request.joined_text();
    const int prompt_tokens =
        tokenizer_.count(prompt_text) + tokens_per_image_ * request.image_part_count();
    if (context_limit_ > 0 && prompt_tokens > context_limit_)
        throw ContextLengthError("mock context limit " + std::to_string(context_limit_) +
                                 " exceeded by prompt of " + std::to_string(prompt_tokens) +
                                 " tokens (context_length_exceeded)");

    const auto& entry = script_.lookup(request.query_id, request.agent_index, request.round);
    ChatResponse response;
    response.text = entry.text;
    response.prompt_tokens = prompt_tokens;
    response.completion_tokens = tokenizer_.count(entry.text);
    response.latency_ms = entry.latency_ms;
    return response;
}

namespace {

std::string problem_and_instructions_text(const Query& query) {
    return "Problem: " + query.text +
           "\n\nInstruction:\n"
           "1. Critically analyze the previous solutions (if any).\n"
           "2. Solve the problem step-by-step.\n"
           "3. Put your final answer in \\boxed{}.";
}

std::string problem_and_instructions_vision(const Query& query, int num_agents) {
    return "Problem: " + query.text +
           "\n\nInstruction:\n"
           "1. The image shows solutions from " +
           std::to_string(num_agents) +
           " agents in an optimized Grid Layout.\n"
           "2. Note the 'Agent I: X' in each agent's header.\n"
           "3. Quote the specific line or calculation from the image that contains an error "
           "(if any).\n"
           "4. Explain why it is wrong and correct it.\n"
           "5. Then solve the problem yourself step-by-step.\n"
           "6. Provide your final numerical answer in \\boxed{number}.";
}

}  // namespace

ChatRequest build_prompt(PromptTemplate tmpl, const Query& query, const MemoryContext& context,
                         int num_agents) {
    const bool match = (tmpl == PromptTemplate::text && context.kind == MemoryKind::full_text) ||
                       (tmpl == PromptTemplate::summary && context.kind == MemoryKind::summary) ||
                       (tmpl == PromptTemplate::vision && context.kind == MemoryKind::visual);
    if (!match) throw UsageError("prompt template does not match memory context kind");

    ChatRequest request;
    ChatMessage user{"user", {}};
    switch (tmpl) {
        case PromptTemplate::text: {
            std::string text = "Here are the solutions from previous rounds:\n" +
                               context.text_payload + "\n" +
                               problem_and_instructions_text(query);
            user.content.push_back(TextPart{std::move(text)});
            break;
        }
        case PromptTemplate::summary: {
            std::string text = "Here is a summary of previous rounds:\n" +
                               context.text_payload + "\n" +
                               problem_and_instructions_text(query);
            user.content.push_back(TextPart{std::move(text)});
            break;
        }
        case PromptTemplate::vision: {
            user.content.push_back(TextPart{"Read the debate history in the image carefully."});
            for (const auto& page : context.image_pages) {
                auto png = encode_png(page);
                user.content.push_back(
                    ImagePart{"image/png", base64_encode(png.data(), png.size())});
            }
            user.content.push_back(TextPart{problem_and_instructions_vision(query, num_agents)});
            break;
        }
    }
    request.messages.push_back(std::move(user));
    return request;
}

}  // namespace debatekit
