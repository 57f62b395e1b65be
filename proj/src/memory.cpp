#include "debatekit/memory.hpp"

#include <sstream>

#include "debatekit/backend.hpp"
#include "debatekit/errors.hpp"

namespace debatekit {

const char* to_string(MemoryKind kind) {
    switch (kind) {
        case MemoryKind::full_text:
            return "text";
        case MemoryKind::summary:
            return "summary";
        case MemoryKind::visual:
            return "visual";
    }
    return "?";
}

int vision_token_count(int resolution) {
    // Measured per-image token counts for the supported resolutions; 224 and
    // 336 break the (res/64)^2 rule and are pinned explicitly.
    switch (resolution) {
        case 224:
            return 16;
        case 336:
            return 36;
        case 448:
            return 49;
        case 512:
            return 64;
        case 1024:
            return 256;
        case 1536:
            return 576;
        case 2048:
            return 1024;
        default:
            break;
    }
    if (resolution > 0 && resolution % 64 == 0) {
        int g = resolution / 64;
        return g * g;
    }
    throw UsageError(
        "unsupported render resolution " + std::to_string(resolution) +
        "; supported: 224, 336, 448, 512, 1024, 1536, 2048, or any multiple of 64");
}

std::string format_history_text(const DebateState& history) {
    std::ostringstream out;
    int round = 1;
    for (const auto& responses : history.rounds()) {
        for (const auto& resp : responses) {
            out << "Round " << round << " - Agent " << resp.agent_index << ": " << resp.text
                << "\n";
        }
        ++round;
    }
    return out.str();
}

MemoryContext compress_full_text(const DebateState& history, const Tokenizer& tokenizer) {
    MemoryContext ctx;
    ctx.kind = MemoryKind::full_text;
    ctx.text_payload = format_history_text(history);
    ctx.context_tokens = tokenizer.count(ctx.text_payload);
    ctx.source_round = history.current_round();
    return ctx;
}

MemoryContext compress_visual(const DebateState& history, const RenderLayout& layout,
                              const StrategyConfig& config) {
    MemoryContext ctx;
    ctx.kind = MemoryKind::visual;
    ctx.source_round = history.current_round();
    if (history.response_count() == 0) return ctx;  // zero pages, zero tokens

    ctx.image_pages = render_history(history, layout);
    const int per_image = vision_token_count(layout.canvas);
    ctx.context_tokens = static_cast<int>(ctx.image_pages.size()) * per_image;
    return ctx;
}

MemoryContext FullTextStrategy::compress(const DebateState& history) {
    return compress_full_text(history, tokenizer_);
}

MemoryContext SummaryStrategy::compress(const DebateState& history) {
    side_channel_tokens_ = 0;
    MemoryContext ctx;
    ctx.kind = MemoryKind::summary;
    ctx.source_round = history.current_round();
    if (history.response_count() == 0) return ctx;  // no backend call for an empty history

    std::string full = format_history_text(history);
    ChatRequest request;
    request.max_tokens = config_.summary_max_tokens;
    request.messages.push_back(
        {"user", {TextPart{config_.summarizer_prompt + "\n\n" + full}}});
    request.query_id = "__summarize__";
    request.round = history.current_round();

    try {
        ChatResponse reply = backend_.chat(request);
        ctx.text_payload = reply.text;
        ctx.context_tokens = tokenizer_.count(ctx.text_payload);
        side_channel_tokens_ = reply.prompt_tokens;
    } catch (const BackendError&) {
        ctx.text_payload = std::move(full);
        ctx.context_tokens = tokenizer_.count(ctx.text_payload);
        ctx.summary_fallback = true;
    }
    return ctx;
}

VisualStrategy::VisualStrategy(StrategyConfig config, RenderLayout layout)
    : config_(std::move(config)), layout_(layout) {
    layout_.canvas = config_.render_resolution;
    layout_.max_pages = config_.max_pages;
    layout_.validate();
    // Keep the declared per-image charge consistent with the resolution.
    config_.vision_tokens_per_image = vision_token_count(config_.render_resolution);
}

MemoryContext VisualStrategy::compress(const DebateState& history) {
    return compress_visual(history, layout_, config_);
}

std::unique_ptr<CompressionStrategy> make_strategy(const StrategyConfig& config,
                                                   ChatBackendIface* backend) {
    switch (config.kind) {
        case MemoryKind::full_text:
            return std::make_unique<FullTextStrategy>();
        case MemoryKind::summary:
            if (!backend) throw UsageError("summary strategy needs a backend");
            return std::make_unique<SummaryStrategy>(*backend, config);
        case MemoryKind::visual:
            return std::make_unique<VisualStrategy>(config);
    }
    throw UsageError("unknown strategy kind");
}

}  // namespace debatekit
