#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "debatekit/debate.hpp"
#include "debatekit/render.hpp"

namespace debatekit {

enum class MemoryKind { full_text, summary, visual };

const char* to_string(MemoryKind kind);

/// Compressed representation of a debate history handed to every agent in a
/// round: text payload for full_text/summary, rendered pages for visual.
struct MemoryContext {
    MemoryKind kind = MemoryKind::full_text;
    std::string text_payload;
    std::vector<RenderedImage> image_pages;
    int context_tokens = 0;
    int source_round = 1;
    bool summary_fallback = false;  // summarizer failed, payload is full text
};

struct StrategyConfig {
    MemoryKind kind = MemoryKind::full_text;
    int render_resolution = 1024;
    int vision_tokens_per_image = 256;
    int max_pages = 8;
    std::string summarizer_prompt =
        "Summarize the debate history below, keeping every agent's current answer, "
        "the key calculations, and any points of disagreement.";
    int summary_max_tokens = 1200;
};

/// Per-image vision token count. The hard-coded table covers
/// {224, 336, 448, 512, 1024, 1536, 2048}; other multiples of 64 fall back to
/// (resolution/64)^2.
int vision_token_count(int resolution);

/// Round-ordered, agent-labelled concatenation of the history
/// ("Round t - Agent i: ..."), as the text prompt expects.
std::string format_history_text(const DebateState& history);

class ChatBackendIface;  // backend.hpp

class CompressionStrategy {
public:
    virtual ~CompressionStrategy() = default;
    virtual MemoryKind kind() const = 0;
    /// Builds the shared per-round context from the current history.
    virtual MemoryContext compress(const DebateState& history) = 0;
    /// Input tokens the compression itself consumed this round (the
    /// summarizer's own request); 0 for pure strategies.
    virtual long long side_channel_tokens() const { return 0; }
};

MemoryContext compress_full_text(const DebateState& history,
                                 const Tokenizer& tokenizer = default_tokenizer());

MemoryContext compress_visual(const DebateState& history, const RenderLayout& layout,
                              const StrategyConfig& config);

class FullTextStrategy final : public CompressionStrategy {
public:
    explicit FullTextStrategy(const Tokenizer& tokenizer = default_tokenizer())
        : tokenizer_(tokenizer) {}
    MemoryKind kind() const override { return MemoryKind::full_text; }
    MemoryContext compress(const DebateState& history) override;

private:
    const Tokenizer& tokenizer_;
};

/// Re-summarizes the full history each round through the backend. On backend
/// failure the round falls back to full text and is flagged in the context.
class SummaryStrategy final : public CompressionStrategy {
public:
    SummaryStrategy(ChatBackendIface& backend, StrategyConfig config,
                    const Tokenizer& tokenizer = default_tokenizer())
        : backend_(backend), config_(std::move(config)), tokenizer_(tokenizer) {}
    MemoryKind kind() const override { return MemoryKind::summary; }
    MemoryContext compress(const DebateState& history) override;
    long long side_channel_tokens() const override { return side_channel_tokens_; }

private:
    ChatBackendIface& backend_;
    StrategyConfig config_;
    const Tokenizer& tokenizer_;
    long long side_channel_tokens_ = 0;
};

class VisualStrategy final : public CompressionStrategy {
public:
    explicit VisualStrategy(StrategyConfig config = {}, RenderLayout layout = {});
    MemoryKind kind() const override { return MemoryKind::visual; }
    MemoryContext compress(const DebateState& history) override;
    const RenderLayout& layout() const { return layout_; }

private:
    StrategyConfig config_;
    RenderLayout layout_;
};

std::unique_ptr<CompressionStrategy> make_strategy(const StrategyConfig& config,
                                                   ChatBackendIface* backend);

}  // namespace debatekit
