#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "debatekit/debate.hpp"

namespace debatekit {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb&) const = default;
};

/// Layout constants for the rasterizer. The embedded 5x7 bitmap font sits in
/// a 6x12 pixel cell (advance 6, line height = 12 * line_spacing).
struct RenderLayout {
    int canvas = 1024;          // square, multiple of 64
    int font_size = 12;         // glyph cell height in pixels
    double line_spacing = 1.2;
    int margin = 16;
    int max_pages = 8;
    Rgb background{255, 255, 255};
    Rgb body_color{0, 0, 0};
    Rgb divider_color{96, 96, 96};

    void validate() const;

    int glyph_advance() const { return 6; }
    int line_height() const { return static_cast<int>(font_size * line_spacing); }
    int usable_width() const { return canvas - 2 * margin; }
    int chars_per_line() const { return usable_width() / glyph_advance(); }
    int lines_per_page() const { return (canvas - 2 * margin) / line_height(); }
};

/// Colorblind-safe palette indexed by (agent_index - 1) mod 8.
const std::array<Rgb, 8>& agent_palette();
Rgb agent_color(int agent_index);

struct RenderedImage {
    int resolution = 0;
    int page_index = 0;
    std::vector<std::uint8_t> pixels;  // row-major RGB

    std::size_t byte_size() const { return pixels.size(); }
};

/// Greedy word wrap by glyph advances; over-wide words are hard-split.
std::vector<std::string> wrap_text(std::string_view text, int box_width_px,
                                   const RenderLayout& layout);

/// One rendered text slot. The raster is fully determined by this sequence
/// plus the layout constants, which is what the structural tests check.
struct RenderLine {
    enum class Kind { header, body, divider } kind;
    std::string text;
    Rgb color;
};

std::vector<RenderLine> line_model(const DebateState& history, const RenderLayout& layout);

/// Rasterizes a debate history: per response an "Agent i:" header in the
/// agent's color followed by the wrapped body, and a full-width divider
/// between rounds. Pure function of (history, layout); an empty history
/// yields a single background-only page.
std::vector<RenderedImage> render_history(const DebateState& history,
                                          const RenderLayout& layout);

/// Page count render_history would produce, via the same line arithmetic.
int count_pages(const DebateState& history, const RenderLayout& layout);

/// SHA-256 over "WxH\n" + raw pixel bytes, hex encoded.
std::string image_digest(const RenderedImage& image);

/// Deterministic PNG encoding (fixed filter, stored deflate blocks), so the
/// encoded file is bit-reproducible, not only the raster.
std::vector<std::uint8_t> encode_png(const RenderedImage& image);
void write_png(const RenderedImage& image, const std::string& path);

std::string sha256_hex(const std::uint8_t* data, std::size_t len);

namespace font5x7 {
/// Row bitmaps for ASCII 32..126, 7 rows per glyph, bit 4 = leftmost column.
/// Unknown code points render as a replacement box.
const std::uint8_t* glyph(char c);
extern const std::uint8_t kReplacement[7];
}  // namespace font5x7

}  // namespace debatekit
