#include "debatekit/render.hpp"

#include <algorithm>
#include <sstream>

#include "debatekit/errors.hpp"

namespace debatekit {

void RenderLayout::validate() const {
    if (canvas < 64 || canvas % 64 != 0) throw UsageError("canvas must be a positive multiple of 64");
    if (line_spacing < 1.0) throw UsageError("line_spacing must be >= 1.0");
    if (font_size < 8) throw UsageError("font_size too small for the embedded glyph cell");
    if (margin < 0 || 2 * margin >= canvas) throw UsageError("margin out of range");
    if (max_pages < 1) throw UsageError("max_pages must be >= 1");
}

const std::array<Rgb, 8>& agent_palette() {
    // Okabe-Ito palette: distinguishable under common color-vision deficiencies.
    static const std::array<Rgb, 8> palette = {{
        {230, 159, 0},    // orange
        {86, 180, 233},   // sky blue
        {0, 158, 115},    // bluish green
        {240, 228, 66},   // yellow
        {0, 114, 178},    // blue
        {213, 94, 0},     // vermillion
        {204, 121, 167},  // reddish purple
        {0, 0, 0},        // black
    }};
    return palette;
}

Rgb agent_color(int agent_index) {
    return agent_palette()[static_cast<std::size_t>((agent_index - 1) % 8 + 8) % 8];
}

std::vector<std::string> wrap_text(std::string_view text, int box_width_px,
                                   const RenderLayout& layout) {
    const int advance = layout.glyph_advance();
    if (box_width_px < advance) throw UsageError("wrap_text: box narrower than one glyph");
    const std::size_t max_chars = static_cast<std::size_t>(box_width_px / advance);

    std::vector<std::string> lines;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            lines.push_back(current);
            current.clear();
        }
    };

    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '\n') {
            flush();
            ++i;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            if (!current.empty() && current.size() < max_chars) current.push_back(' ');
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && text[j] != ' ' && text[j] != '\t' && text[j] != '\n' &&
               text[j] != '\r')
            ++j;
        std::string_view word = text.substr(i, j - i);
        i = j;

        if (current.size() + word.size() > max_chars) {
            // drop a trailing pad space before deciding
            if (!current.empty() && current.back() == ' ') current.pop_back();
            if (current.size() + (current.empty() ? 0 : 1) + word.size() > max_chars) flush();
        }
        while (word.size() > max_chars) {  // hard-split over-wide words
            flush();
            lines.emplace_back(word.substr(0, max_chars));
            word.remove_prefix(max_chars);
        }
        if (!word.empty()) current += std::string(word);
    }
    flush();
    for (auto& line : lines)
        while (!line.empty() && line.back() == ' ') line.pop_back();
    return lines;
}

std::vector<RenderLine> line_model(const DebateState& history, const RenderLayout& layout) {
    std::vector<RenderLine> lines;
    const int body_width = layout.usable_width();
    bool first_round = true;
    for (const auto& responses : history.rounds()) {
        if (!first_round) lines.push_back({RenderLine::Kind::divider, {}, layout.divider_color});
        first_round = false;
        for (const auto& resp : responses) {
            std::ostringstream header;
            header << "Agent " << resp.agent_index << ":";
            lines.push_back({RenderLine::Kind::header, header.str(), agent_color(resp.agent_index)});
            for (auto& body : wrap_text(resp.text, body_width, layout))
                lines.push_back({RenderLine::Kind::body, std::move(body), layout.body_color});
        }
    }
    return lines;
}

namespace {

void put_pixel(RenderedImage& img, int x, int y, Rgb c) {
    std::size_t idx = (std::size_t(y) * img.resolution + x) * 3;
    img.pixels[idx] = c.r;
    img.pixels[idx + 1] = c.g;
    img.pixels[idx + 2] = c.b;
}

void draw_glyph(RenderedImage& img, int x, int y, char ch, Rgb color) {
    const std::uint8_t* rows = font5x7::glyph(ch);
    for (int gy = 0; gy < 7; ++gy) {
        std::uint8_t bits = rows[gy];
        for (int gx = 0; gx < 5; ++gx)
            if (bits & (1 << (4 - gx))) put_pixel(img, x + gx, y + gy, color);
    }
}

void draw_text(RenderedImage& img, int x, int y, const std::string& text, Rgb color,
               int advance) {
    for (std::size_t i = 0; i < text.size(); ++i)
        draw_glyph(img, x + static_cast<int>(i) * advance, y, text[i], color);
}

RenderedImage blank_page(const RenderLayout& layout, int page_index) {
    RenderedImage img;
    img.resolution = layout.canvas;
    img.page_index = page_index;
    img.pixels.assign(std::size_t(layout.canvas) * layout.canvas * 3, 0);
    for (int y = 0; y < layout.canvas; ++y)
        for (int x = 0; x < layout.canvas; ++x) put_pixel(img, x, y, layout.background);
    return img;
}

}  // namespace

int count_pages(const DebateState& history, const RenderLayout& layout) {
    layout.validate();
    if (history.response_count() == 0) return 1;
    auto lines = line_model(history, layout);
    int per_page = layout.lines_per_page();
    return static_cast<int>((lines.size() + per_page - 1) / per_page);
}

std::vector<RenderedImage> render_history(const DebateState& history,
                                          const RenderLayout& layout) {
    layout.validate();
    std::vector<RenderedImage> pages;
    if (history.response_count() == 0) {
        pages.push_back(blank_page(layout, 0));
        return pages;
    }

    auto lines = line_model(history, layout);
    const int per_page = layout.lines_per_page();
    const int needed = static_cast<int>((lines.size() + per_page - 1) / per_page);
    if (needed > layout.max_pages)
        throw RenderOverflowError("history needs " + std::to_string(needed) +
                                      " pages but layout allows " +
                                      std::to_string(layout.max_pages),
                                  needed);

    const int lh = layout.line_height();
    const int glyph_y_offset = std::max(0, (layout.font_size - 7) / 2);
    for (int p = 0; p < needed; ++p) {
        RenderedImage img = blank_page(layout, p);
        for (int slot = 0; slot < per_page; ++slot) {
            std::size_t idx = std::size_t(p) * per_page + slot;
            if (idx >= lines.size()) break;
            const RenderLine& line = lines[idx];
            int y = layout.margin + slot * lh;
            if (line.kind == RenderLine::Kind::divider) {
                int ry = y + lh / 2;
                for (int x = layout.margin; x < layout.canvas - layout.margin; ++x)
                    put_pixel(img, x, ry, line.color);
            } else {
                draw_text(img, layout.margin, y + glyph_y_offset, line.text, line.color,
                          layout.glyph_advance());
            }
        }
        pages.push_back(std::move(img));
    }
    return pages;
}

std::string image_digest(const RenderedImage& image) {
    std::string header = std::to_string(image.resolution) + "x" +
                         std::to_string(image.resolution) + "\n";
    std::vector<std::uint8_t> buf(header.begin(), header.end());
    buf.insert(buf.end(), image.pixels.begin(), image.pixels.end());
    return sha256_hex(buf.data(), buf.size());
}

}  // namespace debatekit
