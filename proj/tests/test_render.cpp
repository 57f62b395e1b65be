#include <doctest.h>

#include <string>

#include "debatekit/errors.hpp"
#include "debatekit/render.hpp"

using namespace debatekit;

namespace {

DebateState two_round_state() {
    DebateState state(2);
    state = state.advanced({{1, 1, "answer one", 2, 0.0}, {2, 1, "answer two", 2, 0.0}});
    state = state.advanced({{1, 2, "still one", 2, 0.0}, {2, 2, "now one", 2, 0.0}});
    return state;
}

}  // namespace

TEST_CASE("layout arithmetic at the defaults") {
    RenderLayout layout;
    CHECK(layout.line_height() == 14);
    CHECK(layout.chars_per_line() == 165);
    CHECK(layout.lines_per_page() == 70);
    layout.canvas = 1000;  // not a multiple of 64
    CHECK_THROWS_AS(layout.validate(), UsageError);
}

TEST_CASE("wrapping a 1000-character word into an 80-glyph box") {
    RenderLayout layout;
    std::string word(1000, 'x');
    auto lines = wrap_text(word, 80 * layout.glyph_advance(), layout);
    CHECK(lines.size() == 13);  // ceil(1000 / 80)
    for (std::size_t i = 0; i + 1 < lines.size(); ++i) CHECK(lines[i].size() == 80);
    CHECK(lines.back().size() == 1000 - 12 * 80);
}

TEST_CASE("word wrap prefers breaking at spaces") {
    RenderLayout layout;
    auto lines = wrap_text("alpha beta gamma", 6 * layout.glyph_advance(), layout);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "alpha");
    CHECK(lines[1] == "beta");
    CHECK(lines[2] == "gamma");
}

TEST_CASE("line model structure: colored headers, bodies, round dividers") {
    RenderLayout layout;
    auto lines = line_model(two_round_state(), layout);
    int headers = 0, dividers = 0;
    for (const auto& line : lines) {
        if (line.kind == RenderLine::Kind::header) {
            ++headers;
            CHECK(line.text.rfind("Agent ", 0) == 0);
        }
        if (line.kind == RenderLine::Kind::divider) ++dividers;
    }
    CHECK(headers == 4);   // one per response
    CHECK(dividers == 1);  // between round 1 and round 2

    // headers carry the per-agent palette color
    for (const auto& line : lines)
        if (line.kind == RenderLine::Kind::header) {
            int agent = line.text[6] - '0';
            CHECK(line.color == agent_color(agent));
        }
}

TEST_CASE("palette cycles over eight distinct colors") {
    const auto& palette = agent_palette();
    for (std::size_t i = 0; i < palette.size(); ++i)
        for (std::size_t j = i + 1; j < palette.size(); ++j) CHECK_FALSE(palette[i] == palette[j]);
    CHECK(agent_color(1) == agent_color(9));
}

TEST_CASE("rendering is a pure function of history and layout") {
    RenderLayout layout;
    DebateState state = two_round_state();
    auto a = render_history(state, layout);
    auto b = render_history(state, layout);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(image_digest(a[i]) == image_digest(b[i]));
    CHECK(count_pages(state, layout) == static_cast<int>(a.size()));
}

TEST_CASE("frozen raster digests") {
    RenderLayout layout;
    auto empty = render_history(DebateState(2), layout);
    REQUIRE(empty.size() == 1);
    CHECK(image_digest(empty[0]) ==
          "0d059402214fc796b0c30e7aec8218c171acb823c77516bf847629f8b494185c");

    auto pages = render_history(two_round_state(), layout);
    REQUIRE(pages.size() == 1);
    CHECK(image_digest(pages[0]) ==
          "4a2abbbd3bf0cf136e2dbfe572e08c81a56dcabd3981b83232c83f56391fb3e3");

    RenderLayout small = layout;
    small.canvas = 512;
    auto half = render_history(two_round_state(), small);
    REQUIRE(half.size() == 1);
    CHECK(image_digest(half[0]) ==
          "e6c17a93d95ab3b03b225a19ebff77d121bc308c6ed610bfa368bad9067fcd59");
}

TEST_CASE("png encoding is bit-reproducible") {
    RenderLayout layout;
    auto pages = render_history(two_round_state(), layout);
    auto a = encode_png(pages[0]);
    auto b = encode_png(pages[0]);
    CHECK(a == b);
    CHECK(sha256_hex(a.data(), a.size()) ==
          "a62c74af66ad97d4614143c51ca5438fc2f22da6fc723f2c001c7361779e2f51");
    // PNG signature
    REQUIRE(a.size() > 8);
    CHECK(a[0] == 0x89);
    CHECK(a[1] == 'P');
    CHECK(a[2] == 'N');
    CHECK(a[3] == 'G');
}

TEST_CASE("sha256 known vectors") {
    CHECK(sha256_hex(nullptr, 0) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    const char* abc = "abc";
    CHECK(sha256_hex(reinterpret_cast<const std::uint8_t*>(abc), 3) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("page overflow raises with the required page count") {
    RenderLayout layout;
    layout.max_pages = 1;
    DebateState state(1);
    std::string wall(200000, 'y');
    state = state.advanced({{1, 1, wall, 0, 0.0}});
    try {
        render_history(state, layout);
        FAIL("expected overflow");
    } catch (const RenderOverflowError& e) {
        CHECK(e.required_pages > 1);
    }
}
