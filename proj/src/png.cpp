#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "debatekit/errors.hpp"
#include "debatekit/render.hpp"

namespace debatekit {

namespace {

std::uint32_t crc32(const std::uint8_t* data, std::size_t len, std::uint32_t crc = 0) {
    static std::uint32_t table[256];
    static bool init = false;
    if (!init) {
        for (std::uint32_t n = 0; n < 256; ++n) {
            std::uint32_t c = n;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
            table[n] = c;
        }
        init = true;
    }
    crc ^= 0xffffffffu;
    for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xff] ^ (crc >> 8);
    return crc ^ 0xffffffffu;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(std::uint8_t(v >> 24));
    out.push_back(std::uint8_t(v >> 16));
    out.push_back(std::uint8_t(v >> 8));
    out.push_back(std::uint8_t(v));
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[4],
               const std::vector<std::uint8_t>& payload) {
    put_u32(out, std::uint32_t(payload.size()));
    std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    put_u32(out, crc32(out.data() + crc_start, out.size() - crc_start));
}

// zlib stream with stored (uncompressed) deflate blocks: byte-for-byte
// reproducible regardless of any zlib version.
std::vector<std::uint8_t> zlib_stored(const std::vector<std::uint8_t>& raw) {
    std::vector<std::uint8_t> out;
    out.push_back(0x78);
    out.push_back(0x01);
    std::size_t pos = 0;
    do {
        std::size_t chunk = std::min<std::size_t>(raw.size() - pos, 65535);
        bool final = pos + chunk == raw.size();
        out.push_back(final ? 1 : 0);
        out.push_back(std::uint8_t(chunk & 0xff));
        out.push_back(std::uint8_t(chunk >> 8));
        out.push_back(std::uint8_t(~chunk & 0xff));
        out.push_back(std::uint8_t((~chunk >> 8) & 0xff));
        out.insert(out.end(), raw.begin() + pos, raw.begin() + pos + chunk);
        pos += chunk;
    } while (pos < raw.size());
    // adler32
    std::uint32_t a = 1, b = 0;
    for (std::uint8_t byte : raw) {
        a = (a + byte) % 65521;
        b = (b + a) % 65521;
    }
    put_u32(out, (b << 16) | a);
    return out;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const RenderedImage& image) {
    const int w = image.resolution, h = image.resolution;
    if (image.pixels.size() != std::size_t(w) * h * 3)
        throw UsageError("encode_png: pixel buffer does not match resolution");

    std::vector<std::uint8_t> png = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

    std::vector<std::uint8_t> ihdr;
    put_u32(ihdr, std::uint32_t(w));
    put_u32(ihdr, std::uint32_t(h));
    ihdr.push_back(8);   // bit depth
    ihdr.push_back(2);   // color type: truecolor
    ihdr.push_back(0);   // compression
    ihdr.push_back(0);   // filter
    ihdr.push_back(0);   // interlace
    put_chunk(png, "IHDR", ihdr);

    std::vector<std::uint8_t> raw;
    raw.reserve(std::size_t(h) * (1 + std::size_t(w) * 3));
    for (int y = 0; y < h; ++y) {
        raw.push_back(0);  // filter: none
        const std::uint8_t* row = image.pixels.data() + std::size_t(y) * w * 3;
        raw.insert(raw.end(), row, row + std::size_t(w) * 3);
    }
    put_chunk(png, "IDAT", zlib_stored(raw));
    put_chunk(png, "IEND", {});
    return png;
}

void write_png(const RenderedImage& image, const std::string& path) {
    auto bytes = encode_png(image);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

}  // namespace debatekit
