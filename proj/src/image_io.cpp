#include "stereopipe/image_io.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace stereopipe {

namespace {

// Cursor over a PNM header: whitespace separates tokens, '#' starts a
// comment that runs to end of line.
struct HeaderCursor {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;

    void skip_space_and_comments() {
        while (pos < bytes.size()) {
            std::uint8_t c = bytes[pos];
            if (c == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(c)) {
                ++pos;
            } else {
                break;
            }
        }
    }

    std::string next_token() {
        skip_space_and_comments();
        std::size_t start = pos;
        while (pos < bytes.size() && !std::isspace(bytes[pos]) && bytes[pos] != '#') ++pos;
        if (pos == start) throw IoError("pnm: truncated header");
        return std::string(reinterpret_cast<const char*>(bytes.data()) + start, pos - start);
    }

    long next_int() {
        std::string tok = next_token();
        for (char c : tok)
            if (!std::isdigit(static_cast<unsigned char>(c)))
                throw IoError("pnm: expected integer in header, got '" + tok + "'");
        if (tok.size() > 9) throw IoError("pnm: header integer out of range");
        return std::stol(tok);
    }

    // Payload begins after exactly one whitespace byte following maxval.
    std::span<const std::uint8_t> payload_after_single_space() {
        if (pos >= bytes.size() || !std::isspace(bytes[pos]))
            throw IoError("pnm: missing separator before payload");
        ++pos;
        return bytes.subspan(pos);
    }
};

void check_dims(long w, long h) {
    if (w < 1 || h < 1) throw IoError("pnm: dimensions must be >= 1");
    if (w > kMaxImageDim || h > kMaxImageDim)
        throw IoError("pnm: dimension exceeds device maximum of 1856");
}

}  // namespace

GrayImage load_pgm(std::span<const std::uint8_t> bytes) {
    HeaderCursor cur{bytes};
    if (cur.next_token() != "P5") throw IoError("pgm: bad magic, expected P5");
    long w = cur.next_int();
    long h = cur.next_int();
    long maxval = cur.next_int();
    check_dims(w, h);
    if (maxval != 255) throw IoError("pgm: maxval must be 255 for 8-bit images");
    auto payload = cur.payload_after_single_space();
    std::size_t need = static_cast<std::size_t>(w) * h;
    if (payload.size() < need) throw IoError("pgm: truncated payload");
    GrayImage img(static_cast<int>(w), static_cast<int>(h));
    std::memcpy(img.data.data(), payload.data(), need);
    return img;
}

std::vector<std::uint8_t> save_pgm(const GrayImage& img) {
    std::string header = "P5\n" + std::to_string(img.width) + " " +
                         std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.data.begin(), img.data.end());
    return out;
}

DisparityMap load_disparity_pgm16(std::span<const std::uint8_t> bytes) {
    HeaderCursor cur{bytes};
    if (cur.next_token() != "P5") throw IoError("pgm16: bad magic, expected P5");
    long w = cur.next_int();
    long h = cur.next_int();
    long maxval = cur.next_int();
    check_dims(w, h);
    if (maxval != 65535) throw IoError("pgm16: maxval must be 65535 for disparity rasters");
    auto payload = cur.payload_after_single_space();
    std::size_t need = static_cast<std::size_t>(w) * h * 2;
    if (payload.size() < need) throw IoError("pgm16: truncated payload");
    DisparityMap map(static_cast<int>(w), static_cast<int>(h));
    for (std::size_t i = 0; i < map.size(); ++i)
        map.data[i] = static_cast<std::uint16_t>((payload[2 * i] << 8) | payload[2 * i + 1]);
    return map;
}

std::vector<std::uint8_t> save_disparity_pgm16(const DisparityMap& map) {
    std::string header = "P5\n" + std::to_string(map.width) + " " +
                         std::to_string(map.height) + "\n65535\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + map.size() * 2);
    for (FixedDisparity d : map.data) {
        out.push_back(static_cast<std::uint8_t>(d >> 8));
        out.push_back(static_cast<std::uint8_t>(d & 0xFF));
    }
    return out;
}

namespace {

float read_float_le(const std::uint8_t* p, bool little_endian) {
    std::uint32_t u;
    if (little_endian)
        u = p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    else
        u = p[3] | (p[2] << 8) | (p[1] << 16) | (static_cast<std::uint32_t>(p[0]) << 24);
    return std::bit_cast<float>(u);
}

}  // namespace

DisparityMap load_disparity_pfm(std::span<const std::uint8_t> bytes) {
    HeaderCursor cur{bytes};
    if (cur.next_token() != "Pf") throw IoError("pfm: bad magic, expected grayscale Pf");
    long w = cur.next_int();
    long h = cur.next_int();
    check_dims(w, h);
    std::string scale_tok = cur.next_token();
    double scale = 0.0;
    try {
        scale = std::stod(scale_tok);
    } catch (const std::exception&) {
        throw IoError("pfm: bad scale '" + scale_tok + "'");
    }
    if (scale == 0.0) throw IoError("pfm: scale must be nonzero");
    bool little_endian = scale < 0.0;
    auto payload = cur.payload_after_single_space();
    std::size_t need = static_cast<std::size_t>(w) * h * 4;
    if (payload.size() < need) throw IoError("pfm: truncated payload");
    DisparityMap map(static_cast<int>(w), static_cast<int>(h));
    // PFM stores rows bottom-to-top.
    for (long row = 0; row < h; ++row) {
        long y = h - 1 - row;
        const std::uint8_t* src = payload.data() + static_cast<std::size_t>(row) * w * 4;
        for (long x = 0; x < w; ++x) {
            float v = read_float_le(src + x * 4, little_endian);
            FixedDisparity d;
            if (!std::isfinite(v) || v < 0.0f) {
                d = kInvalidDisparity;
            } else {
                double raw = static_cast<double>(v) * kDisparityScale;
                double rounded = std::floor(raw + 0.5);
                if (rounded > 65534.0) throw IoError("pfm: disparity outside Q12.4 range");
                d = static_cast<FixedDisparity>(rounded);
            }
            map.at(static_cast<int>(x), static_cast<int>(y)) = d;
        }
    }
    return map;
}

std::vector<std::uint8_t> save_disparity_pfm(const DisparityMap& map) {
    std::string header = "Pf\n" + std::to_string(map.width) + " " +
                         std::to_string(map.height) + "\n-1.0\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + map.size() * 4);
    for (int row = map.height - 1; row >= 0; --row) {
        for (int x = 0; x < map.width; ++x) {
            FixedDisparity d = map.at(x, row);
            float v = disparity_valid(d) ? disparity_to_pixels(d)
                                         : -std::numeric_limits<float>::infinity();
            std::uint32_t u = std::bit_cast<std::uint32_t>(v);
            out.push_back(static_cast<std::uint8_t>(u & 0xFF));
            out.push_back(static_cast<std::uint8_t>((u >> 8) & 0xFF));
            out.push_back(static_cast<std::uint8_t>((u >> 16) & 0xFF));
            out.push_back(static_cast<std::uint8_t>((u >> 24) & 0xFF));
        }
    }
    return out;
}

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

void write_binary_file(const std::string& path, std::span<const std::uint8_t> bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open file for writing: " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("write failed: " + path);
}

GrayImage load_pgm_file(const std::string& path) { return load_pgm(read_binary_file(path)); }

void save_pgm_file(const std::string& path, const GrayImage& img) {
    auto bytes = save_pgm(img);
    write_binary_file(path, bytes);
}

namespace {
bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}
}  // namespace

DisparityMap load_disparity_file(const std::string& path) {
    auto bytes = read_binary_file(path);
    if (has_suffix(path, ".pfm")) return load_disparity_pfm(bytes);
    if (has_suffix(path, ".pgm")) return load_disparity_pgm16(bytes);
    throw IoError("unknown disparity format (want .pgm or .pfm): " + path);
}

void save_disparity_file(const std::string& path, const DisparityMap& map) {
    std::vector<std::uint8_t> bytes;
    if (has_suffix(path, ".pfm"))
        bytes = save_disparity_pfm(map);
    else if (has_suffix(path, ".pgm"))
        bytes = save_disparity_pgm16(map);
    else
        throw IoError("unknown disparity format (want .pgm or .pfm): " + path);
    write_binary_file(path, bytes);
}

}  // namespace stereopipe
