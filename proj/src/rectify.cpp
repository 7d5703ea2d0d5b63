#include "stereopipe/rectify.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "stereopipe/image_io.hpp"
#include "stereopipe/parallel.hpp"

namespace stereopipe {

namespace {

void check_field(const OffsetField& f, int img_w, int img_h) {
    if (f.width != img_w || f.height != img_h)
        throw std::invalid_argument("remap: offset field dimensions do not match image");
    std::size_t n = static_cast<std::size_t>(f.width) * f.height;
    if (f.dx.size() != n || f.dy.size() != n)
        throw std::invalid_argument("remap: offset field storage size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(f.dx[i]) > kMaxOffsetRaw || std::abs(f.dy[i]) > kMaxOffsetRaw)
            throw std::invalid_argument("remap: offset outside the +/-39 px window");
    }
}

}  // namespace

GrayImage remap(const GrayImage& img, const OffsetField& offsets, int threads) {
    check_field(offsets, img.width, img.height);

    const int w = img.width;
    const int h = img.height;
    GrayImage out(w, h);

    auto remap_row = [&](int y) {
        const std::size_t row = static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            // Sample position in Q12.4.
            int sx = x * kDisparityScale + offsets.dx[row + x];
            int sy = y * kDisparityScale + offsets.dy[row + x];
            int x0 = sx >> kDisparityFractionBits;
            int y0 = sy >> kDisparityFractionBits;
            int fx = sx & (kDisparityScale - 1);
            int fy = sy & (kDisparityScale - 1);

            // Only taps with nonzero weight count as support.
            int x1 = fx ? x0 + 1 : x0;
            int y1 = fy ? y0 + 1 : y0;
            if (x0 < 0 || y0 < 0 || x1 >= w || y1 >= h) {
                out.data[row + x] = 0;
                continue;
            }

            // 4+4 fractional weight bits -> denominator 256.
            int w00 = (16 - fx) * (16 - fy);
            int w10 = fx * (16 - fy);
            int w01 = (16 - fx) * fy;
            int w11 = fx * fy;
            int sum = w00 * img.at(x0, y0) + w10 * img.at(x1, y0) +
                      w01 * img.at(x0, y1) + w11 * img.at(x1, y1);
            out.data[row + x] = static_cast<std::uint8_t>((sum + 128) >> 8);
        }
    };

    parallel_for(0, h, threads, remap_row);
    return out;
}

std::pair<GrayImage, GrayImage> rectify_pair(const GrayImage& left, const GrayImage& right,
                                             const RectificationMap& map, int threads) {
    if (left.width != right.width || left.height != right.height)
        throw std::invalid_argument("rectify_pair: image dimensions differ");
    return {remap(left, map.left, threads), remap(right, map.right, threads)};
}

namespace {

constexpr std::uint8_t kEscape = 0x80;

bool packable(int rx, int ry) {
    if (rx < -8 || rx > 7 || ry < -8 || ry > 7) return false;
    std::uint8_t packed = static_cast<std::uint8_t>(((rx & 0xF) << 4) | (ry & 0xF));
    return packed != kEscape;
}

struct Predictor {
    std::int16_t row_dx = 0, row_dy = 0;      // previous pixel in this row
    std::int16_t head_dx = 0, head_dy = 0;    // first pixel of previous row

    void start_row() {
        row_dx = head_dx;
        row_dy = head_dy;
    }
    void advance(int x, std::int16_t dx, std::int16_t dy) {
        if (x == 0) {
            head_dx = dx;
            head_dy = dy;
        }
        row_dx = dx;
        row_dy = dy;
    }
};

void encode_record(std::vector<std::uint8_t>& out, int rx, int ry) {
    if (packable(rx, ry)) {
        out.push_back(static_cast<std::uint8_t>(((rx & 0xF) << 4) | (ry & 0xF)));
    } else {
        out.push_back(kEscape);
        out.push_back(static_cast<std::uint8_t>(rx & 0xFF));
        out.push_back(static_cast<std::uint8_t>((rx >> 8) & 0xFF));
        out.push_back(static_cast<std::uint8_t>(ry & 0xFF));
        out.push_back(static_cast<std::uint8_t>((ry >> 8) & 0xFF));
    }
}

int sign_extend_nibble(int n) { return n >= 8 ? n - 16 : n; }

}  // namespace

std::vector<std::uint8_t> encode_map(const RectificationMap& map) {
    const int w = map.width();
    const int h = map.height();
    if (w < 1 || h < 1)
        throw std::invalid_argument("encode_map: empty map");
    if (map.right.width != w || map.right.height != h)
        throw std::invalid_argument("encode_map: left/right field dimensions differ");
    for (const OffsetField* f : {&map.left, &map.right}) {
        for (std::size_t i = 0; i < f->dx.size(); ++i)
            if (std::abs(f->dx[i]) > kMaxOffsetRaw || std::abs(f->dy[i]) > kMaxOffsetRaw)
                throw std::invalid_argument("encode_map: offset outside the +/-39 px window");
    }

    std::string header = "RMAP1\n" + std::to_string(w) + " " + std::to_string(h) + "\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + static_cast<std::size_t>(w) * h * 2);

    Predictor pred_l, pred_r;
    std::size_t i = 0;
    for (int y = 0; y < h; ++y) {
        pred_l.start_row();
        pred_r.start_row();
        for (int x = 0; x < w; ++x, ++i) {
            encode_record(out, map.left.dx[i] - pred_l.row_dx, map.left.dy[i] - pred_l.row_dy);
            pred_l.advance(x, map.left.dx[i], map.left.dy[i]);
            encode_record(out, map.right.dx[i] - pred_r.row_dx, map.right.dy[i] - pred_r.row_dy);
            pred_r.advance(x, map.right.dx[i], map.right.dy[i]);
        }
    }
    return out;
}

RectificationMap decode_map(std::span<const std::uint8_t> bytes) {
    const std::string magic = "RMAP1\n";
    if (bytes.size() < magic.size() ||
        !std::equal(magic.begin(), magic.end(), bytes.begin()))
        throw IoError("rmap: bad magic, expected RMAP1");

    std::size_t pos = magic.size();
    auto read_uint = [&](char terminator) {
        long v = 0;
        std::size_t digits = 0;
        while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
            v = v * 10 + (bytes[pos] - '0');
            if (v > kMaxImageDim) throw IoError("rmap: dimension out of range");
            ++pos;
            ++digits;
        }
        if (digits == 0 || pos >= bytes.size() || bytes[pos] != terminator)
            throw IoError("rmap: malformed header");
        ++pos;
        return static_cast<int>(v);
    };
    int w = read_uint(' ');
    int h = read_uint('\n');
    if (w < 1 || h < 1) throw IoError("rmap: dimensions must be >= 1");

    RectificationMap map{OffsetField(w, h), OffsetField(w, h)};

    auto decode_record = [&](int& rx, int& ry) {
        if (pos >= bytes.size()) throw IoError("rmap: residual stream truncated");
        std::uint8_t b = bytes[pos++];
        if (b == kEscape) {
            if (pos + 4 > bytes.size()) throw IoError("rmap: residual stream truncated");
            rx = static_cast<std::int16_t>(bytes[pos] | (bytes[pos + 1] << 8));
            ry = static_cast<std::int16_t>(bytes[pos + 2] | (bytes[pos + 3] << 8));
            pos += 4;
        } else {
            rx = sign_extend_nibble(b >> 4);
            ry = sign_extend_nibble(b & 0xF);
        }
    };

    Predictor pred_l, pred_r;
    std::size_t i = 0;
    for (int y = 0; y < h; ++y) {
        pred_l.start_row();
        pred_r.start_row();
        for (int x = 0; x < w; ++x, ++i) {
            int rx, ry;
            for (auto [field, pred] : {std::pair{&map.left, &pred_l}, std::pair{&map.right, &pred_r}}) {
                decode_record(rx, ry);
                int dx = pred->row_dx + rx;
                int dy = pred->row_dy + ry;
                if (std::abs(dx) > kMaxOffsetRaw || std::abs(dy) > kMaxOffsetRaw)
                    throw IoError("rmap: decoded offset outside the +/-39 px window");
                field->dx[i] = static_cast<std::int16_t>(dx);
                field->dy[i] = static_cast<std::int16_t>(dy);
                pred->advance(x, field->dx[i], field->dy[i]);
            }
        }
    }
    return map;
}

RectificationMap load_map_file(const std::string& path) {
    return decode_map(read_binary_file(path));
}

void save_map_file(const std::string& path, const RectificationMap& map) {
    auto bytes = encode_map(map);
    write_binary_file(path, bytes);
}

}  // namespace stereopipe
