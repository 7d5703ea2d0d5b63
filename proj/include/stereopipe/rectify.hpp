#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stereopipe/image.hpp"

namespace stereopipe {

/// Largest magnitude a rectification offset may have, in pixels. Follows
/// from the 79x79 remap window: -39 .. +39 in either axis.
constexpr int kMaxOffsetPixels = 39;
constexpr int kMaxOffsetRaw = kMaxOffsetPixels * kDisparityScale;  // Q12.4

/// Per-pixel subpixel displacement field, signed Q12.4 per axis.
struct OffsetField {
    int width = 0;
    int height = 0;
    std::vector<std::int16_t> dx;  // raw = offset * 16
    std::vector<std::int16_t> dy;

    OffsetField() = default;
    OffsetField(int w, int h)
        : width(w), height(h),
          dx(static_cast<std::size_t>(w) * h, 0),
          dy(static_cast<std::size_t>(w) * h, 0) {}

    bool operator==(const OffsetField&) const = default;
};

/// Displacement fields for both cameras of a stereo pair.
struct RectificationMap {
    OffsetField left;
    OffsetField right;

    int width() const { return left.width; }
    int height() const { return left.height; }

    bool operator==(const RectificationMap&) const = default;
};

/// Bilinear remap of img by a per-pixel displacement field:
/// out(x,y) samples img at (x + dx, y + dy). Weights carry 8 fractional
/// bits; the result rounds half up to 8 bits. Samples whose bilinear
/// support leaves the image produce intensity 0.
GrayImage remap(const GrayImage& img, const OffsetField& offsets, int threads = 1);

std::pair<GrayImage, GrayImage> rectify_pair(const GrayImage& left, const GrayImage& right,
                                             const RectificationMap& map, int threads = 1);

// RMAP1 stream: "RMAP1\n<width> <height>\n" followed by one record per
// pixel in raster order, left-camera record then right-camera record.
// Each record codes the (dx, dy) residual against the predictor: the
// previous pixel in the row, or for a row's first pixel the first pixel
// of the previous row, or zero at the origin (prediction chains are per
// camera). Residuals are in 1/16 units. When both fit in [-8, 7] and the
// packed byte (dx nibble high, dy nibble low) is not 0x80, the record is
// that single byte; otherwise it is the escape byte 0x80 followed by dx
// and dy as little-endian signed 16-bit values. The nibble pair (-8, 0)
// would collide with the escape byte, so that one residual pair always
// takes the escape form.
std::vector<std::uint8_t> encode_map(const RectificationMap& map);
RectificationMap decode_map(std::span<const std::uint8_t> bytes);

RectificationMap load_map_file(const std::string& path);
void save_map_file(const std::string& path, const RectificationMap& map);

}  // namespace stereopipe
