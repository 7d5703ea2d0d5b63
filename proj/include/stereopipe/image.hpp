#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace stereopipe {

/// Largest width or height the pipeline accepts.
constexpr int kMaxImageDim = 1856;

/// 8-bit single-channel raster, row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // size == width * height

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {
        if (w < 1 || h < 1)
            throw std::invalid_argument("GrayImage: dimensions must be >= 1");
        if (w > kMaxImageDim || h > kMaxImageDim)
            throw std::invalid_argument("GrayImage: dimension exceeds device maximum");
    }

    std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return data.size(); }

    bool operator==(const GrayImage&) const = default;
};

// Disparities are Q12.4 fixed point: a 16-bit word holding disparity * 16,
// giving 1/16 px resolution over [0, 4095.9375]. The all-ones word is the
// invalid sentinel; it exceeds every representable disparity.
using FixedDisparity = std::uint16_t;
constexpr FixedDisparity kInvalidDisparity = 0xFFFF;
constexpr int kDisparityFractionBits = 4;
constexpr int kDisparityScale = 16;

inline bool disparity_valid(FixedDisparity d) { return d != kInvalidDisparity; }

inline float disparity_to_pixels(FixedDisparity d) {
    return static_cast<float>(d) / kDisparityScale;
}

/// Quantize a pixel disparity to Q12.4, rounding half up.
inline FixedDisparity pixels_to_disparity(double px) {
    if (px < 0.0 || px * kDisparityScale > 65534.5)
        throw std::invalid_argument("pixels_to_disparity: value outside Q12.4 range");
    auto raw = static_cast<std::uint32_t>(px * kDisparityScale + 0.5);
    return static_cast<FixedDisparity>(raw);
}

/// Per-pixel fixed-point disparity raster, row-major, same geometry as the
/// rectified left image.
struct DisparityMap {
    int width = 0;
    int height = 0;
    std::vector<FixedDisparity> data;  // size == width * height

    DisparityMap() = default;
    DisparityMap(int w, int h, FixedDisparity fill = kInvalidDisparity)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {
        if (w < 1 || h < 1)
            throw std::invalid_argument("DisparityMap: dimensions must be >= 1");
    }

    FixedDisparity& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    FixedDisparity at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return data.size(); }

    std::size_t valid_count() const {
        std::size_t n = 0;
        for (FixedDisparity d : data) n += disparity_valid(d) ? 1 : 0;
        return n;
    }

    bool operator==(const DisparityMap&) const = default;
};

}  // namespace stereopipe
