#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "stereopipe/image.hpp"

namespace stereopipe {

/// Per-pixel 24-bit census descriptors over a 5x5 neighborhood minus the
/// center. Bit k is set iff neighbor k (raster order over the window,
/// center skipped) is strictly darker than the center; out-of-image
/// neighbors read as intensity 0.
struct CensusImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint32_t> data;

    CensusImage() = default;
    CensusImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0) {}

    std::uint32_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }

    bool operator==(const CensusImage&) const = default;
};

/// Requires img at least 5x5.
CensusImage census_transform(const GrayImage& img, int threads = 1);

inline std::uint16_t hamming24(std::uint32_t a, std::uint32_t b) {
    return static_cast<std::uint16_t>(std::popcount(a ^ b));
}

}  // namespace stereopipe
