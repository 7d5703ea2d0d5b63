#pragma once

#include <cstdint>

#include "stereopipe/image.hpp"

namespace stereopipe {

struct FilterConfig {
    std::uint32_t texture_threshold = 40;   // t_t, score units; 0 disables
    int texture_window = 5;                 // odd, >= 3
    int speckle_window = 50;                // w_s, minimum population; 0 disables
    FixedDisparity speckle_max_diff = 16;   // Q12.4; adjacency tolerance inside a speckle
    int max_gap = 5;                        // l_max in pixels; 0 disables
    FixedDisparity gap_similarity = 16;     // Q12.4; edge disparities must agree this closely
    static constexpr int median_window = 3;
    int median_min_valid = 5;               // window pixels (center included) needed to filter

    void validate() const;
};

/// Windowed sum of squared horizontal intensity differences; pixels
/// scoring below the threshold are invalidated. Zero-padded borders.
DisparityMap texture_filter(const DisparityMap& disp, const GrayImage& left,
                            const FilterConfig& cfg, int threads = 1);

std::uint32_t texture_score(const GrayImage& img, int x, int y, int window);

/// Remove 4-connected components of similar disparity whose population is
/// below the speckle window size.
DisparityMap speckle_filter(const DisparityMap& disp, const FilterConfig& cfg);

/// Fill small horizontal gaps between valid pixels by linear
/// interpolation of the edge disparities. A gap pixel is filled only if
/// the smaller of the gap's horizontal length and the pixel's vertical
/// invalid-run length is within max_gap and the edges agree within
/// gap_similarity. Runs touching the image border stay open.
DisparityMap gap_interpolation(const DisparityMap& disp, const FilterConfig& cfg,
                               int threads = 1);

/// 3x3 median over valid neighbors only; a pixel is replaced only when it
/// is valid and enough of its window is valid. Even-count medians take
/// the lower middle.
DisparityMap noise_filter(const DisparityMap& disp, const FilterConfig& cfg, int threads = 1);

}  // namespace stereopipe
