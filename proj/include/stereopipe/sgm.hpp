#pragma once

#include <cstdint>
#include <vector>

#include "stereopipe/census.hpp"
#include "stereopipe/image.hpp"

namespace stereopipe {

/// Matching costs are 16-bit. The all-ones word marks cost-volume entries
/// whose right pixel lies outside the image; it is never produced by
/// arithmetic, which saturates one below it.
constexpr std::uint16_t kMaxCost = 0xFFFF;
constexpr std::uint16_t kCostSaturation = 0xFFFE;

struct MatchConfig {
    std::uint16_t penalty_small = 10;    // P1
    std::uint16_t penalty_large = 120;   // P2
    int disparity_offset = 0;            // o_d, smallest disparity searched
    int iterations = 4;                  // n_i
    int parallelism = 32;                // p: 32 (pro profile) or 16 (base)

    int num_disparities() const { return iterations * parallelism; }

    void validate() const;
};

/// d_max = o_d + n_i * p - 1.
int max_disparity(const MatchConfig& cfg);

/// Aggregated or raw matching costs, row-major pixels, disparity index
/// innermost. Index j stands for disparity o_d + j.
struct CostVolume {
    int width = 0;
    int height = 0;
    int num_disparities = 0;
    std::vector<std::uint16_t> costs;

    CostVolume() = default;
    CostVolume(int w, int h, int d)
        : width(w), height(h), num_disparities(d),
          costs(static_cast<std::size_t>(w) * h * d, 0) {}

    std::uint16_t* at(int x, int y) {
        return costs.data() + (static_cast<std::size_t>(y) * width + x) * num_disparities;
    }
    const std::uint16_t* at(int x, int y) const {
        return costs.data() + (static_cast<std::size_t>(y) * width + x) * num_disparities;
    }

    bool operator==(const CostVolume&) const = default;
};

/// Hamming-distance cost volume: cost(x,y,j) = popcount of the census
/// descriptors at left (x,y) and right (x - (o_d + j), y). Entries whose
/// right pixel falls outside the image carry kMaxCost.
CostVolume matching_cost(const CensusImage& left, const CensusImage& right,
                         const MatchConfig& cfg, int threads = 1);

/// Four-path SGM aggregation (left-to-right, top-down, and both
/// down-sloping diagonals), saturating 16-bit, summed per entry.
/// Out-of-image entries stay kMaxCost.
CostVolume aggregate(const CostVolume& raw, const MatchConfig& cfg, int threads = 1);

}  // namespace stereopipe
