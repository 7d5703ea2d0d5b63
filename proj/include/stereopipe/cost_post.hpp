#pragma once

#include <cstdint>
#include <limits>

#include "stereopipe/image.hpp"
#include "stereopipe/sgm.hpp"

namespace stereopipe {

/// Consistency threshold value that disables the check entirely.
constexpr int kConsistencyDisabled = std::numeric_limits<int>::max();

struct PostConfig {
    // Uniqueness factor q >= 1 as an exact rational; the accept test is
    // evaluated in integer arithmetic, never in floating point.
    std::uint16_t uniqueness_num = 3;
    std::uint8_t uniqueness_den = 2;
    // Competitor set for the uniqueness check: when true (default) the
    // two disparity indices adjacent to the minimum are not competitors,
    // so subpixel-scale cost similarity next to the minimum cannot
    // reject a match.
    bool uniqueness_exclude_neighbors = true;
    int consistency_threshold = 1;  // t_c in pixels, kConsistencyDisabled to skip

    void set_uniqueness(double q);
    double uniqueness() const {
        return static_cast<double>(uniqueness_num) / uniqueness_den;
    }

    void validate() const;
};

/// Winner-take-all reduction with parabola subpixel refinement. The
/// minimum's neighbors feed a three-point parabola fit; its offset is
/// clamped to +/- 0.5 px and quantized to 1/16 px (half up). Pixels with
/// no in-image disparity candidate come out invalid.
DisparityMap extract_disparity(const CostVolume& vol, const MatchConfig& cfg, int threads = 1);

/// Invalidate pixels whose best cost c* fails c* * q < m against the
/// cheapest competitor m (competitor set per PostConfig).
DisparityMap uniqueness_check(const CostVolume& vol, const DisparityMap& disp,
                              const PostConfig& post, int threads = 1);

/// Left-right consistency from the one cost volume: the right-image
/// disparity at column x_r is read off the volume anti-diagonal
/// d_r(x_r) = o_d + argmin_j cost(x_r + o_d + j, j), and a left pixel
/// survives iff |round(d_l) - d_r| <= t_c at its matched column.
DisparityMap consistency_check(const CostVolume& vol, const DisparityMap& disp,
                               const MatchConfig& cfg, int consistency_threshold,
                               int threads = 1);

}  // namespace stereopipe
