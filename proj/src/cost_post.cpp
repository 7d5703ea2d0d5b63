#include "stereopipe/cost_post.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stereopipe/parallel.hpp"

namespace stereopipe {

void PostConfig::set_uniqueness(double q) {
    if (!(q >= 1.0) || q > 1000.0)
        throw std::invalid_argument("PostConfig: uniqueness factor must be in [1, 1000]");
    // Best rational with an 8-bit denominator; exact for the usual
    // one- or two-decimal settings.
    int best_num = 0, best_den = 1;
    double best_err = std::numeric_limits<double>::infinity();
    for (int den = 1; den <= 255; ++den) {
        double num_f = std::floor(q * den + 0.5);
        if (num_f > 65535.0) continue;
        int num = static_cast<int>(num_f);
        double err = std::abs(q - static_cast<double>(num) / den);
        if (err + 1e-15 < best_err) {
            best_err = err;
            best_num = num;
            best_den = den;
        }
    }
    uniqueness_num = static_cast<std::uint16_t>(best_num);
    uniqueness_den = static_cast<std::uint8_t>(best_den);
    validate();
}

void PostConfig::validate() const {
    if (uniqueness_den == 0 || uniqueness_num < uniqueness_den)
        throw std::invalid_argument("PostConfig: uniqueness factor must be >= 1");
    if (consistency_threshold < 0)
        throw std::invalid_argument("PostConfig: consistency threshold must be >= 0");
}

namespace {

// Round-half-up division for a possibly negative numerator, positive
// denominator: floor((2a + b) / (2b)).
int div_round_half_up(long long a, long long b) {
    long long num = 2 * a + b;
    long long den = 2 * b;
    long long q = num / den;
    if (num % den != 0 && (num < 0) != (den < 0)) --q;
    return static_cast<int>(q);
}

// Index of the cheapest cost, lowest index on ties; nd if every entry is
// the out-of-image sentinel.
int argmin_cost(const std::uint16_t* cost, int nd) {
    int best = 0;
    std::uint16_t best_cost = cost[0];
    for (int j = 1; j < nd; ++j) {
        if (cost[j] < best_cost) {
            best_cost = cost[j];
            best = j;
        }
    }
    return best_cost == kMaxCost ? nd : best;
}

}  // namespace

DisparityMap extract_disparity(const CostVolume& vol, const MatchConfig& cfg, int threads) {
    cfg.validate();
    if (vol.num_disparities != cfg.num_disparities())
        throw std::invalid_argument("extract_disparity: volume does not match config");

    const int w = vol.width;
    const int nd = vol.num_disparities;
    const int od = cfg.disparity_offset;
    DisparityMap disp(w, vol.height);

    parallel_for(0, vol.height, threads, [&](int y) {
        for (int x = 0; x < w; ++x) {
            const std::uint16_t* cost = vol.at(x, y);
            int j = argmin_cost(cost, nd);
            if (j == nd) continue;  // stays invalid

            int delta16 = 0;
            if (j > 0 && j + 1 < nd && cost[j - 1] != kMaxCost && cost[j + 1] != kMaxCost) {
                int lo = cost[j - 1], c = cost[j], hi = cost[j + 1];
                int den = 2 * (lo - 2 * c + hi);
                if (den != 0) {
                    delta16 = div_round_half_up(16LL * (lo - hi), den);
                    delta16 = std::clamp(delta16, -8, 8);
                }
            }
            disp.at(x, y) =
                static_cast<FixedDisparity>((od + j) * kDisparityScale + delta16);
        }
    });
    return disp;
}

DisparityMap uniqueness_check(const CostVolume& vol, const DisparityMap& disp,
                              const PostConfig& post, int threads) {
    post.validate();
    if (vol.width != disp.width || vol.height != disp.height)
        throw std::invalid_argument("uniqueness_check: dimensions differ");

    const int w = vol.width;
    const int nd = vol.num_disparities;
    const std::uint32_t q_num = post.uniqueness_num;
    const std::uint32_t q_den = post.uniqueness_den;
    const bool exclude = post.uniqueness_exclude_neighbors;
    DisparityMap out = disp;

    parallel_for(0, vol.height, threads, [&](int y) {
        for (int x = 0; x < w; ++x) {
            if (!disparity_valid(disp.at(x, y))) continue;
            const std::uint16_t* cost = vol.at(x, y);
            int jstar = argmin_cost(cost, nd);
            if (jstar == nd) {
                out.at(x, y) = kInvalidDisparity;
                continue;
            }
            std::uint32_t best = cost[jstar];
            std::uint32_t competitor = kMaxCost;
            for (int j = 0; j < nd; ++j) {
                if (cost[j] == kMaxCost) continue;
                int dist = std::abs(j - jstar);
                if (exclude ? dist <= 1 : dist == 0) continue;
                competitor = std::min(competitor, static_cast<std::uint32_t>(cost[j]));
            }
            if (competitor == kMaxCost) continue;  // no competitor: trivially unique
            // c* . q < m, evaluated exactly as c* . q_num < m . q_den.
            if (!(best * q_num < competitor * q_den)) out.at(x, y) = kInvalidDisparity;
        }
    });
    return out;
}

DisparityMap consistency_check(const CostVolume& vol, const DisparityMap& disp,
                               const MatchConfig& cfg, int consistency_threshold,
                               int threads) {
    cfg.validate();
    if (vol.width != disp.width || vol.height != disp.height)
        throw std::invalid_argument("consistency_check: dimensions differ");
    if (consistency_threshold == kConsistencyDisabled) return disp;
    if (consistency_threshold < 0)
        throw std::invalid_argument("consistency_check: threshold must be >= 0");

    const int w = vol.width;
    const int nd = vol.num_disparities;
    const int od = cfg.disparity_offset;
    DisparityMap out = disp;

    parallel_for(0, vol.height, threads, [&](int y) {
        // Right-image disparities along this row: scan the anti-diagonal
        // cost(x_r + o_d + j, j) over j. -1 marks "no valid entry".
        std::vector<int> d_right(static_cast<std::size_t>(w), -1);
        for (int xr = 0; xr < w; ++xr) {
            std::uint16_t best_cost = kMaxCost;
            int best_j = -1;
            for (int j = 0; j < nd; ++j) {
                int xl = xr + od + j;
                if (xl >= w) break;
                std::uint16_t c = vol.at(xl, y)[j];
                if (c < best_cost) {
                    best_cost = c;
                    best_j = j;
                }
            }
            if (best_j >= 0) d_right[xr] = od + best_j;
        }

        for (int x = 0; x < w; ++x) {
            FixedDisparity d = disp.at(x, y);
            if (!disparity_valid(d)) continue;
            int d_left = (d + kDisparityScale / 2) >> kDisparityFractionBits;
            int xr = x - d_left;
            if (xr < 0 || d_right[xr] < 0 ||
                std::abs(d_left - d_right[xr]) > consistency_threshold)
                out.at(x, y) = kInvalidDisparity;
        }
    });
    return out;
}

}  // namespace stereopipe
