#include "stereopipe/sgm.hpp"

#include <algorithm>
#include <stdexcept>

#include "stereopipe/parallel.hpp"

namespace stereopipe {

void MatchConfig::validate() const {
    if (penalty_small == 0 || penalty_small >= penalty_large)
        throw std::invalid_argument("MatchConfig: requires 0 < P1 < P2");
    if (disparity_offset < 0)
        throw std::invalid_argument("MatchConfig: disparity offset must be >= 0");
    if (iterations < 1)
        throw std::invalid_argument("MatchConfig: iteration count must be >= 1");
    if (parallelism != 16 && parallelism != 32)
        throw std::invalid_argument("MatchConfig: parallelism is 16 (base) or 32 (pro)");
    if (disparity_offset + iterations * parallelism - 1 > 4095)
        throw std::invalid_argument("MatchConfig: d_max exceeds the Q12.4 integer range");
}

int max_disparity(const MatchConfig& cfg) {
    cfg.validate();
    return cfg.disparity_offset + cfg.iterations * cfg.parallelism - 1;
}

CostVolume matching_cost(const CensusImage& left, const CensusImage& right,
                         const MatchConfig& cfg, int threads) {
    cfg.validate();
    if (left.width != right.width || left.height != right.height)
        throw std::invalid_argument("matching_cost: image dimensions differ");

    const int w = left.width;
    const int h = left.height;
    const int nd = cfg.num_disparities();
    const int od = cfg.disparity_offset;
    CostVolume vol(w, h, nd);

    parallel_for(0, h, threads, [&](int y) {
        const std::uint32_t* lrow = &left.data[static_cast<std::size_t>(y) * w];
        const std::uint32_t* rrow = &right.data[static_cast<std::size_t>(y) * w];
        std::uint16_t* cost = vol.at(0, y);
        for (int x = 0; x < w; ++x, cost += nd) {
            const std::uint32_t desc = lrow[x];
            // Right pixel x - (od + j) must stay inside the image.
            int valid = std::clamp(x - od + 1, 0, nd);
            for (int j = 0; j < valid; ++j)
                cost[j] = hamming24(desc, rrow[x - od - j]);
            for (int j = valid; j < nd; ++j)
                cost[j] = kMaxCost;
        }
    });
    return vol;
}

namespace {

// One step of the SGM path recursion: from the predecessor's cost row
// `prev` (and its minimum m), produce this pixel's row `cur`.
// Sentinel entries pass through; valid entries saturate below the
// sentinel so it stays exclusive.
void path_step(const std::uint16_t* raw, const std::uint16_t* prev, int prev_min,
               int nd, int p1, int p2, std::uint16_t* cur) {
    const int cap = prev_min + p2;
    for (int d = 0; d < nd; ++d) {
        if (raw[d] == kMaxCost) {
            cur[d] = kMaxCost;
            continue;
        }
        int best = prev[d];
        if (d > 0) best = std::min(best, prev[d - 1] + p1);
        if (d + 1 < nd) best = std::min(best, prev[d + 1] + p1);
        best = std::min(best, cap);
        int v = raw[d] + best - prev_min;
        cur[d] = static_cast<std::uint16_t>(std::min(v, static_cast<int>(kCostSaturation)));
    }
}

// Path restart at borders (and past fully-sentinel predecessors): L = C.
void path_restart(const std::uint16_t* raw, int nd, std::uint16_t* cur) {
    std::copy(raw, raw + nd, cur);
}

std::uint16_t row_min(const std::uint16_t* vals, int nd) {
    std::uint16_t m = vals[0];
    for (int d = 1; d < nd; ++d) m = std::min(m, vals[d]);
    return m;
}

}  // namespace

CostVolume aggregate(const CostVolume& raw, const MatchConfig& cfg, int threads) {
    cfg.validate();
    if (raw.num_disparities != cfg.num_disparities())
        throw std::invalid_argument("aggregate: volume disparity count does not match config");
    if (raw.width < 1 || raw.height < 1)
        throw std::invalid_argument("aggregate: empty volume");

    const int w = raw.width;
    const int h = raw.height;
    const int nd = raw.num_disparities;
    const int p1 = cfg.penalty_small;
    const int p2 = cfg.penalty_large;

    CostVolume out(w, h, nd);

    // Horizontal path (left to right); rows are independent.
    parallel_for(0, h, threads, [&](int y) {
        std::vector<std::uint16_t> prev(static_cast<std::size_t>(nd));
        std::uint16_t* dst = out.at(0, y);
        const std::uint16_t* src = raw.at(0, y);
        path_restart(src, nd, dst);
        std::uint16_t m = row_min(dst, nd);
        for (int x = 1; x < w; ++x) {
            std::copy(dst, dst + nd, prev.data());
            dst += nd;
            src += nd;
            if (m == kMaxCost)
                path_restart(src, nd, dst);
            else
                path_step(src, prev.data(), m, nd, p1, p2, dst);
            m = row_min(dst, nd);
        }
    });

    // Vertical and the two down-sloping diagonal paths share one top-down
    // sweep; each keeps the previous row's costs and per-pixel minima.
    const std::size_t rowsz = static_cast<std::size_t>(w) * nd;
    std::vector<std::uint16_t> prev_v(rowsz), cur_v(rowsz);
    std::vector<std::uint16_t> prev_dl(rowsz), cur_dl(rowsz);  // top-left to bottom-right
    std::vector<std::uint16_t> prev_dr(rowsz), cur_dr(rowsz);  // top-right to bottom-left
    std::vector<std::uint16_t> prev_min_v(w), cur_min_v(w);
    std::vector<std::uint16_t> prev_min_dl(w), cur_min_dl(w);
    std::vector<std::uint16_t> prev_min_dr(w), cur_min_dr(w);

    for (int y = 0; y < h; ++y) {
        parallel_for(0, w, threads, [&](int x) {
            const std::uint16_t* src = raw.at(x, y);
            std::uint16_t* lv = &cur_v[static_cast<std::size_t>(x) * nd];
            std::uint16_t* ldl = &cur_dl[static_cast<std::size_t>(x) * nd];
            std::uint16_t* ldr = &cur_dr[static_cast<std::size_t>(x) * nd];

            if (y == 0 || prev_min_v[x] == kMaxCost)
                path_restart(src, nd, lv);
            else
                path_step(src, &prev_v[static_cast<std::size_t>(x) * nd], prev_min_v[x],
                          nd, p1, p2, lv);

            if (y == 0 || x == 0 || prev_min_dl[x - 1] == kMaxCost)
                path_restart(src, nd, ldl);
            else
                path_step(src, &prev_dl[static_cast<std::size_t>(x - 1) * nd], prev_min_dl[x - 1],
                          nd, p1, p2, ldl);

            if (y == 0 || x == w - 1 || prev_min_dr[x + 1] == kMaxCost)
                path_restart(src, nd, ldr);
            else
                path_step(src, &prev_dr[static_cast<std::size_t>(x + 1) * nd], prev_min_dr[x + 1],
                          nd, p1, p2, ldr);

            cur_min_v[x] = row_min(lv, nd);
            cur_min_dl[x] = row_min(ldl, nd);
            cur_min_dr[x] = row_min(ldr, nd);

            // Saturating four-path sum; the horizontal path is already in out.
            std::uint16_t* dst = out.at(x, y);
            for (int d = 0; d < nd; ++d) {
                if (src[d] == kMaxCost) {
                    dst[d] = kMaxCost;
                    continue;
                }
                std::uint32_t sum = static_cast<std::uint32_t>(dst[d]) + lv[d] + ldl[d] + ldr[d];
                dst[d] = static_cast<std::uint16_t>(
                    std::min(sum, static_cast<std::uint32_t>(kCostSaturation)));
            }
        });
        std::swap(prev_v, cur_v);
        std::swap(prev_dl, cur_dl);
        std::swap(prev_dr, cur_dr);
        std::swap(prev_min_v, cur_min_v);
        std::swap(prev_min_dl, cur_min_dl);
        std::swap(prev_min_dr, cur_min_dr);
    }
    return out;
}

}  // namespace stereopipe
