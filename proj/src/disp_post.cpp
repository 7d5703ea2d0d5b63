#include "stereopipe/disp_post.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "stereopipe/parallel.hpp"

namespace stereopipe {

void FilterConfig::validate() const {
    if (texture_window < 3 || texture_window % 2 == 0)
        throw std::invalid_argument("FilterConfig: texture window must be odd and >= 3");
    if (texture_window > 99)
        throw std::invalid_argument("FilterConfig: texture window too large");
    if (speckle_window < 0 || max_gap < 0)
        throw std::invalid_argument("FilterConfig: window sizes must be >= 0");
    if (gap_similarity == 0)
        throw std::invalid_argument("FilterConfig: gap similarity must be > 0");
    if (median_min_valid < 1)
        throw std::invalid_argument("FilterConfig: median_min_valid must be >= 1");
}

std::uint32_t texture_score(const GrayImage& img, int x, int y, int window) {
    const int r = window / 2;
    std::uint32_t score = 0;
    for (int v = y - r; v <= y + r; ++v) {
        for (int u = x - r; u <= x + r; ++u) {
            auto sample = [&](int sx, int sy) -> int {
                return (sx >= 0 && sx < img.width && sy >= 0 && sy < img.height)
                           ? img.at(sx, sy)
                           : 0;
            };
            int diff = sample(u + 1, v) - sample(u, v);
            score += static_cast<std::uint32_t>(diff * diff);
        }
    }
    return score;
}

DisparityMap texture_filter(const DisparityMap& disp, const GrayImage& left,
                            const FilterConfig& cfg, int threads) {
    cfg.validate();
    if (disp.width != left.width || disp.height != left.height)
        throw std::invalid_argument("texture_filter: dimensions differ");
    if (cfg.texture_threshold == 0) return disp;

    DisparityMap out = disp;
    parallel_for(0, disp.height, threads, [&](int y) {
        for (int x = 0; x < disp.width; ++x) {
            if (!disparity_valid(disp.at(x, y))) continue;
            if (texture_score(left, x, y, cfg.texture_window) < cfg.texture_threshold)
                out.at(x, y) = kInvalidDisparity;
        }
    });
    return out;
}

namespace {

struct UnionFind {
    std::vector<std::int32_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    std::int32_t find(std::int32_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    }
    void unite(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

bool similar(FixedDisparity a, FixedDisparity b, FixedDisparity tol) {
    return static_cast<int>(a > b ? a - b : b - a) <= static_cast<int>(tol);
}

}  // namespace

DisparityMap speckle_filter(const DisparityMap& disp, const FilterConfig& cfg) {
    cfg.validate();
    if (cfg.speckle_window == 0) return disp;

    const int w = disp.width;
    const int h = disp.height;
    UnionFind uf(disp.size());

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            FixedDisparity d = disp.at(x, y);
            if (!disparity_valid(d)) continue;
            std::int32_t i = y * w + x;
            if (x + 1 < w && disparity_valid(disp.at(x + 1, y)) &&
                similar(d, disp.at(x + 1, y), cfg.speckle_max_diff))
                uf.unite(i, i + 1);
            if (y + 1 < h && disparity_valid(disp.at(x, y + 1)) &&
                similar(d, disp.at(x, y + 1), cfg.speckle_max_diff))
                uf.unite(i, i + w);
        }
    }

    std::vector<std::int32_t> population(disp.size(), 0);
    for (std::size_t i = 0; i < disp.size(); ++i)
        if (disparity_valid(disp.data[i]))
            ++population[uf.find(static_cast<std::int32_t>(i))];

    DisparityMap out = disp;
    for (std::size_t i = 0; i < disp.size(); ++i)
        if (disparity_valid(disp.data[i]) &&
            population[uf.find(static_cast<std::int32_t>(i))] < cfg.speckle_window)
            out.data[i] = kInvalidDisparity;
    return out;
}

DisparityMap gap_interpolation(const DisparityMap& disp, const FilterConfig& cfg, int threads) {
    cfg.validate();
    if (cfg.max_gap == 0) return disp;

    const int w = disp.width;
    const int h = disp.height;

    // Vertical invalid-run length through each invalid pixel.
    std::vector<std::int32_t> run_above(disp.size(), 0);  // run ending here, inclusive
    std::vector<std::int32_t> vrun(disp.size(), 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (!disparity_valid(disp.at(x, y)))
                run_above[y * w + x] = (y > 0 ? run_above[(y - 1) * w + x] : 0) + 1;
    for (int y = h - 1; y >= 0; --y)
        for (int x = 0; x < w; ++x)
            if (!disparity_valid(disp.at(x, y)))
                vrun[y * w + x] = (y + 1 < h && !disparity_valid(disp.at(x, y + 1)))
                                      ? vrun[(y + 1) * w + x]
                                      : run_above[y * w + x];

    DisparityMap out = disp;
    parallel_for(0, h, threads, [&](int y) {
        int x = 0;
        while (x < w) {
            if (disparity_valid(disp.at(x, y))) {
                ++x;
                continue;
            }
            int x0 = x;
            while (x < w && !disparity_valid(disp.at(x, y))) ++x;
            int len = x - x0;  // l_h
            // Needs valid pixels at both ends.
            if (x0 == 0 || x == w) continue;
            FixedDisparity left_edge = disp.at(x0 - 1, y);
            FixedDisparity right_edge = disp.at(x, y);
            if (!similar(left_edge, right_edge, cfg.gap_similarity)) continue;
            for (int i = 0; i < len; ++i) {
                if (std::min(len, static_cast<int>(vrun[y * w + x0 + i])) > cfg.max_gap)
                    continue;
                long long num = static_cast<long long>(left_edge) * (len - i) +
                                static_cast<long long>(right_edge) * (i + 1);
                long long den = len + 1;
                out.at(x0 + i, y) =
                    static_cast<FixedDisparity>((2 * num + den) / (2 * den));
            }
        }
    });
    return out;
}

DisparityMap noise_filter(const DisparityMap& disp, const FilterConfig& cfg, int threads) {
    cfg.validate();

    const int w = disp.width;
    const int h = disp.height;
    DisparityMap out = disp;

    parallel_for(0, h, threads, [&](int y) {
        FixedDisparity window[9];
        for (int x = 0; x < w; ++x) {
            if (!disparity_valid(disp.at(x, y))) continue;
            int n = 0;
            for (int v = std::max(0, y - 1); v <= std::min(h - 1, y + 1); ++v)
                for (int u = std::max(0, x - 1); u <= std::min(w - 1, x + 1); ++u)
                    if (disparity_valid(disp.at(u, v))) window[n++] = disp.at(u, v);
            if (n < cfg.median_min_valid) continue;
            std::sort(window, window + n);
            out.at(x, y) = window[(n - 1) / 2];
        }
    });
    return out;
}

}  // namespace stereopipe
