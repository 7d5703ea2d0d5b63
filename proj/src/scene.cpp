#include "stereopipe/scene.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace stereopipe {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

int lattice(std::uint64_t seed, int stream, std::int64_t ix, std::int64_t iy) {
    std::uint64_t key = splitmix64(seed ^ (static_cast<std::uint64_t>(stream) << 48) ^
                                   static_cast<std::uint64_t>(ix));
    key = splitmix64(key ^ static_cast<std::uint64_t>(iy));
    return static_cast<int>(key & 0xFF);
}

// Bilinear value noise, sampled at a Q12.4 raw coordinate. period_raw is a
// power of two so the cell split is exact.
int octave_value(std::uint64_t seed, int stream, std::int64_t period_raw,
                 std::int64_t rx, std::int64_t ry) {
    std::int64_t ix = rx / period_raw, fx = rx % period_raw;
    std::int64_t iy = ry / period_raw, fy = ry % period_raw;
    std::int64_t v00 = lattice(seed, stream, ix, iy);
    std::int64_t v10 = lattice(seed, stream, ix + 1, iy);
    std::int64_t v01 = lattice(seed, stream, ix, iy + 1);
    std::int64_t v11 = lattice(seed, stream, ix + 1, iy + 1);
    std::int64_t num = v00 * (period_raw - fx) * (period_raw - fy) +
                       v10 * fx * (period_raw - fy) +
                       v01 * (period_raw - fx) * fy +
                       v11 * fx * fy;
    return static_cast<int>(num / (period_raw * period_raw));
}

// Integer-only multi-octave texture so generated scenes are bit-identical
// across platforms. The single-pixel octave dithers every pixel, which
// keeps census descriptors distinctive even inside smooth cells. `layer`
// selects an independent texture (background/foreground/uncorrelated).
std::uint8_t texture_at(std::uint64_t seed, int layer, std::int64_t rx, std::int64_t ry) {
    int v = 8 * octave_value(seed, layer * 4 + 0, 16 * kDisparityScale, rx, ry) +
            4 * octave_value(seed, layer * 4 + 1, 8 * kDisparityScale, rx, ry) +
            2 * octave_value(seed, layer * 4 + 2, 4 * kDisparityScale, rx, ry) +
            1 * octave_value(seed, layer * 4 + 3, 1 * kDisparityScale, rx, ry);
    return static_cast<std::uint8_t>(v / 15);
}

TestScene make_scene(int width, int height) {
    TestScene s;
    s.left = GrayImage(width, height);
    s.right = GrayImage(width, height);
    s.truth = DisparityMap(width, height);
    s.occlusion.assign(static_cast<std::size_t>(width) * height, 0);
    return s;
}

}  // namespace

TestScene gen_test_scene(const SceneSpec& spec, int width, int height, std::uint64_t seed) {
    TestScene s = make_scene(width, height);

    switch (spec.kind) {
        case SceneKind::shift: {
            const std::int64_t d_raw = pixels_to_disparity(spec.d1);
            for (int y = 0; y < height; ++y) {
                for (int x = 0; x < width; ++x) {
                    std::int64_t rx = static_cast<std::int64_t>(x) * kDisparityScale;
                    std::int64_t ry = static_cast<std::int64_t>(y) * kDisparityScale;
                    s.left.at(x, y) = texture_at(seed, 0, rx, ry);
                    s.right.at(x, y) = texture_at(seed, 0, rx + d_raw, ry);
                    s.truth.at(x, y) = static_cast<FixedDisparity>(d_raw);
                    if (rx < d_raw) s.occlusion[static_cast<std::size_t>(y) * width + x] = 1;
                }
            }
            break;
        }
        case SceneKind::two_plane: {
            const std::int64_t d1_raw = pixels_to_disparity(spec.d1);
            const std::int64_t d2_raw = pixels_to_disparity(spec.d2);
            if (d2_raw <= d1_raw)
                throw std::invalid_argument(
                    "gen_test_scene: foreground disparity must exceed background");
            // Foreground rectangle, centered, in left-image coordinates.
            const int x0 = width / 4, x1 = width - width / 4;
            const int y0 = height / 4, y1 = height - height / 4;
            if (x0 >= x1 || y0 >= y1)
                throw std::invalid_argument("gen_test_scene: image too small for two planes");
            if (static_cast<std::int64_t>(x0) * kDisparityScale < d2_raw)
                throw std::invalid_argument(
                    "gen_test_scene: foreground leaves the right image");
            for (int y = 0; y < height; ++y) {
                const bool band_row = y >= y0 && y < y1;
                for (int x = 0; x < width; ++x) {
                    std::int64_t rx = static_cast<std::int64_t>(x) * kDisparityScale;
                    std::int64_t ry = static_cast<std::int64_t>(y) * kDisparityScale;
                    const bool in_rect = band_row && x >= x0 && x < x1;

                    s.left.at(x, y) = in_rect ? texture_at(seed, 1, rx, ry)
                                              : texture_at(seed, 0, rx, ry);

                    // A right-image pixel shows the foreground when the
                    // rectangle, shifted left by d2, covers it.
                    const bool right_fg = band_row &&
                                          rx + d2_raw >= static_cast<std::int64_t>(x0) * kDisparityScale &&
                                          rx + d2_raw < static_cast<std::int64_t>(x1) * kDisparityScale;
                    s.right.at(x, y) = right_fg ? texture_at(seed, 1, rx + d2_raw, ry)
                                                : texture_at(seed, 0, rx + d1_raw, ry);

                    const std::int64_t truth_raw = in_rect ? d2_raw : d1_raw;
                    s.truth.at(x, y) = static_cast<FixedDisparity>(truth_raw);

                    // Occluded: no counterpart in the right image. Either the
                    // match column is negative, or a background pixel's match
                    // is covered by the shifted foreground.
                    bool occluded = rx < truth_raw;
                    if (!occluded && !in_rect && band_row) {
                        std::int64_t match = rx - d1_raw;
                        occluded = match >= static_cast<std::int64_t>(x0) * kDisparityScale - d2_raw &&
                                   match < static_cast<std::int64_t>(x1) * kDisparityScale - d2_raw;
                    }
                    if (occluded) s.occlusion[static_cast<std::size_t>(y) * width + x] = 1;
                }
            }
            break;
        }
        case SceneKind::noise: {
            for (int y = 0; y < height; ++y) {
                for (int x = 0; x < width; ++x) {
                    std::int64_t rx = static_cast<std::int64_t>(x) * kDisparityScale;
                    std::int64_t ry = static_cast<std::int64_t>(y) * kDisparityScale;
                    s.left.at(x, y) = texture_at(seed, 0, rx, ry);
                    s.right.at(x, y) = texture_at(seed, 1, rx, ry);
                }
            }
            break;
        }
    }
    return s;
}

EvalMetrics evaluate(const DisparityMap& disp, const DisparityMap& truth,
                     const std::vector<std::uint8_t>* occlusion) {
    if (disp.width != truth.width || disp.height != truth.height)
        throw std::invalid_argument("evaluate: dimensions differ");
    if (occlusion && occlusion->size() != disp.size())
        throw std::invalid_argument("evaluate: occlusion mask size differs");

    EvalMetrics m;
    m.density = static_cast<double>(disp.valid_count()) / static_cast<double>(disp.size());

    double err_sum = 0.0;
    std::size_t err_count = 0;
    std::size_t rated = 0, bad05 = 0, bad10 = 0, bad20 = 0;
    for (std::size_t i = 0; i < disp.size(); ++i) {
        if (!disparity_valid(disp.data[i]) || !disparity_valid(truth.data[i])) continue;
        double err = std::abs(static_cast<double>(disp.data[i]) -
                              static_cast<double>(truth.data[i])) /
                     kDisparityScale;
        err_sum += err;
        ++err_count;
        if (occlusion && (*occlusion)[i]) continue;
        ++rated;
        if (err > 0.5) ++bad05;
        if (err > 1.0) ++bad10;
        if (err > 2.0) ++bad20;
    }
    if (err_count > 0) m.mae = err_sum / static_cast<double>(err_count);
    if (rated > 0) {
        m.bad_0_5 = static_cast<double>(bad05) / static_cast<double>(rated);
        m.bad_1_0 = static_cast<double>(bad10) / static_cast<double>(rated);
        m.bad_2_0 = static_cast<double>(bad20) / static_cast<double>(rated);
    }
    return m;
}

}  // namespace stereopipe
