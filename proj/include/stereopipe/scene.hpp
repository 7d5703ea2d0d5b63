#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stereopipe/image.hpp"

namespace stereopipe {

enum class SceneKind {
    shift,      // right = left shifted by a constant disparity
    two_plane,  // textured background plane plus a nearer rectangle
    noise,      // uncorrelated pair, nothing to match
};

struct SceneSpec {
    SceneKind kind = SceneKind::shift;
    double d1 = 6.0;  // shift amount, or background disparity
    double d2 = 0.0;  // foreground disparity (two_plane only)

    static SceneSpec shifted(double d) { return {SceneKind::shift, d, 0.0}; }
    static SceneSpec two_plane(double background, double foreground) {
        return {SceneKind::two_plane, background, foreground};
    }
    static SceneSpec noise() { return {SceneKind::noise, 0.0, 0.0}; }
};

/// A synthetic stereo pair with analytic ground truth. `occlusion` marks
/// (value 1) left pixels with no counterpart in the right image: the
/// occlusion band cast by a nearer object plus the strip that shifts out
/// of view at the left edge. Ground truth carries the geometric disparity
/// even for occluded pixels; the noise scene's truth is all invalid.
struct TestScene {
    GrayImage left;
    GrayImage right;
    DisparityMap truth;
    std::vector<std::uint8_t> occlusion;
};

/// Deterministic in (spec, width, height, seed); texture is multi-octave
/// value noise so census descriptors are informative everywhere.
TestScene gen_test_scene(const SceneSpec& spec, int width, int height, std::uint64_t seed);

/// Quality metrics against ground truth. Rates are fractions in [0, 1].
/// Error metrics are absent when no pixel qualifies for them.
struct EvalMetrics {
    double density = 0.0;              // valid fraction of all pixels
    std::optional<double> mae;         // mean |error| px over valid & truth-valid
    std::optional<double> bad_0_5;     // |error| > threshold rates over
    std::optional<double> bad_1_0;     //   valid & truth-valid & non-occluded
    std::optional<double> bad_2_0;
};

EvalMetrics evaluate(const DisparityMap& disp, const DisparityMap& truth,
                     const std::vector<std::uint8_t>* occlusion = nullptr);

}  // namespace stereopipe
