#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stereopipe/cost_post.hpp"
#include "stereopipe/disp_post.hpp"
#include "stereopipe/rectify.hpp"
#include "stereopipe/sgm.hpp"

namespace stereopipe {

/// Device profile: the base device correlates 16 disparities per clock,
/// the pro device 32.
enum class Profile { base, pro };

/// Every stage after cost aggregation can be switched off for ablation;
/// rectification is off unless a map is supplied.
struct StageToggles {
    bool rectification = false;
    bool uniqueness = true;
    bool consistency = true;
    bool texture = true;
    bool speckle = true;
    bool gap = true;
    bool noise = true;
};

struct PipelineConfig {
    MatchConfig match;
    PostConfig post;
    FilterConfig filter;
    StageToggles stages;
    Profile profile = Profile::pro;
    std::string map_path;                 // rectification map on disk
    std::optional<RectificationMap> map;  // in-memory map; wins over map_path
    int threads = 1;                      // 0 = hardware concurrency

    /// Sets the profile and the matching parallelism together.
    void set_profile(Profile p);

    void validate() const;
};

/// Full frame pipeline: rectify? -> census -> matching cost -> aggregate
/// -> extract -> uniqueness? -> consistency? -> texture? -> speckle? ->
/// gap? -> noise?. Errors from a stage are rethrown with the stage named.
DisparityMap run_pipeline(const GrayImage& left, const GrayImage& right,
                          const PipelineConfig& cfg);

struct BenchReport {
    int frames = 0;
    double wall_time = 0.0;                  // seconds of pipeline work, no disk IO
    double frame_rate = 0.0;                 // frames / wall_time
    double output_disparities_per_s = 0.0;   // width * height * frame_rate
    double disparity_evals_per_s = 0.0;      // output_disparities_per_s * n_i * p
    int width = 0;
    int height = 0;
};

/// Times repeated full-pipeline runs over the given pairs. Only compute is
/// timed; callers load images and maps beforehand. The derived report
/// fields satisfy disparity_evals_per_s = output_disparities_per_s * n_i * p
/// exactly.
BenchReport benchmark(const std::vector<std::pair<GrayImage, GrayImage>>& pairs,
                      const PipelineConfig& cfg, int repetitions);

}  // namespace stereopipe
