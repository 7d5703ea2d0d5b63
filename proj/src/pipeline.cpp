#include "stereopipe/pipeline.hpp"

#include <chrono>
#include <stdexcept>
#include <tuple>

#include "stereopipe/census.hpp"

namespace stereopipe {

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage ") + name + ": " + e.what());
    }
}

}  // namespace

void PipelineConfig::set_profile(Profile p) {
    profile = p;
    match.parallelism = p == Profile::base ? 16 : 32;
}

void PipelineConfig::validate() const {
    match.validate();
    post.validate();
    filter.validate();
    if (threads < 0)
        throw std::invalid_argument("PipelineConfig: threads must be >= 0");
    int expected = profile == Profile::base ? 16 : 32;
    if (match.parallelism != expected)
        throw std::invalid_argument("PipelineConfig: parallelism does not match profile");
}

DisparityMap run_pipeline(const GrayImage& left, const GrayImage& right,
                          const PipelineConfig& cfg) {
    cfg.validate();
    if (left.width != right.width || left.height != right.height)
        throw std::invalid_argument("run_pipeline: image dimensions differ");
    const int threads = cfg.threads;

    GrayImage l = left;
    GrayImage r = right;
    if (cfg.stages.rectification) {
        RectificationMap loaded;
        const RectificationMap* map = nullptr;
        if (cfg.map) {
            map = &*cfg.map;
        } else if (!cfg.map_path.empty()) {
            loaded = stage("rectify", [&] { return load_map_file(cfg.map_path); });
            map = &loaded;
        } else {
            throw std::invalid_argument("run_pipeline: rectification enabled without a map");
        }
        std::tie(l, r) = stage("rectify", [&] { return rectify_pair(l, r, *map, threads); });
    }

    CensusImage cl = stage("census", [&] { return census_transform(l, threads); });
    CensusImage cr = stage("census", [&] { return census_transform(r, threads); });
    CostVolume raw =
        stage("matching-cost", [&] { return matching_cost(cl, cr, cfg.match, threads); });
    CostVolume agg = stage("aggregate", [&] { return aggregate(raw, cfg.match, threads); });
    raw = CostVolume{};

    DisparityMap disp =
        stage("extract", [&] { return extract_disparity(agg, cfg.match, threads); });
    if (cfg.stages.uniqueness)
        disp = stage("uniqueness",
                     [&] { return uniqueness_check(agg, disp, cfg.post, threads); });
    if (cfg.stages.consistency)
        disp = stage("consistency", [&] {
            return consistency_check(agg, disp, cfg.match, cfg.post.consistency_threshold,
                                     threads);
        });
    agg = CostVolume{};

    if (cfg.stages.texture)
        disp = stage("texture", [&] { return texture_filter(disp, l, cfg.filter, threads); });
    if (cfg.stages.speckle)
        disp = stage("speckle", [&] { return speckle_filter(disp, cfg.filter); });
    if (cfg.stages.gap)
        disp = stage("gap", [&] { return gap_interpolation(disp, cfg.filter, threads); });
    if (cfg.stages.noise)
        disp = stage("noise", [&] { return noise_filter(disp, cfg.filter, threads); });
    return disp;
}

BenchReport benchmark(const std::vector<std::pair<GrayImage, GrayImage>>& pairs,
                      const PipelineConfig& cfg, int repetitions) {
    if (pairs.empty())
        throw std::invalid_argument("benchmark: no image pairs");
    if (repetitions < 1)
        throw std::invalid_argument("benchmark: repetitions must be >= 1");
    cfg.validate();

    const int w = pairs.front().first.width;
    const int h = pairs.front().first.height;
    for (const auto& p : pairs)
        if (p.first.width != w || p.first.height != h || p.second.width != w ||
            p.second.height != h)
            throw std::invalid_argument("benchmark: image pairs differ in size");

    // Resolve the map once so no disk IO lands inside the timed loop.
    PipelineConfig run_cfg = cfg;
    if (run_cfg.stages.rectification && !run_cfg.map && !run_cfg.map_path.empty())
        run_cfg.map = load_map_file(run_cfg.map_path);

    const auto t0 = std::chrono::steady_clock::now();
    for (int rep = 0; rep < repetitions; ++rep)
        for (const auto& p : pairs) run_pipeline(p.first, p.second, run_cfg);
    const auto t1 = std::chrono::steady_clock::now();

    BenchReport report;
    report.frames = static_cast<int>(pairs.size()) * repetitions;
    report.wall_time = std::chrono::duration<double>(t1 - t0).count();
    if (report.wall_time <= 0.0) report.wall_time = 1e-9;  // below clock resolution
    report.frame_rate = report.frames / report.wall_time;
    report.width = w;
    report.height = h;
    report.output_disparities_per_s = static_cast<double>(w) * h * report.frame_rate;
    report.disparity_evals_per_s =
        report.output_disparities_per_s * (cfg.match.iterations * cfg.match.parallelism);
    return report;
}

}  // namespace stereopipe
