#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "stereopipe/config.hpp"
#include "stereopipe/image_io.hpp"
#include "stereopipe/pipeline.hpp"
#include "stereopipe/scene.hpp"

namespace {

using namespace stereopipe;

/// Command-line value errors; reported as usage (exit 1), unlike data
/// errors (exit 2).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double strict_double(std::string_view s, const char* what) {
    double out = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw UsageError(std::string(what) + ": expected a number, got '" + std::string(s) + "'");
    return out;
}

long strict_long(std::string_view s, const char* what) {
    long out = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw UsageError(std::string(what) + ": expected an integer, got '" + std::string(s) + "'");
    return out;
}

std::pair<int, int> parse_size(const std::string& s) {
    std::size_t x = s.find('x');
    if (x == std::string::npos)
        throw UsageError("--size: expected WIDTHxHEIGHT, got '" + s + "'");
    int w = static_cast<int>(strict_long(std::string_view(s).substr(0, x), "--size"));
    int h = static_cast<int>(strict_long(std::string_view(s).substr(x + 1), "--size"));
    if (w < 1 || h < 1 || w > kMaxImageDim || h > kMaxImageDim)
        throw UsageError("--size: dimensions must be within 1.." + std::to_string(kMaxImageDim));
    return {w, h};
}

SceneSpec parse_kind(const std::string& s) {
    std::size_t colon = s.find(':');
    std::string name = s.substr(0, colon);
    std::string args = colon == std::string::npos ? "" : s.substr(colon + 1);
    if (name == "shift") {
        if (args.empty()) throw UsageError("--kind: shift needs a disparity, e.g. shift:6");
        return SceneSpec::shifted(strict_double(args, "--kind"));
    }
    if (name == "two-plane") {
        std::size_t comma = args.find(',');
        if (comma == std::string::npos)
            throw UsageError("--kind: two-plane needs two disparities, e.g. two-plane:4,20");
        double d1 = strict_double(std::string_view(args).substr(0, comma), "--kind");
        double d2 = strict_double(std::string_view(args).substr(comma + 1), "--kind");
        return SceneSpec::two_plane(d1, d2);
    }
    if (name == "noise") {
        if (!args.empty()) throw UsageError("--kind: noise takes no arguments");
        return SceneSpec::noise();
    }
    throw UsageError("--kind: unknown scene kind '" + name + "'");
}

// ---------------------------------------------------------------- match --

struct MatchArgs {
    std::string left, right;
    std::string config_path;
    std::string out = "disparity.pfm";
    bool no_uniqueness = false, no_consistency = false, no_texture = false;
    bool no_speckle = false, no_gap = false, no_noise = false;
    int threads = -1;
};

PipelineConfig make_config(const std::string& config_path) {
    PipelineConfig cfg;
    if (!config_path.empty()) apply_config_file(cfg, config_path);
    return cfg;
}

int run_match(const MatchArgs& a) {
    PipelineConfig cfg = make_config(a.config_path);
    if (a.no_uniqueness) cfg.stages.uniqueness = false;
    if (a.no_consistency) cfg.stages.consistency = false;
    if (a.no_texture) cfg.stages.texture = false;
    if (a.no_speckle) cfg.stages.speckle = false;
    if (a.no_gap) cfg.stages.gap = false;
    if (a.no_noise) cfg.stages.noise = false;
    if (a.threads >= 0) cfg.threads = a.threads;

    GrayImage left = load_pgm_file(a.left);
    GrayImage right = load_pgm_file(a.right);
    DisparityMap disp = run_pipeline(left, right, cfg);
    save_disparity_file(a.out, disp);

    double density = 100.0 * static_cast<double>(disp.valid_count()) /
                     static_cast<double>(disp.size());
    std::printf("wrote %s (%dx%d, %.1f%% valid)\n", a.out.c_str(), disp.width, disp.height,
                density);
    return 0;
}

// -------------------------------------------------------------- rectify --

int run_rectify(const std::string& left_path, const std::string& right_path,
                const std::string& map_path, const std::string& prefix, int threads) {
    GrayImage left = load_pgm_file(left_path);
    GrayImage right = load_pgm_file(right_path);
    RectificationMap map = load_map_file(map_path);
    auto [rect_left, rect_right] = rectify_pair(left, right, map, threads);
    save_pgm_file(prefix + "_left.pgm", rect_left);
    save_pgm_file(prefix + "_right.pgm", rect_right);
    std::printf("wrote %s_left.pgm, %s_right.pgm\n", prefix.c_str(), prefix.c_str());
    return 0;
}

// --------------------------------------------------------------- genmap --

/// Triangle wave in t, centered on zero, with the given peak-to-peak span.
std::int16_t tri_wave(int t, int period, int span) {
    int phase = t % period;
    int half = period / 2;
    return static_cast<std::int16_t>(half - std::abs(phase - half) - span / 2);
}

int run_genmap(bool identity, int width, int height, const std::string& out) {
    RectificationMap map;
    map.left = OffsetField(width, height);
    map.right = OffsetField(width, height);
    if (!identity) {
        // Smooth piecewise-linear displacement fields, a few pixels in
        // magnitude, different per camera so both streams get exercised.
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                std::size_t i = static_cast<std::size_t>(y) * width + x;
                map.left.dx[i] = tri_wave(x + 2 * y, 160, 80);
                map.left.dy[i] = tri_wave(2 * x + 3 * y + 37, 160, 80);
                map.right.dx[i] = tri_wave(x + 2 * y + 53, 160, 80);
                map.right.dy[i] = tri_wave(2 * x + 3 * y + 91, 160, 80);
            }
        }
    }
    save_map_file(out, map);
    std::printf("wrote %s (%dx%d, %s)\n", out.c_str(), width, height,
                identity ? "identity" : "synthetic");
    return 0;
}

// ------------------------------------------------------------- genscene --

int run_genscene(const std::string& kind, const std::string& size, std::uint64_t seed,
                 const std::string& prefix) {
    SceneSpec spec = parse_kind(kind);
    auto [w, h] = parse_size(size);
    TestScene scene = gen_test_scene(spec, w, h, seed);

    save_pgm_file(prefix + "_left.pgm", scene.left);
    save_pgm_file(prefix + "_right.pgm", scene.right);
    save_disparity_file(prefix + "_truth.pfm", scene.truth);
    GrayImage mask(w, h);
    for (std::size_t i = 0; i < mask.size(); ++i)
        mask.data[i] = scene.occlusion[i] ? 255 : 0;
    save_pgm_file(prefix + "_occlusion.pgm", mask);
    std::printf("wrote %s_{left,right}.pgm, %s_truth.pfm, %s_occlusion.pgm\n", prefix.c_str(),
                prefix.c_str(), prefix.c_str());
    return 0;
}

// ---------------------------------------------------------------- bench --

int run_bench(const std::string& size, int range, int frames, const std::string& config_path,
              int threads) {
    PipelineConfig cfg = make_config(config_path);
    if (threads >= 0) cfg.threads = threads;
    if (range < cfg.match.parallelism || range % cfg.match.parallelism != 0)
        throw UsageError("--range must be a positive multiple of the parallelism (" +
                         std::to_string(cfg.match.parallelism) + ")");
    cfg.match.iterations = range / cfg.match.parallelism;
    if (frames < 1) throw UsageError("--frames must be >= 1");

    auto [w, h] = parse_size(size);
    TestScene scene = gen_test_scene(SceneSpec::shifted(12.25), w, h, 1);
    std::vector<std::pair<GrayImage, GrayImage>> pairs;
    pairs.emplace_back(std::move(scene.left), std::move(scene.right));

    BenchReport report = benchmark(pairs, cfg, frames);

    std::printf("  %-28s %s\n", "field", "value");
    std::printf("  %-28s %s\n", "----------------------------", "------------");
    std::printf("  %-28s %d\n", "frames", report.frames);
    std::printf("  %-28s %dx%d\n", "image", report.width, report.height);
    std::printf("  %-28s %d\n", "disparity range", range);
    std::printf("  %-28s %.3f\n", "wall time [s]", report.wall_time);
    std::printf("  %-28s %.3f\n", "frame rate [fps]", report.frame_rate);
    std::printf("  %-28s %.4g\n", "output disparities [1/s]", report.output_disparities_per_s);
    std::printf("  %-28s %.4g\n", "disparity evals [1/s]", report.disparity_evals_per_s);
    std::printf("\n");
    // Machine-readable block; full double precision so the identity
    // disparity_evals_per_s = output_disparities_per_s * n_i * p survives
    // a parse round-trip.
    std::printf("frames=%d\n", report.frames);
    std::printf("width=%d\n", report.width);
    std::printf("height=%d\n", report.height);
    std::printf("n_i=%d\n", cfg.match.iterations);
    std::printf("p=%d\n", cfg.match.parallelism);
    std::printf("wall_time=%.17g\n", report.wall_time);
    std::printf("frame_rate=%.17g\n", report.frame_rate);
    std::printf("output_disparities_per_s=%.17g\n", report.output_disparities_per_s);
    std::printf("disparity_evals_per_s=%.17g\n", report.disparity_evals_per_s);
    return 0;
}

// ----------------------------------------------------------------- eval --

int run_eval(const std::string& disp_path, const std::string& truth_path,
             const std::string& mask_path) {
    DisparityMap disp = load_disparity_file(disp_path);
    DisparityMap truth = load_disparity_file(truth_path);
    std::vector<std::uint8_t> occlusion;
    const std::vector<std::uint8_t>* occ = nullptr;
    if (!mask_path.empty()) {
        GrayImage mask = load_pgm_file(mask_path);
        if (mask.width != disp.width || mask.height != disp.height)
            throw IoError("eval: mask dimensions differ from disparity map");
        occlusion.resize(mask.size());
        for (std::size_t i = 0; i < mask.size(); ++i) occlusion[i] = mask.data[i] ? 1 : 0;
        occ = &occlusion;
    }

    EvalMetrics m = evaluate(disp, truth, occ);
    std::printf("density=%.6f\n", m.density);
    if (m.mae) std::printf("mae=%.6f\n", *m.mae);
    if (m.bad_0_5) std::printf("bad_0.5=%.6f\n", *m.bad_0_5);
    if (m.bad_1_0) std::printf("bad_1.0=%.6f\n", *m.bad_1_0);
    if (m.bad_2_0) std::printf("bad_2.0=%.6f\n", *m.bad_2_0);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stereopipe: semi-global stereo matching pipeline"};
    app.require_subcommand(0, 1);
    bool show_config_keys = false;
    app.add_flag("--config-keys", show_config_keys,
                 "list the key=value settings accepted by --config files");

    MatchArgs match_args;
    CLI::App* match_cmd = app.add_subcommand("match", "Compute a disparity map for a pair");
    match_cmd->add_option("left", match_args.left, "left image (PGM)")->required();
    match_cmd->add_option("right", match_args.right, "right image (PGM)")->required();
    match_cmd->add_option("-c,--config", match_args.config_path, "key=value config file");
    match_cmd->add_option("-o,--output", match_args.out, "output map (.pfm or .pgm)")
        ->capture_default_str();
    match_cmd->add_option("-t,--threads", match_args.threads, "worker threads (0 = auto)");
    match_cmd->add_flag("--no-uniqueness", match_args.no_uniqueness, "skip the uniqueness check");
    match_cmd->add_flag("--no-consistency", match_args.no_consistency,
                        "skip the consistency check");
    match_cmd->add_flag("--no-texture", match_args.no_texture, "skip the texture filter");
    match_cmd->add_flag("--no-speckle", match_args.no_speckle, "skip the speckle filter");
    match_cmd->add_flag("--no-gap", match_args.no_gap, "skip gap interpolation");
    match_cmd->add_flag("--no-noise", match_args.no_noise, "skip the noise filter");

    std::string rect_left, rect_right, rect_map, rect_prefix;
    int rect_threads = 1;
    CLI::App* rectify_cmd = app.add_subcommand("rectify", "Rectify a pair with an RMAP1 map");
    rectify_cmd->add_option("left", rect_left, "left image (PGM)")->required();
    rectify_cmd->add_option("right", rect_right, "right image (PGM)")->required();
    rectify_cmd->add_option("map", rect_map, "rectification map (RMAP1)")->required();
    rectify_cmd->add_option("-o,--output", rect_prefix, "output prefix")->required();
    rectify_cmd->add_option("-t,--threads", rect_threads, "worker threads (0 = auto)");

    bool genmap_identity = false, genmap_synthetic = false;
    int genmap_w = 0, genmap_h = 0;
    std::string genmap_out;
    CLI::App* genmap_cmd = app.add_subcommand("genmap", "Generate a rectification map");
    genmap_cmd->add_flag("--identity", genmap_identity, "all-zero displacements");
    genmap_cmd->add_flag("--synthetic", genmap_synthetic, "smooth synthetic displacements");
    genmap_cmd->add_option("width", genmap_w, "map width")->required();
    genmap_cmd->add_option("height", genmap_h, "map height")->required();
    genmap_cmd->add_option("-o,--output", genmap_out, "output map file")->required();

    std::string scene_kind, scene_size = "640x480", scene_prefix;
    std::uint64_t scene_seed = 1;
    CLI::App* genscene_cmd = app.add_subcommand("genscene", "Generate a synthetic test scene");
    genscene_cmd
        ->add_option("--kind", scene_kind, "shift:<d> | two-plane:<d1>,<d2> | noise")
        ->required();
    genscene_cmd->add_option("--size", scene_size, "image size WIDTHxHEIGHT")->capture_default_str();
    genscene_cmd->add_option("--seed", scene_seed, "texture seed")->capture_default_str();
    genscene_cmd->add_option("-o,--output", scene_prefix, "output file prefix")->required();

    std::string bench_size = "640x480", bench_config;
    int bench_range = 128, bench_frames = 5, bench_threads = -1;
    CLI::App* bench_cmd = app.add_subcommand("bench", "Benchmark the full pipeline");
    bench_cmd->add_option("--size", bench_size, "image size WIDTHxHEIGHT")->capture_default_str();
    bench_cmd->add_option("--range", bench_range, "disparity range (multiple of p)")->capture_default_str();
    bench_cmd->add_option("--frames", bench_frames, "frames to process")->capture_default_str();
    bench_cmd->add_option("-c,--config", bench_config, "key=value config file");
    bench_cmd->add_option("-t,--threads", bench_threads, "worker threads (0 = auto)");

    std::string eval_disp, eval_truth, eval_mask;
    CLI::App* eval_cmd = app.add_subcommand("eval", "Compare a disparity map to ground truth");
    eval_cmd->add_option("disparity", eval_disp, "computed map (.pfm or .pgm)")->required();
    eval_cmd->add_option("truth", eval_truth, "ground truth map (.pfm or .pgm)")->required();
    eval_cmd->add_option("--mask", eval_mask, "occlusion mask (PGM, nonzero = occluded)");

    try {
        app.parse(argc, argv);

        if (show_config_keys) {
            std::fputs(config_keys_help().c_str(), stdout);
            return 0;
        }
        if (match_cmd->parsed()) return run_match(match_args);
        if (rectify_cmd->parsed())
            return run_rectify(rect_left, rect_right, rect_map, rect_prefix, rect_threads);
        if (genmap_cmd->parsed()) {
            if (genmap_identity == genmap_synthetic)
                throw UsageError("genmap: pass exactly one of --identity, --synthetic");
            if (genmap_w < 1 || genmap_h < 1 || genmap_w > kMaxImageDim ||
                genmap_h > kMaxImageDim)
                throw UsageError("genmap: dimensions must be within 1.." +
                                 std::to_string(kMaxImageDim));
            return run_genmap(genmap_identity, genmap_w, genmap_h, genmap_out);
        }
        if (genscene_cmd->parsed())
            return run_genscene(scene_kind, scene_size, scene_seed, scene_prefix);
        if (bench_cmd->parsed())
            return run_bench(bench_size, bench_range, bench_frames, bench_config,
                             bench_threads);
        if (eval_cmd->parsed()) return run_eval(eval_disp, eval_truth, eval_mask);
        throw UsageError("a subcommand is required (see --help)");
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
