#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "doctest.h"
#include "reference.hpp"
#include "stereopipe/census.hpp"
#include "stereopipe/config.hpp"
#include "stereopipe/pipeline.hpp"
#include "stereopipe/scene.hpp"

using namespace stereopipe;

TEST_CASE("scene: generation is seed-deterministic") {
    TestScene a = gen_test_scene(SceneSpec::shifted(6.0), 64, 48, 7);
    TestScene b = gen_test_scene(SceneSpec::shifted(6.0), 64, 48, 7);
    CHECK(a.left.data == b.left.data);
    CHECK(a.right.data == b.right.data);
    CHECK(a.truth.data == b.truth.data);
    CHECK(a.occlusion == b.occlusion);

    TestScene c = gen_test_scene(SceneSpec::shifted(6.0), 64, 48, 8);
    CHECK(a.left.data != c.left.data);
}

TEST_CASE("scene: integer shift translates the texture exactly") {
    TestScene s = gen_test_scene(SceneSpec::shifted(6.0), 80, 40, 3);
    for (int y = 0; y < 40; ++y)
        for (int x = 0; x + 6 < 80; ++x) CHECK(s.right.at(x, y) == s.left.at(x + 6, y));
    for (FixedDisparity d : s.truth.data) CHECK(d == 96);
    // Left pixels with no right counterpart are exactly x < 6.
    for (int y = 0; y < 40; ++y)
        for (int x = 0; x < 80; ++x)
            CHECK(static_cast<int>(s.occlusion[static_cast<std::size_t>(y) * 80 + x]) ==
                  (x < 6 ? 1 : 0));
}

TEST_CASE("scene: fractional shift keeps the analytic truth") {
    TestScene s = gen_test_scene(SceneSpec::shifted(5.5), 64, 32, 9);
    for (FixedDisparity d : s.truth.data) CHECK(d == 88);
}

TEST_CASE("scene: two-plane geometry and the occlusion band") {
    // 160x120 with (4, 20): rectangle x in [40,120), y in [30,90); the
    // foreground occludes a 16-px-wide background band to its left.
    TestScene s = gen_test_scene(SceneSpec::two_plane(4.0, 20.0), 160, 120, 5);
    for (int y = 0; y < 120; ++y)
        for (int x = 0; x < 160; ++x) {
            bool in_rect = x >= 40 && x < 120 && y >= 30 && y < 90;
            CHECK(s.truth.at(x, y) == (in_rect ? 320 : 64));

            bool band_row = y >= 30 && y < 90;
            bool expect_occluded = band_row ? (x < 4 || (x >= 24 && x < 40)) : x < 4;
            CHECK(static_cast<int>(s.occlusion[static_cast<std::size_t>(y) * 160 + x]) ==
                  (expect_occluded ? 1 : 0));
        }
}

TEST_CASE("scene: two-plane validates its geometry") {
    CHECK_THROWS_AS(gen_test_scene(SceneSpec::two_plane(5.0, 5.0), 64, 48, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(gen_test_scene(SceneSpec::two_plane(2.0, 40.0), 64, 48, 1),
                    std::invalid_argument);  // foreground shifts out of view
}

TEST_CASE("scene: the noise scene has no valid truth") {
    TestScene s = gen_test_scene(SceneSpec::noise(), 32, 24, 2);
    CHECK(s.truth.valid_count() == 0);
    CHECK(s.left.data != s.right.data);
}

TEST_CASE("evaluate: perfect map scores perfectly") {
    TestScene s = gen_test_scene(SceneSpec::shifted(6.0), 40, 30, 1);
    EvalMetrics m = evaluate(s.truth, s.truth);
    CHECK(m.density == 1.0);
    REQUIRE(m.mae.has_value());
    CHECK(*m.mae == 0.0);
    REQUIRE(m.bad_0_5.has_value());
    CHECK(*m.bad_0_5 == 0.0);
    CHECK(*m.bad_1_0 == 0.0);
    CHECK(*m.bad_2_0 == 0.0);
}

TEST_CASE("evaluate: an all-invalid map has absent error metrics") {
    DisparityMap truth(10, 10);
    std::fill(truth.data.begin(), truth.data.end(), static_cast<FixedDisparity>(80));
    DisparityMap empty(10, 10);
    EvalMetrics m = evaluate(empty, truth);
    CHECK(m.density == 0.0);
    CHECK(!m.mae.has_value());
    CHECK(!m.bad_0_5.has_value());
    CHECK(!m.bad_1_0.has_value());
    CHECK(!m.bad_2_0.has_value());
}

TEST_CASE("evaluate: half the pixels off by 0.75 px") {
    DisparityMap truth(10, 1);
    std::fill(truth.data.begin(), truth.data.end(), static_cast<FixedDisparity>(80));
    DisparityMap disp = truth;
    for (int x = 0; x < 5; ++x) disp.at(x, 0) = 80 + 12;  // +0.75 px
    EvalMetrics m = evaluate(disp, truth);
    CHECK(m.density == 1.0);
    CHECK(*m.bad_0_5 == 0.5);
    CHECK(*m.bad_1_0 == 0.0);
    CHECK(*m.mae == doctest::Approx(0.375));
}

TEST_CASE("evaluate: occluded pixels do not count toward bad rates") {
    DisparityMap truth(4, 1);
    std::fill(truth.data.begin(), truth.data.end(), static_cast<FixedDisparity>(80));
    DisparityMap disp = truth;
    disp.at(0, 0) = 80 + 32;  // 2 px off, but occluded
    std::vector<std::uint8_t> occ = {1, 0, 0, 0};
    EvalMetrics m = evaluate(disp, truth, &occ);
    CHECK(*m.bad_0_5 == 0.0);
    // The mean error still sees every valid pixel.
    CHECK(*m.mae == doctest::Approx(0.5));
}

TEST_CASE("pipeline: with all post stages off it is exactly match + extract") {
    TestScene s = gen_test_scene(SceneSpec::shifted(6.0), 48, 36, 11);
    PipelineConfig cfg;
    cfg.set_profile(Profile::base);
    cfg.match.iterations = 2;  // 32 disparities
    cfg.stages.uniqueness = false;
    cfg.stages.consistency = false;
    cfg.stages.texture = false;
    cfg.stages.speckle = false;
    cfg.stages.gap = false;
    cfg.stages.noise = false;
    DisparityMap piped = run_pipeline(s.left, s.right, cfg);

    CensusImage cl = census_transform(s.left);
    CensusImage cr = census_transform(s.right);
    CostVolume raw = matching_cost(cl, cr, cfg.match);
    DisparityMap direct = extract_disparity(aggregate(raw, cfg.match), cfg.match);
    CHECK(piped.data == direct.data);
}

TEST_CASE("pipeline: stage failures name the stage") {
    GrayImage tiny(4, 4);
    PipelineConfig cfg;
    try {
        run_pipeline(tiny, tiny, cfg);
        FAIL("expected a census-stage error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("census") != std::string::npos);
    }
}

TEST_CASE("pipeline: rectification requires a map and accepts the identity") {
    TestScene s = gen_test_scene(SceneSpec::shifted(6.0), 48, 36, 13);
    PipelineConfig cfg;
    cfg.stages.rectification = true;
    CHECK_THROWS_AS(run_pipeline(s.left, s.right, cfg), std::invalid_argument);

    cfg.map = RectificationMap{OffsetField(48, 36), OffsetField(48, 36)};
    DisparityMap with_identity = run_pipeline(s.left, s.right, cfg);
    cfg.stages.rectification = false;
    DisparityMap without = run_pipeline(s.left, s.right, cfg);
    CHECK(with_identity.data == without.data);
}

TEST_CASE("pipeline: mismatched inputs are rejected") {
    PipelineConfig cfg;
    CHECK_THROWS_AS(run_pipeline(GrayImage(32, 24), GrayImage(24, 32), cfg),
                    std::invalid_argument);
}

TEST_CASE("pipeline: disabling removal stages never lowers density") {
    TestScene s = gen_test_scene(SceneSpec::two_plane(4.0, 20.0), 160, 120, 17);
    PipelineConfig all_on;
    double base_density = evaluate(run_pipeline(s.left, s.right, all_on), s.truth).density;

    for (int stage = 0; stage < 4; ++stage) {
        PipelineConfig cfg;
        if (stage == 0) cfg.stages.uniqueness = false;
        if (stage == 1) cfg.stages.consistency = false;
        if (stage == 2) cfg.stages.texture = false;
        if (stage == 3) cfg.stages.speckle = false;
        double density = evaluate(run_pipeline(s.left, s.right, cfg), s.truth).density;
        CHECK(density >= base_density);
    }

    // Gap interpolation only adds pixels, so switching it off can only
    // lower density.
    PipelineConfig no_gap;
    no_gap.stages.gap = false;
    double without_gap = evaluate(run_pipeline(s.left, s.right, no_gap), s.truth).density;
    CHECK(without_gap <= base_density);
}

TEST_CASE("pipeline: thread count never changes the output") {
    TestScene s = gen_test_scene(SceneSpec::two_plane(4.0, 20.0), 96, 72, 19);
    PipelineConfig one;
    one.threads = 1;
    PipelineConfig many;
    many.threads = 4;
    CHECK(run_pipeline(s.left, s.right, one).data ==
          run_pipeline(s.left, s.right, many).data);
}

TEST_CASE("pipeline: profile and parallelism must agree") {
    PipelineConfig cfg;
    cfg.match.parallelism = 16;  // profile still pro
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.set_profile(Profile::base);
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.match.parallelism == 16);
}

TEST_CASE("benchmark: a single frame pins frame_rate to 1/wall_time") {
    TestScene s = gen_test_scene(SceneSpec::shifted(6.0), 64, 48, 23);
    PipelineConfig cfg;
    cfg.set_profile(Profile::base);
    cfg.match.iterations = 1;
    std::vector<std::pair<GrayImage, GrayImage>> pairs;
    pairs.emplace_back(s.left, s.right);
    BenchReport r = benchmark(pairs, cfg, 1);
    CHECK(r.frames == 1);
    CHECK(r.width == 64);
    CHECK(r.height == 48);
    CHECK(r.wall_time > 0.0);
    CHECK(r.frame_rate == 1.0 / r.wall_time);
}

TEST_CASE("benchmark: the throughput identity holds exactly") {
    TestScene s = gen_test_scene(SceneSpec::shifted(6.0), 64, 48, 29);
    std::vector<std::pair<GrayImage, GrayImage>> pairs;
    pairs.emplace_back(s.left, s.right);

    for (auto [ni, profile] : {std::pair{4, Profile::pro}, {3, Profile::base},
                               {1, Profile::pro}}) {
        PipelineConfig cfg;
        cfg.set_profile(profile);
        cfg.match.iterations = ni;
        BenchReport r = benchmark(pairs, cfg, 2);
        CHECK(r.frames == 2);
        CHECK(r.output_disparities_per_s == 64 * 48 * r.frame_rate);
        CHECK(r.disparity_evals_per_s ==
              r.output_disparities_per_s * (ni * cfg.match.parallelism));
    }
}

TEST_CASE("benchmark: input validation") {
    PipelineConfig cfg;
    std::vector<std::pair<GrayImage, GrayImage>> none;
    CHECK_THROWS_AS(benchmark(none, cfg, 1), std::invalid_argument);

    TestScene s = gen_test_scene(SceneSpec::shifted(6.0), 32, 24, 1);
    std::vector<std::pair<GrayImage, GrayImage>> pairs;
    pairs.emplace_back(s.left, s.right);
    CHECK_THROWS_AS(benchmark(pairs, cfg, 0), std::invalid_argument);
}

TEST_CASE("config: keys mirror the pipeline symbols") {
    PipelineConfig cfg;
    apply_config_text(cfg,
                      "# smoothness\n"
                      "P1 = 7\n"
                      "P2=200\n"
                      "o_d = 2\n"
                      "n_i = 2\n"
                      "p = 16  # base profile\n"
                      "q = 1.25\n"
                      "t_c = 2\n"
                      "t_t = 55\n"
                      "w_s = 30\n"
                      "l_max = 4\n"
                      "\n"
                      "noise = off\n");
    CHECK(cfg.match.penalty_small == 7);
    CHECK(cfg.match.penalty_large == 200);
    CHECK(cfg.match.disparity_offset == 2);
    CHECK(cfg.match.iterations == 2);
    CHECK(cfg.match.parallelism == 16);
    CHECK(cfg.profile == Profile::base);
    CHECK(cfg.post.uniqueness_num * 4 == cfg.post.uniqueness_den * 5);
    CHECK(cfg.post.consistency_threshold == 2);
    CHECK(cfg.filter.texture_threshold == 55);
    CHECK(cfg.filter.speckle_window == 30);
    CHECK(cfg.filter.max_gap == 4);
    CHECK(cfg.stages.noise == false);
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config: t_c=inf disables the consistency check") {
    PipelineConfig cfg;
    apply_config_text(cfg, "t_c = inf\n");
    CHECK(cfg.post.consistency_threshold == kConsistencyDisabled);
}

TEST_CASE("config: pixel-unit keys convert to sixteenths") {
    PipelineConfig cfg;
    apply_config_text(cfg, "speckle_max_diff = 0.5\ngap_similarity = 2.0\n");
    CHECK(cfg.filter.speckle_max_diff == 8);
    CHECK(cfg.filter.gap_similarity == 32);
}

TEST_CASE("config: errors carry the source line and key") {
    PipelineConfig cfg;
    try {
        apply_config_text(cfg, "P1 = 5\nbogus_key = 1\n", "test.cfg");
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("test.cfg:2") != std::string::npos);
        CHECK(msg.find("bogus_key") != std::string::npos);
    }
    CHECK_THROWS_AS(apply_config_text(cfg, "P1 = banana\n"), ConfigError);
    CHECK_THROWS_AS(apply_config_text(cfg, "no equals sign\n"), ConfigError);
    CHECK_THROWS_AS(apply_config_text(cfg, "q = 0.5\n"), ConfigError);
    CHECK_THROWS_AS(apply_config_text(cfg, "p = 20\n"), ConfigError);
    CHECK_THROWS_AS(apply_config_text(cfg, "noise = maybe\n"), ConfigError);
}

TEST_CASE("config: the key listing mentions every public symbol") {
    std::string help = config_keys_help();
    for (const char* key : {"P1", "P2", "o_d", "n_i", "q", "t_c", "t_t", "w_s", "l_max"})
        CHECK(help.find(key) != std::string::npos);
}
