#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "stereopipe/census.hpp"
#include "stereopipe/config.hpp"
#include "stereopipe/image_io.hpp"
#include "stereopipe/pipeline.hpp"
#include "stereopipe/scene.hpp"

namespace py = pybind11;
using namespace stereopipe;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using F32Array = py::array_t<float, py::array::c_style | py::array::forcecast>;
using I16Array = py::array_t<std::int16_t, py::array::c_style | py::array::forcecast>;

GrayImage to_gray(const U8Array& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D uint8 image array");
    GrayImage img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    std::memcpy(img.data.data(), a.data(), img.size());
    return img;
}

py::array_t<std::uint8_t> from_gray(const GrayImage& img) {
    py::array_t<std::uint8_t> a({img.height, img.width});
    std::memcpy(a.mutable_data(), img.data.data(), img.size());
    return a;
}

// Disparity maps cross the boundary as float32 arrays in pixels, with NaN
// marking invalid pixels. Incoming values are quantized to 1/16 px.
DisparityMap to_disp(const F32Array& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D float32 disparity array");
    DisparityMap map(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    const float* src = a.data();
    for (std::size_t i = 0; i < map.size(); ++i) {
        float v = src[i];
        map.data[i] = std::isfinite(v) && v >= 0.0f ? pixels_to_disparity(v)
                                                    : kInvalidDisparity;
    }
    return map;
}

py::array_t<float> from_disp(const DisparityMap& map) {
    py::array_t<float> a({map.height, map.width});
    float* dst = a.mutable_data();
    for (std::size_t i = 0; i < map.size(); ++i)
        dst[i] = disparity_valid(map.data[i])
                     ? static_cast<float>(map.data[i]) / kDisparityScale
                     : std::numeric_limits<float>::quiet_NaN();
    return a;
}

OffsetField to_field(const I16Array& dx, const I16Array& dy) {
    if (dx.ndim() != 2 || dy.ndim() != 2 || dx.shape(0) != dy.shape(0) ||
        dx.shape(1) != dy.shape(1))
        throw std::invalid_argument("offset arrays must be equal-shaped 2-D int16");
    OffsetField f(static_cast<int>(dx.shape(1)), static_cast<int>(dx.shape(0)));
    std::memcpy(f.dx.data(), dx.data(), f.dx.size() * sizeof(std::int16_t));
    std::memcpy(f.dy.data(), dy.data(), f.dy.size() * sizeof(std::int16_t));
    return f;
}

py::array_t<std::int16_t> from_plane(const std::vector<std::int16_t>& v, int w, int h) {
    py::array_t<std::int16_t> a({h, w});
    std::memcpy(a.mutable_data(), v.data(), v.size() * sizeof(std::int16_t));
    return a;
}

py::object optional_float(const std::optional<double>& v) {
    return v ? py::cast(*v) : py::none();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Semi-global stereo matching pipeline";

    py::enum_<Profile>(m, "Profile")
        .value("base", Profile::base)
        .value("pro", Profile::pro);

    py::class_<MatchConfig>(m, "MatchConfig")
        .def(py::init<>())
        .def_readwrite("penalty_small", &MatchConfig::penalty_small)
        .def_readwrite("penalty_large", &MatchConfig::penalty_large)
        .def_readwrite("disparity_offset", &MatchConfig::disparity_offset)
        .def_readwrite("iterations", &MatchConfig::iterations)
        .def_readwrite("parallelism", &MatchConfig::parallelism)
        .def("num_disparities", &MatchConfig::num_disparities)
        .def("validate", &MatchConfig::validate);

    py::class_<PostConfig>(m, "PostConfig")
        .def(py::init<>())
        .def_readwrite("uniqueness_num", &PostConfig::uniqueness_num)
        .def_readwrite("uniqueness_den", &PostConfig::uniqueness_den)
        .def_readwrite("uniqueness_exclude_neighbors", &PostConfig::uniqueness_exclude_neighbors)
        .def_readwrite("consistency_threshold", &PostConfig::consistency_threshold)
        .def("set_uniqueness", &PostConfig::set_uniqueness)
        .def("uniqueness", &PostConfig::uniqueness)
        .def("validate", &PostConfig::validate);

    py::class_<FilterConfig>(m, "FilterConfig")
        .def(py::init<>())
        .def_readwrite("texture_threshold", &FilterConfig::texture_threshold)
        .def_readwrite("texture_window", &FilterConfig::texture_window)
        .def_readwrite("speckle_window", &FilterConfig::speckle_window)
        .def_readwrite("speckle_max_diff", &FilterConfig::speckle_max_diff)
        .def_readwrite("max_gap", &FilterConfig::max_gap)
        .def_readwrite("gap_similarity", &FilterConfig::gap_similarity)
        .def_readwrite("median_min_valid", &FilterConfig::median_min_valid)
        .def("validate", &FilterConfig::validate);

    py::class_<StageToggles>(m, "StageToggles")
        .def(py::init<>())
        .def_readwrite("rectification", &StageToggles::rectification)
        .def_readwrite("uniqueness", &StageToggles::uniqueness)
        .def_readwrite("consistency", &StageToggles::consistency)
        .def_readwrite("texture", &StageToggles::texture)
        .def_readwrite("speckle", &StageToggles::speckle)
        .def_readwrite("gap", &StageToggles::gap)
        .def_readwrite("noise", &StageToggles::noise);

    py::class_<PipelineConfig>(m, "PipelineConfig")
        .def(py::init<>())
        .def_readwrite("match", &PipelineConfig::match)
        .def_readwrite("post", &PipelineConfig::post)
        .def_readwrite("filter", &PipelineConfig::filter)
        .def_readwrite("stages", &PipelineConfig::stages)
        .def_readwrite("profile", &PipelineConfig::profile)
        .def_readwrite("map_path", &PipelineConfig::map_path)
        .def_readwrite("threads", &PipelineConfig::threads)
        .def("set_profile", &PipelineConfig::set_profile)
        .def("validate", &PipelineConfig::validate);

    m.def("max_disparity", &max_disparity, py::arg("cfg"),
          "Largest searched disparity: o_d + n_i * p - 1.");

    m.def(
        "census_transform",
        [](const U8Array& img, int threads) {
            CensusImage c = census_transform(to_gray(img), threads);
            py::array_t<std::uint32_t> a({c.height, c.width});
            std::memcpy(a.mutable_data(), c.data.data(), c.data.size() * sizeof(std::uint32_t));
            return a;
        },
        py::arg("image"), py::arg("threads") = 1,
        "24-bit census descriptors over a 5x5 window.");

    m.def(
        "match",
        [](const U8Array& left, const U8Array& right, const PipelineConfig& cfg) {
            GrayImage l = to_gray(left), r = to_gray(right);
            DisparityMap d;
            {
                py::gil_scoped_release release;
                d = run_pipeline(l, r, cfg);
            }
            return from_disp(d);
        },
        py::arg("left"), py::arg("right"), py::arg("config") = PipelineConfig{},
        "Full pipeline; returns disparities in px as float32, NaN = invalid.");

    m.def(
        "remap",
        [](const U8Array& img, const I16Array& dx, const I16Array& dy, int threads) {
            return from_gray(remap(to_gray(img), to_field(dx, dy), threads));
        },
        py::arg("image"), py::arg("dx"), py::arg("dy"), py::arg("threads") = 1,
        "Bilinear remap by a per-pixel displacement field (int16, 1/16 px units).");

    m.def(
        "gen_scene",
        [](const std::string& kind, int width, int height, std::uint64_t seed, double d1,
           double d2) {
            SceneSpec spec;
            if (kind == "shift")
                spec = SceneSpec::shifted(d1);
            else if (kind == "two-plane")
                spec = SceneSpec::two_plane(d1, d2);
            else if (kind == "noise")
                spec = SceneSpec::noise();
            else
                throw std::invalid_argument("kind must be 'shift', 'two-plane' or 'noise'");
            TestScene s = gen_test_scene(spec, width, height, seed);
            py::dict out;
            out["left"] = from_gray(s.left);
            out["right"] = from_gray(s.right);
            out["truth"] = from_disp(s.truth);
            py::array_t<bool> occ({s.left.height, s.left.width});
            for (std::size_t i = 0; i < s.occlusion.size(); ++i)
                occ.mutable_data()[i] = s.occlusion[i] != 0;
            out["occlusion"] = occ;
            return out;
        },
        py::arg("kind"), py::arg("width"), py::arg("height"), py::arg("seed") = 1,
        py::arg("d1") = 6.0, py::arg("d2") = 0.0,
        "Synthetic stereo pair with analytic ground truth and occlusion mask.");

    m.def(
        "evaluate",
        [](const F32Array& disp, const F32Array& truth, py::object occlusion) {
            std::vector<std::uint8_t> occ;
            const std::vector<std::uint8_t>* occ_ptr = nullptr;
            if (!occlusion.is_none()) {
                auto mask = occlusion.cast<py::array_t<bool, py::array::c_style |
                                                                 py::array::forcecast>>();
                occ.resize(static_cast<std::size_t>(mask.size()));
                for (py::ssize_t i = 0; i < mask.size(); ++i) occ[i] = mask.data()[i] ? 1 : 0;
                occ_ptr = &occ;
            }
            EvalMetrics e = evaluate(to_disp(disp), to_disp(truth), occ_ptr);
            py::dict out;
            out["density"] = e.density;
            out["mae"] = optional_float(e.mae);
            out["bad_0_5"] = optional_float(e.bad_0_5);
            out["bad_1_0"] = optional_float(e.bad_1_0);
            out["bad_2_0"] = optional_float(e.bad_2_0);
            return out;
        },
        py::arg("disparity"), py::arg("truth"), py::arg("occlusion") = py::none(),
        "Density, mean absolute error and bad-pixel rates against ground truth.");

    m.def(
        "apply_config",
        [](PipelineConfig& cfg, const std::string& text) {
            apply_config_text(cfg, text, "<python>");
        },
        py::arg("config"), py::arg("text"), "Apply key=value configuration text.");

    m.def("load_pgm", [](const std::string& path) { return from_gray(load_pgm_file(path)); },
          py::arg("path"));
    m.def(
        "save_pgm",
        [](const std::string& path, const U8Array& img) { save_pgm_file(path, to_gray(img)); },
        py::arg("path"), py::arg("image"));
    m.def(
        "load_disparity",
        [](const std::string& path) { return from_disp(load_disparity_file(path)); },
        py::arg("path"), "Load a .pfm or 16-bit .pgm disparity map.");
    m.def(
        "save_disparity",
        [](const std::string& path, const F32Array& disp) {
            save_disparity_file(path, to_disp(disp));
        },
        py::arg("path"), py::arg("disparity"));

    m.def(
        "load_map",
        [](const std::string& path) {
            RectificationMap map = load_map_file(path);
            return py::make_tuple(from_plane(map.left.dx, map.width(), map.height()),
                                  from_plane(map.left.dy, map.width(), map.height()),
                                  from_plane(map.right.dx, map.width(), map.height()),
                                  from_plane(map.right.dy, map.width(), map.height()));
        },
        py::arg("path"), "Load an RMAP1 map as (left_dx, left_dy, right_dx, right_dy).");
    m.def(
        "save_map",
        [](const std::string& path, const I16Array& ldx, const I16Array& ldy,
           const I16Array& rdx, const I16Array& rdy) {
            RectificationMap map{to_field(ldx, ldy), to_field(rdx, rdy)};
            if (map.left.width != map.right.width || map.left.height != map.right.height)
                throw std::invalid_argument("left and right fields must be equal-shaped");
            save_map_file(path, map);
        },
        py::arg("path"), py::arg("left_dx"), py::arg("left_dy"), py::arg("right_dx"),
        py::arg("right_dy"));
}
