#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "shadowroad/color_space.hpp"
#include "shadowroad/metrics.hpp"
#include "shadowroad/morphology.hpp"
#include "shadowroad/pipeline.hpp"
#include "shadowroad/road_color.hpp"
#include "shadowroad/shadow.hpp"
#include "shadowroad/svm.hpp"
#include "shadowroad/synth.hpp"

namespace py = pybind11;
using namespace shadowroad;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using BoolArray = py::array_t<bool, py::array::c_style | py::array::forcecast>;

RgbImage to_rgb(const DoubleArray& a) {
    if (a.ndim() != 3 || a.shape(2) != 3) throw Error("expected an (H, W, 3) float array");
    RgbImage img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    std::copy(a.data(), a.data() + a.size(), img.data().begin());
    return img;
}

HsvImage to_hsv(const DoubleArray& a) {
    if (a.ndim() != 3 || a.shape(2) != 3) throw Error("expected an (H, W, 3) float array");
    HsvImage img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    std::copy(a.data(), a.data() + a.size(), img.data().begin());
    return img;
}

GrayMap to_gray(const DoubleArray& a) {
    if (a.ndim() != 2) throw Error("expected an (H, W) float array");
    GrayMap map(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    std::copy(a.data(), a.data() + a.size(), map.data().begin());
    return map;
}

BinaryMask to_mask(const BoolArray& a) {
    if (a.ndim() != 2) throw Error("expected an (H, W) bool array");
    BinaryMask mask(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    for (py::ssize_t i = 0; i < a.size(); ++i) mask.put(static_cast<std::size_t>(i), a.data()[i]);
    return mask;
}

py::array from_rgb(const RgbImage& img) {
    py::array_t<double> out({img.height(), img.width(), 3});
    std::copy(img.data().begin(), img.data().end(), out.mutable_data());
    return out;
}

py::array from_hsv(const HsvImage& img) {
    py::array_t<double> out({img.height(), img.width(), 3});
    std::copy(img.data().begin(), img.data().end(), out.mutable_data());
    return out;
}

py::array from_gray(const GrayMap& map) {
    py::array_t<double> out({map.height(), map.width()});
    std::copy(map.data().begin(), map.data().end(), out.mutable_data());
    return out;
}

py::array from_mask(const BinaryMask& mask) {
    py::array_t<bool> out({mask.height(), mask.width()});
    for (std::size_t i = 0; i < mask.size(); ++i) out.mutable_data()[i] = mask.get(i);
    return out;
}

std::vector<LabeledSample> to_samples(const DoubleArray& x, const py::array_t<int>& y) {
    if (x.ndim() != 2 || x.shape(1) != 3) throw Error("expected an (N, 3) feature array");
    if (y.ndim() != 1 || y.shape(0) != x.shape(0)) throw Error("labels must be (N,)");
    std::vector<LabeledSample> out(static_cast<std::size_t>(x.shape(0)));
    for (py::ssize_t i = 0; i < x.shape(0); ++i) {
        out[i].x = {x.data()[3 * i], x.data()[3 * i + 1], x.data()[3 * i + 2]};
        out[i].y = y.data()[i];
    }
    return out;
}

py::object opt(const std::optional<double>& v) {
    return v ? py::cast(*v) : py::none();
}

py::dict rates_dict(const RateReport& r) {
    py::dict d;
    d["acc"] = opt(r.acc);
    d["err"] = opt(r.err);
    d["tpr"] = opt(r.tpr);
    d["fnr"] = opt(r.fnr);
    d["tnr"] = opt(r.tnr);
    d["fpr"] = opt(r.fpr);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "shadow-robust road region recognition core";
    m.attr("__version__") = "0.1.0";

    py::register_exception<Error>(m, "ShadowroadError", PyExc_ValueError);

    // color space
    m.def("rgb_to_hsv", [](const DoubleArray& a) { return from_hsv(rgb_to_hsv(to_rgb(a))); },
          py::arg("image"));
    m.def("hsv_to_rgb", [](const DoubleArray& a) { return from_rgb(hsv_to_rgb(to_hsv(a))); },
          py::arg("image"));

    // shadow filter pieces
    m.def("compute_ndi", [](const DoubleArray& a) { return from_gray(compute_ndi(to_hsv(a))); },
          py::arg("hsv"));
    m.def("otsu_threshold", [](const DoubleArray& a) { return otsu_threshold(to_gray(a)).t; },
          py::arg("map"));
    m.def("binarize", [](const DoubleArray& a, double t) { return from_mask(binarize(to_gray(a), t)); },
          py::arg("map"), py::arg("threshold"));
    m.def(
        "connected_components",
        [](const BoolArray& a, const std::string& se) {
            py::list out;
            for (const auto& c : connected_components(to_mask(a), StructuringElement::parse(se)))
                out.append(from_mask(c));
            return out;
        },
        py::arg("mask"), py::arg("se") = "square:3");
    m.def(
        "remove_shadows",
        [](const DoubleArray& a, const std::string& se, std::size_t min_area, double min_contrast) {
            const RemoveShadowsResult res =
                remove_shadows(to_rgb(a), StructuringElement::parse(se), min_area, min_contrast);
            return py::make_tuple(from_rgb(res.image), from_mask(res.shadow_mask), res.notes);
        },
        py::arg("image"), py::arg("se") = "square:3", py::arg("min_area") = kDefaultMinShadowArea,
        py::arg("min_ndi_contrast") = kDefaultMinNdiContrast);

    // morphology
    auto unary = [](BinaryMask (*op)(const BinaryMask&, const StructuringElement&)) {
        return [op](const BoolArray& a, const std::string& se) {
            return from_mask(op(to_mask(a), StructuringElement::parse(se)));
        };
    };
    m.def("dilate", unary(&dilate), py::arg("mask"), py::arg("se") = "square:3");
    m.def("erode", unary(&erode), py::arg("mask"), py::arg("se") = "square:3");
    m.def("open", unary(&open), py::arg("mask"), py::arg("se") = "square:3");
    m.def("close", unary(&close), py::arg("mask"), py::arg("se") = "square:3");
    m.def("boundary", unary(&boundary), py::arg("mask"), py::arg("se") = "square:3");
    m.def("keep_largest", unary(&keep_largest), py::arg("mask"), py::arg("se") = "square:3");
    m.def(
        "fill_region",
        [](const BoolArray& a, int seed_x, int seed_y, const std::string& se) {
            return from_mask(fill_region(to_mask(a), seed_x, seed_y, StructuringElement::parse(se)));
        },
        py::arg("boundary_mask"), py::arg("seed_x"), py::arg("seed_y"), py::arg("se") = "cross:3");
    m.def(
        "refine",
        [](const BoolArray& a, const std::string& se, const std::string& fill_se, bool open_first,
           bool fill_holes, bool keep_largest_flag) {
            MorphConfig cfg;
            cfg.se = StructuringElement::parse(se);
            cfg.fill_se = StructuringElement::parse(fill_se);
            cfg.open_first = open_first;
            cfg.fill_holes = fill_holes;
            cfg.keep_largest = keep_largest_flag;
            return from_mask(refine(to_mask(a), cfg));
        },
        py::arg("mask"), py::arg("se") = "square:3", py::arg("fill_se") = "cross:3",
        py::arg("open_first") = true, py::arg("fill_holes") = true, py::arg("keep_largest") = true);

    // road color model
    py::class_<RoadColorModel>(m, "RoadColorModel")
        .def_property_readonly("mean", [](const RoadColorModel& r) { return py::cast(r.mean); })
        .def_property_readonly("covariance",
                               [](const RoadColorModel& r) { return py::cast(r.covariance); });
    m.def(
        "fit_road_model",
        [](const DoubleArray& pixels) {
            if (pixels.ndim() != 2 || pixels.shape(1) != 3) throw Error("expected an (N, 3) array");
            std::vector<Vec3> pts(static_cast<std::size_t>(pixels.shape(0)));
            for (py::ssize_t i = 0; i < pixels.shape(0); ++i)
                pts[i] = {pixels.data()[3 * i], pixels.data()[3 * i + 1], pixels.data()[3 * i + 2]};
            return fit_road_model(pts);
        },
        py::arg("pixels"));
    m.def("mahalanobis",
          [](const RoadColorModel& model, const DoubleArray& pixel) -> py::object {
              if (pixel.ndim() == 1 && pixel.shape(0) == 3)
                  return py::cast(
                      mahalanobis(model, Vec3{pixel.data()[0], pixel.data()[1], pixel.data()[2]}));
              const RgbImage img = to_rgb(pixel);
              GrayMap out(img.width(), img.height());
              for (std::size_t i = 0; i < img.pixel_count(); ++i)
                  out[i] = mahalanobis(model,
                                       Vec3{img.channel(i, 0), img.channel(i, 1), img.channel(i, 2)});
              return from_gray(out);
          },
          py::arg("model"), py::arg("pixel_or_image"));
    m.def(
        "extract_candidates",
        [](const DoubleArray& a, const RoadColorModel& model, double d_max) {
            return from_mask(extract_candidates(to_rgb(a), model, d_max));
        },
        py::arg("image"), py::arg("model"), py::arg("d_max") = 2.796);

    // svm
    py::class_<SvmModel>(m, "SvmModel")
        .def_property_readonly("w", [](const SvmModel& s) { return py::cast(s.w); })
        .def_readonly("b", &SvmModel::b)
        .def_readonly("c", &SvmModel::c)
        .def_property_readonly("lambdas", [](const SvmModel& s) { return py::cast(s.lambdas); })
        .def_property_readonly("n_support",
                               [](const SvmModel& s) { return s.support_vectors.size(); });
    m.def(
        "train_svm",
        [](const DoubleArray& x, const py::array_t<int>& y, double c, double tol) {
            return train(to_samples(x, y), c, tol);
        },
        py::arg("x"), py::arg("y"), py::arg("c") = kDefaultSvmC, py::arg("tol") = kDefaultSvmTol);
    m.def("decision",
          [](const SvmModel& model, const DoubleArray& x) {
              if (x.ndim() != 1 || x.shape(0) != 3) throw Error("expected a 3-vector");
              return decision(model, Vec3{x.data()[0], x.data()[1], x.data()[2]});
          },
          py::arg("model"), py::arg("x"));
    m.def("segment",
          [](const DoubleArray& a, const SvmModel& model) { return from_mask(segment(to_rgb(a), model)); },
          py::arg("image"), py::arg("model"));
    m.def(
        "build_training_set",
        [](const DoubleArray& a, const BoolArray& cand, std::size_t n_per_class, std::uint64_t seed) {
            const auto samples = build_training_set(to_rgb(a), to_mask(cand), n_per_class, seed);
            py::array_t<double> x({static_cast<py::ssize_t>(samples.size()), py::ssize_t(3)});
            py::array_t<int> y(static_cast<py::ssize_t>(samples.size()));
            for (std::size_t i = 0; i < samples.size(); ++i) {
                for (int c = 0; c < 3; ++c) x.mutable_data()[3 * i + c] = samples[i].x[c];
                y.mutable_data()[i] = samples[i].y;
            }
            return py::make_tuple(x, y);
        },
        py::arg("image"), py::arg("candidates"), py::arg("n_per_class") = 500, py::arg("seed") = 1);

    // metrics
    m.def(
        "confusion",
        [](const BoolArray& pred, const BoolArray& truth) {
            const ConfusionCounts c = confusion(to_mask(pred), to_mask(truth));
            py::dict d;
            d["tp"] = c.tp;
            d["tn"] = c.tn;
            d["fp"] = c.fp;
            d["fn"] = c.fn;
            return d;
        },
        py::arg("pred"), py::arg("truth"));
    m.def(
        "rates",
        [](std::uint64_t tp, std::uint64_t tn, std::uint64_t fp, std::uint64_t fn) {
            return rates_dict(rates(ConfusionCounts{tp, tn, fp, fn}));
        },
        py::arg("tp"), py::arg("tn"), py::arg("fp"), py::arg("fn"));

    // synthetic scenes and the pipeline
    m.def(
        "generate_scene",
        [](int scene_index, int noise_seed, bool with_shadow) {
            const SceneRender r = generate_scene(make_scene_variant(scene_index, noise_seed, with_shadow));
            return py::make_tuple(from_rgb(r.image), from_mask(r.road_truth), from_mask(r.shadow_truth));
        },
        py::arg("scene_index") = 0, py::arg("noise_seed") = 0, py::arg("with_shadow") = true);

    py::class_<PipelineConfig>(m, "PipelineConfig")
        .def(py::init<>())
        .def_readwrite("training_region", &PipelineConfig::training_region)
        .def_readwrite("d_max", &PipelineConfig::d_max)
        .def_readwrite("filtering_enabled", &PipelineConfig::filtering_enabled)
        .def_readwrite("min_shadow_area", &PipelineConfig::min_shadow_area)
        .def_readwrite("min_ndi_contrast", &PipelineConfig::min_ndi_contrast)
        .def_readwrite("se_detect", &PipelineConfig::se_detect)
        .def_readwrite("se_post", &PipelineConfig::se_post)
        .def_readwrite("se_fill", &PipelineConfig::se_fill)
        .def_readwrite("svm_c", &PipelineConfig::svm_c)
        .def_readwrite("svm_tol", &PipelineConfig::svm_tol)
        .def_readwrite("samples_per_class", &PipelineConfig::samples_per_class)
        .def_readwrite("seed", &PipelineConfig::seed)
        .def_readwrite("open_first", &PipelineConfig::open_first)
        .def_readwrite("fill_holes", &PipelineConfig::fill_holes)
        .def_readwrite("keep_largest", &PipelineConfig::keep_largest)
        .def_readwrite("group_size", &PipelineConfig::group_size);

    m.def(
        "run_frame",
        [](const DoubleArray& image, const PipelineConfig& cfg, const py::object& truth) {
            ModelState state;
            std::optional<BinaryMask> truth_mask;
            if (!truth.is_none()) truth_mask = to_mask(truth.cast<BoolArray>());
            const FrameResult r = run_frame(to_rgb(image), "frame", state, cfg,
                                            truth_mask ? &*truth_mask : nullptr);
            py::dict d;
            d["candidates_pre"] = from_mask(r.candidates_pre);
            d["candidates_post"] = from_mask(r.candidates_post);
            d["compensated"] = from_rgb(r.compensated);
            d["shadow_mask"] = from_mask(r.shadow_mask);
            d["svm_mask"] = from_mask(r.svm_mask);
            d["refined"] = from_mask(r.refined);
            d["notes"] = r.notes;
            d["rates"] = r.report ? py::object(rates_dict(*r.report)) : py::object(py::none());
            return d;
        },
        py::arg("image"), py::arg("config") = PipelineConfig{}, py::arg("truth") = py::none());
}
