#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>

#include "startx/error.hpp"
#include "startx/image.hpp"
#include "startx/inversion.hpp"
#include "startx/stability.hpp"
#include "startx/star_geometry.hpp"
#include "startx/transforms.hpp"

namespace py = pybind11;
using namespace startx;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Images cross the boundary as (n, n) arrays indexed [iy, ix], row 0 at y = -L.
Array to_array(const ImageGrid& g) {
    const py::ssize_t n = g.size();
    Array a({n, n});
    std::copy(g.values().begin(), g.values().end(), a.mutable_data());
    return a;
}

ImageGrid from_array(const Array& a, double half_width) {
    if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw Error("image must be a square 2-D array");
    return ImageGrid(static_cast<int>(a.shape(0)), half_width, std::vector<double>(a.data(), a.data() + a.size()));
}

py::dict sinogram_dict(const Sinogram& s) {
    Array v({static_cast<py::ssize_t>(s.num_angles()), static_cast<py::ssize_t>(s.num_offsets())});
    std::copy(s.values.begin(), s.values.end(), v.mutable_data());
    py::dict d;
    d["angles"] = s.angles;
    d["offsets"] = s.offsets;
    d["values"] = v;
    return d;
}

py::dict report_dict(const SingularityReport& r) {
    py::dict d;
    d["type1_angles"] = r.type1_angles;
    d["type2_angles"] = r.type2_angles;
    d["invertible"] = r.invertible;
    d["p2_min_abs"] = r.p2_min_abs;
    d["p2_max_abs"] = r.p2_max_abs;
    d["p2_is_constant"] = r.p2_is_constant;
    d["p2_identically_zero"] = r.p2_identically_zero;
    d["classification"] = to_string(r.classification());
    return d;
}

ScanSettings scan_with(int n_samples) {
    ScanSettings s;
    s.n_samples = n_samples;
    return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Star transform: forward model, Radon-based inversion and singular directions";

    py::register_exception<Error>(m, "StarError", PyExc_ValueError);

    py::class_<StarConfig>(m, "StarConfig")
        .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("angles"), py::arg("weights"))
        .def_static("uniform", &StarConfig::uniform, py::arg("angles"))
        .def_property_readonly("angles", [](const StarConfig& c) {
            return std::vector<double>(c.angles().begin(), c.angles().end());
        })
        .def_property_readonly("weights", [](const StarConfig& c) {
            return std::vector<double>(c.weights().begin(), c.weights().end());
        })
        .def("__len__", &StarConfig::size)
        .def("__repr__", [](const StarConfig& c) {
            return "StarConfig(" + py::repr(py::cast(c.angles_deg())).cast<std::string>() + " deg)";
        });

    m.def("regular_star", &regular_star, py::arg("m"));
    m.def("stable_config_for_weights", &stable_config_for_weights, py::arg("c1"), py::arg("c2"), py::arg("c3"));
    m.def("sign_normalize", &sign_normalize, py::arg("config"));
    m.def("is_symmetric", &is_symmetric, py::arg("config"));
    m.def("is_invertible", &is_invertible, py::arg("config"));

    m.def("p2", [](const StarConfig& c, double alpha) { return p2_eval(c, alpha); }, py::arg("config"),
          py::arg("alpha"));
    m.def("q", [](const StarConfig& c, double alpha) { return q_eval(c, unit(alpha)); }, py::arg("config"),
          py::arg("alpha"));
    m.def(
        "find_singular_directions",
        [](const StarConfig& c, int n_samples) { return report_dict(find_singular_directions(c, scan_with(n_samples))); },
        py::arg("config"), py::arg("n_samples") = 4096);
    m.def(
        "conjecture_scan",
        [](int mm, int n_samples) {
            const ConjectureScan s = conjecture_scan(mm, n_samples);
            return py::make_tuple(s.min_abs, s.max_abs, s.is_constant);
        },
        py::arg("m"), py::arg("n_samples") = 4096);

    m.def(
        "shepp_logan",
        [](int n, double half_width, bool modified) {
            return to_array(rasterize(shepp_logan(modified ? SheppLoganVariant::modified : SheppLoganVariant::original),
                                      n, half_width));
        },
        py::arg("n"), py::arg("half_width") = 1.0, py::arg("modified") = true);
    m.def(
        "gaussian_bump",
        [](double cx, double cy, double sigma, int n, double half_width) {
            return to_array(gaussian_bump({cx, cy}, sigma, n, half_width));
        },
        py::arg("cx"), py::arg("cy"), py::arg("sigma"), py::arg("n"), py::arg("half_width") = 1.0);

    m.def(
        "radon",
        [](const Array& f, double half_width, int num_angles, int num_offsets) {
            const ImageGrid g = from_array(f, half_width);
            return sinogram_dict(radon(g, num_angles, num_offsets > 0 ? num_offsets : 2 * g.size()));
        },
        py::arg("f"), py::arg("half_width") = 1.0, py::arg("num_angles") = 180, py::arg("num_offsets") = 0,
        "Radon transform; num_offsets = 0 picks 2 n.");
    m.def(
        "star_transform",
        [](const Array& f, const StarConfig& c, double half_width, double ext_factor) {
            return to_array(star_transform(from_array(f, half_width), c, ext_factor).grid);
        },
        py::arg("f"), py::arg("config"), py::arg("half_width") = 1.0, py::arg("ext_factor") = 3.0,
        "Star transform sampled on the enlarged grid (same pitch as f).");
    m.def(
        "fbp",
        [](const Array& values, const std::vector<double>& offsets, int n, double half_width, const std::string& filter) {
            if (values.ndim() != 2 || offsets.size() != static_cast<std::size_t>(values.shape(1))) {
                throw Error("fbp: values must be K x T with one offset per column");
            }
            Sinogram s = Sinogram::uniform(static_cast<int>(values.shape(0)), static_cast<int>(offsets.size()), 1.0);
            s.offsets = offsets;
            s.values.assign(values.data(), values.data() + values.size());
            return to_array(fbp(s, n, half_width, parse_filter(filter)));
        },
        py::arg("values"), py::arg("offsets"), py::arg("n"), py::arg("half_width") = 1.0,
        py::arg("filter") = "ram-lak", "FBP of a sinogram on angles k pi / K.");
    m.def(
        "invert_star",
        [](const Array& f, const StarConfig& c, double half_width, int num_angles, int num_offsets,
           double ext_factor, const std::string& filter, const std::string& fill) {
            const ImageGrid img = from_array(f, half_width);
            InversionSettings s;
            s.filter = parse_filter(filter);
            s.fill = parse_fill(fill);
            const int T = num_offsets > 0 ? num_offsets : 2 * img.size();
            const StarReconstruction r = invert_star(star_transform(img, c, ext_factor), c, num_angles, T, s,
                                                     img.size(), half_width);
            py::dict d;
            d["image"] = to_array(r.image);
            d["masked_rows"] = r.radon.masked_rows();
            d["report"] = report_dict(r.radon.report);
            return d;
        },
        py::arg("f"), py::arg("config"), py::arg("half_width") = 1.0, py::arg("num_angles") = 360,
        py::arg("num_offsets") = 0, py::arg("ext_factor") = 3.0, py::arg("filter") = "hamming",
        py::arg("fill") = "interpolate",
        "Simulates the star transform of f and reconstructs f from it.");
}
