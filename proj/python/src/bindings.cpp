#include <optional>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ame/design.hpp"
#include "ame/errors.hpp"
#include "ame/presets.hpp"
#include "ame/render.hpp"
#include "ame/scene.hpp"
#include "ame/tracer.hpp"

namespace py = pybind11;
using namespace ame;

namespace {

Vec3 vec(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }
std::array<double, 3> arr(const Vec3& v) { return {v.x, v.y, v.z}; }

py::array_t<double> image_to_array(const Image& img) {
  py::array_t<double> out({img.height(), img.width(), 3});
  auto m = out.mutable_unchecked<3>();
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const Rgb& p = img.at(x, y);
      m(y, x, 0) = p.r;
      m(y, x, 1) = p.g;
      m(y, x, 2) = p.b;
    }
  }
  return out;
}

Image array_to_image(py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw std::invalid_argument("expected an (H, W, 3) array");
  auto m = a.unchecked<3>();
  Image img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) img.at(x, y) = {m(y, x, 0), m(y, x, 1), m(y, x, 2)};
  }
  return img;
}

Scene scene_by_name(const std::string& name) {
  auto s = named_preset(name);
  if (!s) throw std::invalid_argument("unknown preset '" + name + "'");
  return *s;
}

HmdSpec hmd_by_name(const std::string& name) {
  auto h = find_hmd(name);
  if (!h) throw std::invalid_argument("unknown HMD '" + name + "'");
  return *h;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "TMD display simulator core";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<DegenerateBundle>(m, "DegenerateBundle", base.ptr());
  py::register_exception<InvalidGeometry>(m, "InvalidGeometry", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<EmptySpot>(m, "EmptySpot", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  // design
  py::class_<LayoutParams>(m, "LayoutParams")
      .def(py::init<>())
      .def_readwrite("l1", &LayoutParams::l1)
      .def_readwrite("l2", &LayoutParams::l2)
      .def_readwrite("l3", &LayoutParams::l3)
      .def_readwrite("a", &LayoutParams::a)
      .def_readwrite("d", &LayoutParams::d)
      .def_readwrite("d2", &LayoutParams::d2)
      .def_readwrite("d4", &LayoutParams::d4)
      .def_readwrite("a_mag", &LayoutParams::a_mag)
      .def_readwrite("theta_device", &LayoutParams::theta_device)
      .def_readwrite("pitch", &LayoutParams::pitch);

  m.def("fov_half_mirror", &fov_half_mirror, py::arg("l1"), py::arg("a"), py::arg("d"));
  m.def(
      "fov_convex_mirror",
      [](double theta1, double a_mag) {
        const ConvexFov f = fov_convex_mirror(theta1, a_mag);
        return py::make_tuple(f.deg, f.clamped);
      },
      py::arg("theta1"), py::arg("a_mag"));
  m.def(
      "fov_ame",
      [](const LayoutParams& p) {
        const AmeFov f = fov_ame(p);
        return py::make_tuple(f.deg, to_string(f.limit));
      },
      py::arg("params"));
  m.def(
      "design_report",
      [](const std::string& hmd, const LayoutParams& p) {
        const DesignReport r = design_report(hmd_by_name(hmd), p);
        py::dict d;
        d["half_mirror"] = r.half_mirror_deg;
        d["convex_mirror"] = r.convex_mirror_deg;
        d["convex_clamped"] = r.convex_clamped;
        d["ame"] = r.ame.deg;
        d["limiting_factor"] = to_string(r.ame.limit);
        d["effective_px"] = r.ame_res.effective_px;
        d["arcmin_per_px"] = r.ame_res.arcmin_per_px;
        return d;
      },
      py::arg("hmd"), py::arg("params") = LayoutParams{});

  // scenes
  py::class_<Scene>(m, "Scene")
      .def_property_readonly("element_ids",
                             [](const Scene& s) {
                               std::vector<std::string> ids;
                               for (const auto& e : s.elements()) ids.push_back(e.id);
                               return ids;
                             })
      .def("serialize", &serialize_scene)
      .def("traced_fov_deg", &traced_fov_deg);

  m.def("parse_scene", [](const std::string& text) { return parse_scene(text); }, py::arg("text"));
  m.def("load_scene", &load_scene, py::arg("path"));
  m.def("preset", &scene_by_name, py::arg("name"));
  m.def("preset_names", &preset_names);
  m.def("hmd_names", &hmd_names);
  m.def(
      "half_mirror_preset", [](double l1, double a, double d) { return half_mirror_preset(l1, a, d); }, py::arg("l1"),
      py::arg("a"), py::arg("d"));
  m.def(
      "ame_preset",
      [](const std::string& hmd, double d2, double d4, double tmd_size, double pitch, bool polarizer) {
        TmdParams t;
        t.size = tmd_size;
        t.pitch = pitch;
        t.polarizer = polarizer;
        return ame_preset(hmd_by_name(hmd), t, d2, d4);
      },
      py::arg("hmd"), py::arg("d2"), py::arg("d4"), py::arg("tmd_size") = 120.0, py::arg("pitch") = 0.0,
      py::arg("polarizer") = false);

  // tracing
  m.def(
      "spot",
      [](const Scene& scene, std::array<double, 3> source, std::array<double, 3> axis, double cone_deg, int n_rays,
         std::uint64_t seed, double plane_z, std::optional<std::string> mode) {
        PathFilter filter;
        if (mode) {
          filter.mode = ray_mode_from_string(*mode);
          if (!filter.mode) throw std::invalid_argument("unknown ray mode: " + *mode);
        }
        const BundleResult b = trace_bundle(scene, vec(source), n_rays, {vec(axis), cone_deg}, seed);
        const SpotDiagram s = spot_diagram(b, Pose::at({0, 0, plane_z}), filter);
        return py::make_tuple(s.points, s.rms_radius);
      },
      py::arg("scene"), py::arg("source"), py::arg("axis"), py::arg("cone_deg"), py::arg("n_rays"),
      py::arg("seed"), py::arg("plane_z"), py::arg("mode") = py::none());
  m.def(
      "closest_point_to_rays",
      [](const std::vector<std::pair<std::array<double, 3>, std::array<double, 3>>>& rays) {
        std::vector<Ray> rs;
        for (const auto& [o, d] : rays) rs.push_back(make_ray(vec(o), vec(d)));
        const ConvergencePoint c = closest_point_to_rays(rs);
        return py::make_tuple(arr(c.point), c.rms_residual);
      },
      py::arg("rays"));

  // rendering
  m.def(
      "render_view",
      [](const Scene& scene, int rays_per_pixel, std::uint64_t seed, int width, int height) {
        EyeCamera eye = scene.eye();
        if (width > 0) {
          // Keep the horizontal field when resampling the sensor.
          eye.sensor.pixel_pitch *= static_cast<double>(eye.sensor.width_px) / width;
          eye.sensor.width_px = width;
          eye.sensor.height_px = height > 0 ? height : width;
        }
        Image img;
        {
          py::gil_scoped_release release;
          img = render_view(scene, eye, {rays_per_pixel, seed});
        }
        return image_to_array(img);
      },
      py::arg("scene"), py::arg("rays_per_pixel") = 16, py::arg("seed") = 42, py::arg("width") = 0,
      py::arg("height") = 0);
  m.def(
      "sharpness", [](py::array_t<double> a) { return sharpness_metric(array_to_image(a)); }, py::arg("image"));
  m.def(
      "defocus_sweep",
      [](const Scene& scene, const std::vector<double>& offsets, int rays_per_pixel, std::uint64_t seed) {
        SweepResult r;
        {
          py::gil_scoped_release release;
          r = defocus_sweep(scene, scene.eye(), offsets, {rays_per_pixel, seed}, false);
        }
        return py::make_tuple(r.offsets, r.sharpness, r.argmax_offset());
      },
      py::arg("scene"), py::arg("offsets") = kDefaultSweepOffsets, py::arg("rays_per_pixel") = 16,
      py::arg("seed") = 42);
  m.def(
      "write_ppm", [](py::array_t<double> a, const std::string& path) { write_ppm(array_to_image(a), path); },
      py::arg("image"), py::arg("path"));
}
