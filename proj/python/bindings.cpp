#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <random>
#include <vector>

#include "so3kit/core.hpp"
#include "so3kit/heads.hpp"
#include "so3kit/projection.hpp"
#include "so3kit/report.hpp"
#include "so3kit/train.hpp"
#include "so3kit/verify.hpp"

namespace py = pybind11;
using so3kit::json;

namespace {

using Matrix = std::array<std::array<double, 3>, 3>;

Matrix to_matrix(const so3kit::Rotation& r) {
  Matrix m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = r(i, j);
  return m;
}

so3kit::Rotation from_matrix(const Matrix& m) {
  so3kit::Mat3 a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return so3kit::Rotation::from_matrix(a);
}

py::object json_to_py(const json& j) {
  switch (j.type()) {
    case json::value_t::null: return py::none();
    case json::value_t::boolean: return py::bool_(j.get<bool>());
    case json::value_t::number_integer: return py::int_(j.get<long long>());
    case json::value_t::number_unsigned: return py::int_(j.get<unsigned long long>());
    case json::value_t::number_float: return py::float_(j.get<double>());
    case json::value_t::string: return py::str(j.get<std::string>());
    case json::value_t::array: {
      py::list out;
      for (const json& item : j) out.append(json_to_py(item));
      return out;
    }
    case json::value_t::object: {
      py::dict out;
      for (const auto& [key, value] : j.items()) out[py::str(key)] = json_to_py(value);
      return out;
    }
    default: return py::none();
  }
}

json py_to_json(const py::handle& obj) {
  if (obj.is_none()) return nullptr;
  if (py::isinstance<py::bool_>(obj)) return obj.cast<bool>();
  if (py::isinstance<py::int_>(obj)) return obj.cast<long long>();
  if (py::isinstance<py::float_>(obj)) return obj.cast<double>();
  if (py::isinstance<py::str>(obj)) return obj.cast<std::string>();
  if (py::isinstance<py::dict>(obj)) {
    json out = json::object();
    for (const auto& item : obj.cast<py::dict>())
      out[item.first.cast<std::string>()] = py_to_json(item.second);
    return out;
  }
  if (py::isinstance<py::list>(obj) || py::isinstance<py::tuple>(obj)) {
    json out = json::array();
    for (const auto& item : obj.cast<py::sequence>()) out.push_back(py_to_json(item));
    return out;
  }
  throw py::type_error("cannot convert python object to json");
}

so3kit::EmbeddedManifold parse_manifold(const std::string& name, int sphere_dim) {
  if (name == "sphere") return so3kit::EmbeddedManifold::sphere(sphere_dim);
  if (name == "so3") return so3kit::EmbeddedManifold::so3();
  throw std::invalid_argument("manifold must be \"sphere\" or \"so3\"");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "numerical toolkit for encoder heads on SO(3)";
  m.attr("__version__") = so3kit::kVersion;

  py::list head_kinds;
  for (so3kit::HeadKind k : so3kit::kAllHeadKinds) head_kinds.append(so3kit::to_string(k));
  m.attr("HEAD_KINDS") = head_kinds;

  py::register_exception<so3kit::OriginUndefined>(m, "OriginUndefined", PyExc_ValueError);
  py::register_exception<so3kit::DegenerateFrame>(m, "DegenerateFrame", PyExc_ValueError);
  py::register_exception<so3kit::StepTooLarge>(m, "StepTooLarge", PyExc_ValueError);
  py::register_exception<so3kit::NearSingularHead>(m, "NearSingularHead", PyExc_ValueError);

  m.def("exp_so3",
        [](const std::array<double, 3>& w) {
          return to_matrix(so3kit::exp_so3({w[0], w[1], w[2]}));
        },
        py::arg("omega"), "closed-form exponential map so(3) -> SO(3)");

  m.def("log_so3",
        [](const Matrix& r) {
          const so3kit::Vec3 w = so3kit::log_so3(from_matrix(r));
          return std::array<double, 3>{w.x, w.y, w.z};
        },
        py::arg("rotation"), "principal logarithm, |log| in [0, pi]");

  m.def("quat_to_rot",
        [](const std::array<double, 4>& q) {
          return to_matrix(so3kit::quat_to_rot(so3kit::UnitQuaternion::of(q[0], q[1], q[2], q[3])));
        },
        py::arg("quaternion"), "double cover S^3 -> SO(3); input (w, x, y, z) is normalized");

  m.def("quat_from_rot",
        [](const Matrix& r) {
          const so3kit::UnitQuaternion q = so3kit::quat_from_rot(from_matrix(r));
          return std::array<double, 4>{q.w, q.x, q.y, q.z};
        },
        py::arg("rotation"));

  m.def("geodesic_distance",
        [](const Matrix& a, const Matrix& b) {
          return so3kit::geodesic_distance(from_matrix(a), from_matrix(b));
        },
        py::arg("r1"), py::arg("r2"), "rotation angle of r1^T r2, in radians");

  m.def("sample_rotations",
        [](int n, std::uint64_t seed) {
          std::mt19937_64 rng(seed);
          std::vector<Matrix> out;
          out.reserve(static_cast<std::size_t>(n));
          for (int i = 0; i < n; ++i) out.push_back(to_matrix(so3kit::sample_uniform_rotation(rng)));
          return out;
        },
        py::arg("n"), py::arg("seed") = 0, "Haar-uniform rotations");

  m.def("normalize",
        [](const std::vector<double>& x) { return so3kit::normalized(x); },
        py::arg("x"));

  m.def("head_input_dim",
        [](const std::string& kind) {
          return so3kit::head_input_dim(so3kit::head_kind_from_string(kind));
        },
        py::arg("kind"));

  m.def("head_apply",
        [](const std::string& kind, const std::vector<double>& y) {
          return to_matrix(so3kit::head_apply(so3kit::head_kind_from_string(kind), y));
        },
        py::arg("kind"), py::arg("y"), "encoder head applied to a raw head-input vector");

  m.def("head_jacobian",
        [](const std::string& kind, const std::vector<double>& y) {
          const so3kit::HeadKind k = so3kit::head_kind_from_string(kind);
          const std::vector<double> flat = so3kit::head_jacobian(k, y, 0.0);
          const std::size_t d = static_cast<std::size_t>(so3kit::head_input_dim(k));
          std::vector<std::vector<double>> out(9, std::vector<double>(d));
          for (std::size_t r = 0; r < 9; ++r)
            for (std::size_t c = 0; c < d; ++c) out[r][c] = flat[r * d + c];
          return out;
        },
        py::arg("kind"), py::arg("y"), "d vec(R)/d y, rows follow vec(R) row-major");

  m.def("basis_section",
        [](const Matrix& r) {
          const auto [c1, c2] = so3kit::basis_section(from_matrix(r));
          return std::make_pair(std::array<double, 3>{c1.x, c1.y, c1.z},
                                std::array<double, 3>{c2.x, c2.y, c2.z});
        },
        py::arg("rotation"), "exact right inverse of the basis head");

  m.def("check_conditions",
        [](const std::string& kind) {
          return json_to_py(
              so3kit::to_json(so3kit::check_necessary_conditions(so3kit::head_kind_from_string(kind))));
        },
        py::arg("kind"), "static verdict table plus numerical witnesses");

  m.def("diagnose",
        [](const std::string& kind, int samples, double threshold) {
          return json_to_py(
              so3kit::build_diagnose_document(so3kit::head_kind_from_string(kind), samples, threshold)
                  .to_json());
        },
        py::arg("kind"), py::arg("samples") = 256, py::arg("threshold") = 0.1,
        "full diagnostic report document as a dict");

  m.def("distance_to",
        [](const std::string& manifold, const std::vector<double>& x, int sphere_dim) {
          return so3kit::distance_to(parse_manifold(manifold, sphere_dim), x);
        },
        py::arg("manifold"), py::arg("x"), py::arg("sphere_dim") = 2);

  m.def("project",
        [](const std::string& manifold, const std::vector<double>& x, int sphere_dim) {
          const so3kit::ProjectionResult r = so3kit::project(parse_manifold(manifold, sphere_dim), x);
          py::dict out;
          out["point"] = r.point;
          out["distance"] = r.distance;
          out["unique"] = r.unique;
          return out;
        },
        py::arg("manifold"), py::arg("x"), py::arg("sphere_dim") = 2,
        "nearest point, its distance, and a uniqueness flag");

  m.def("loop_holonomy",
        [](const std::array<double, 3>& axis, double total_angle, int n_samples) {
          return so3kit::quaternion_holonomy(so3kit::make_rotation_loop(
              so3kit::UnitVec3::of(axis), total_angle, n_samples));
        },
        py::arg("axis"), py::arg("total_angle"), py::arg("n_samples") = 128,
        "sign of the quaternion lift around the loop exp(t * total_angle * axis)");

  m.def("verify",
        [](double tolerance_scale, std::uint64_t seed, const std::vector<std::string>& only) {
          py::list out;
          for (const so3kit::SuiteResult& s :
               so3kit::run_verification_suites(tolerance_scale, seed, only)) {
            py::dict d;
            d["name"] = s.name;
            d["passed"] = s.passed;
            d["detail"] = s.detail;
            d["seconds"] = s.seconds;
            out.append(d);
          }
          return out;
        },
        py::arg("tolerance_scale") = 1.0, py::arg("seed") = 0x5eedULL,
        py::arg("only") = std::vector<std::string>{},
        "run the invariant suites; `only` restricts to the named subset");

  m.def("train",
        [](const py::dict& config) {
          json merged = so3kit::to_json(so3kit::TrainConfig{});
          merged.update(py_to_json(config));
          const so3kit::TrainConfig cfg = so3kit::train_config_from_json(merged);
          auto [model, report] = so3kit::train(cfg);
          return json_to_py(so3kit::to_json(report));
        },
        py::arg("config"),
        "train the learned stage through a head; unspecified keys take defaults");
}
