#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"
#include "sfpmc/analysis.hpp"
#include "sfpmc/cli.hpp"
#include "sfpmc/io.hpp"

namespace py = pybind11;
using namespace sfpmc;

namespace {

using Points = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Applies fn row-wise to an (n, 2) array or to a single 2-vector.
template <class Fn>
py::array map_points(const Points& p, int out_dim, Fn&& fn) {
  const bool single = p.ndim() == 1;
  if (!((single && p.shape(0) == 2) || (p.ndim() == 2 && p.shape(1) == 2)))
    throw DimensionError("expected shape (2,) or (n, 2)");
  const py::ssize_t n = single ? 1 : p.shape(0);
  std::vector<py::ssize_t> shape;
  if (!single) shape.push_back(n);
  if (out_dim > 1) shape.push_back(out_dim);
  py::array_t<double> out(shape);
  const double* in = p.data();
  double* o = out.mutable_data();
  for (py::ssize_t i = 0; i < n; ++i) fn(Vec2(in[2 * i], in[2 * i + 1]), o + i * out_dim);
  return out;
}

py::array_t<double> grid_array(const ScalarField& f) {
  py::array_t<double> out({f.grid.ny, f.grid.nx});
  std::copy(f.values.begin(), f.values.end(), out.mutable_data());
  return out;
}

py::object to_python(const nlohmann::ordered_json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

py::dict grid_dict(const Grid& g) {
  py::dict d;
  d["nx"] = g.nx;
  d["ny"] = g.ny;
  d["x0"] = g.x0;
  d["y0"] = g.y0;
  d["h"] = g.h;
  return d;
}

GridSpec grid_spec(int n, int padding) { return GridSpec{n, n, padding}; }

}  // namespace

PYBIND11_MODULE(_sfpmc, m) {
  m.doc() = "Finsler prescribed mean curvature solver";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  py::class_<ConvexBody>(m, "ConvexBody")
      .def_static("disk", &ConvexBody::disk, py::arg("radius") = 1.0)
      .def_static("ellipse", [](const Mat2& A) { return ConvexBody::ellipse(A); }, py::arg("matrix"))
      .def_static(
          "from_support_samples", [](std::vector<double> h) { return ConvexBody::from_support_samples(std::move(h)); },
          py::arg("samples"), "Support function h(theta) sampled at theta_k = 2 pi k / n.")
      .def_property_readonly("valid", &ConvexBody::valid)
      .def_property_readonly("validation", [](const ConvexBody& b) { return to_python(io::to_json(b.validation())); });

  m.def(
      "gauge", [](const ConvexBody& b, const Points& v) { return map_points(v, 1, [&](const Vec2& z, double* o) { *o = gauge(b, z); }); },
      py::arg("body"), py::arg("v"));
  m.def(
      "dual_norm",
      [](const ConvexBody& b, const Points& u) { return map_points(u, 1, [&](const Vec2& z, double* o) { *o = dual_norm(b, z); }); },
      py::arg("body"), py::arg("u"));
  m.def(
      "project",
      [](const ConvexBody& b, const Points& u) {
        return map_points(u, 2, [&](const Vec2& z, double* o) {
          const Vec2 p = project(b, z);
          o[0] = p.x();
          o[1] = p.y();
        });
      },
      py::arg("body"), py::arg("u"));
  m.def(
      "pi_eps_h",
      [](const ConvexBody& b, double eps, const Points& p) {
        return map_points(p, 2, [&](const Vec2& z, double* o) {
          const Vec2 q = pi_eps_h(b, eps, z);
          o[0] = q.x();
          o[1] = q.y();
        });
      },
      py::arg("body"), py::arg("eps"), py::arg("p"));
  m.def(
      "keps_dual_norm",
      [](const ConvexBody& b, double eps, const Points& p) {
        return map_points(p, 1, [&](const Vec2& z, double* o) { *o = keps_dual_norm(b, eps, z); });
      },
      py::arg("body"), py::arg("eps"), py::arg("p"));

  py::class_<Domain>(m, "Domain")
      .def_static(
          "disk", [](double r, const Vec2& c, int n, int pad) { return Domain::disk(r, c, grid_spec(n, pad)); },
          py::arg("radius"), py::arg("center") = Vec2(0, 0), py::arg("grid") = 65, py::arg("padding") = 1)
      .def_static(
          "ellipse",
          [](double a, double b, const Vec2& c, int n, int pad) { return Domain::ellipse(a, b, c, grid_spec(n, pad)); },
          py::arg("a"), py::arg("b"), py::arg("center") = Vec2(0, 0), py::arg("grid") = 65, py::arg("padding") = 1)
      .def_static(
          "rounded_square",
          [](double s, double p, const Vec2& c, int n, int pad) { return Domain::rounded_square(s, p, c, grid_spec(n, pad)); },
          py::arg("half_side"), py::arg("exponent"), py::arg("center") = Vec2(0, 0), py::arg("grid") = 65,
          py::arg("padding") = 1)
      .def_static(
          "body_ball",
          [](const ConvexBody& b, double r, const Vec2& c, int n, int pad) {
            return Domain::body_ball(b, r, c, grid_spec(n, pad));
          },
          py::arg("body"), py::arg("radius"), py::arg("center") = Vec2(0, 0), py::arg("grid") = 65,
          py::arg("padding") = 1)
      .def_property_readonly("grid", [](const Domain& d) { return grid_dict(d.grid()); })
      .def_property_readonly("inside", [](const Domain& d) {
        const Grid& g = d.grid();
        py::array_t<bool> out({g.ny, g.nx});
        bool* o = out.mutable_data();
        for (std::size_t k = 0; k < g.size(); ++k) o[k] = d.inside(k);
        return out;
      });

  m.def(
      "finsler_distance",
      [](const ConvexBody& b, const Domain& d) {
        const DistanceField f = finsler_distance(b, d);
        py::dict out;
        out["distance"] = grid_array(f.values);
        py::array_t<bool> ridge({d.grid().ny, d.grid().nx});
        std::copy(f.ridge_mask.begin(), f.ridge_mask.end(), ridge.mutable_data());
        out["ridge"] = ridge;
        out["iterations"] = f.iterations;
        return out;
      },
      py::arg("body"), py::arg("domain"));

  m.def(
      "boundary_finsler_curvature",
      [](const ConvexBody& b, const Domain& d, const std::vector<double>& s) {
        std::vector<double> out;
        out.reserve(s.size());
        for (double t : s) out.push_back(boundary_finsler_curvature(b, d, t));
        return py::array_t<double>(static_cast<py::ssize_t>(out.size()), out.data());
      },
      py::arg("body"), py::arg("domain"), py::arg("s"));

  m.def(
      "check_curvature_condition",
      [](const ConvexBody& b, const Domain& d, double H) { return to_python(io::to_json(check_curvature_condition(b, d, H))); },
      py::arg("body"), py::arg("domain"), py::arg("H"));

  m.def(
      "solve",
      [](const std::string& yaml) {
        const cli::RunConfig c = cli::parse_config(yaml, "<python>");
        SolveResult r;
        {
          py::gil_scoped_release release;
          r = c.problem.scheme == Scheme::subriemannian ? solve_subriemannian(c.problem, c.solver)
                                                        : continuation_solve(c.problem, c.solver);
        }
        py::dict out;
        out["u"] = grid_array(r.u);
        out["grid"] = grid_dict(r.u.grid);
        out["report"] = to_python(io::to_json(r.report));
        out["lipschitz"] = lipschitz_norm(r.u);
        return out;
      },
      py::arg("config"), "Runs the continuation for a YAML run configuration and returns u and the report.");

  m.def(
      "run",
      [](const std::string& command, const std::string& path, const std::optional<std::string>& out) {
        cli::RunOptions o;
        o.out = out;
        py::gil_scoped_release release;
        return cli::run_command(command, path, o);
      },
      py::arg("command"), py::arg("config_path"), py::arg("out") = std::nullopt,
      "Same as the command-line tool; returns its exit code.");
}
