#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>

#include "gpmem/config.hpp"
#include "gpmem/experiments.hpp"
#include "gpmem/forward.hpp"
#include "gpmem/inverse.hpp"
#include "gpmem/kernel.hpp"
#include "gpmem/laplace.hpp"
#include "gpmem/run.hpp"

namespace py = pybind11;
using namespace gpmem;

namespace {

// Shape and strides spelled out; the count-only constructor can come back
// with a zero stride.
py::array_t<double> to_array(std::span<const double> v) {
  const auto n = static_cast<py::ssize_t>(v.size());
  return py::array_t<double>({n}, {static_cast<py::ssize_t>(sizeof(double))}, v.data());
}

Geometry geometry_of(double length) {
  return std::isinf(length) ? Geometry::semi_axis() : Geometry::interval(length);
}

Talbot talbot(int nodes) {
  Talbot t;
  t.nodes = nodes;
  t.max_nodes = std::max(t.max_nodes, 4 * nodes);
  return t;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Memory-kernel heat equation: forward maps, kernel recovery and experiments";

  static py::exception<Error> err(m, "GpmemError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      err(e.what());
    }
  });

  py::class_<MemoryKernel>(m, "Kernel")
      .def_static("constant", &MemoryKernel::constant, py::arg("alpha_sq") = 1.0)
      .def_static("exponential", &MemoryKernel::exponential, py::arg("decay") = 1.0, py::arg("amplitude") = 1.0)
      .def_static("polynomial_half_square", &MemoryKernel::polynomial_half_square)
      .def_static("dirac_delta", &MemoryKernel::dirac_delta, py::arg("weight") = 1.0)
      .def_static("shifted_power", &MemoryKernel::shifted_power, py::arg("shift"), py::arg("power"), py::arg("coeff"))
      .def_static(
          "sampled",
          [](double dt, std::vector<double> values) { return MemoryKernel::sampled(TimeSignal(dt, std::move(values))); },
          py::arg("dt"), py::arg("values"))
      .def_static("sum", [](const std::vector<MemoryKernel>& parts) { return MemoryKernel::sum(parts); })
      .def("laplace", [](const MemoryKernel& k, Complex z) { return k.laplace(z).value; })
      .def("value", &MemoryKernel::value)
      .def("wave_speed_sq", &MemoryKernel::wave_speed_sq)
      .def("describe", &MemoryKernel::describe)
      .def("__repr__", [](const MemoryKernel& k) { return "Kernel(" + k.describe() + ")"; });

  m.def(
      "validate_K0",
      [](const MemoryKernel& k, double tol) {
        const auto probes = default_k0_probes();
        const K0Report r = validate_K0(k, probes, tol);
        py::dict d;
        d["a_sq"] = r.a_sq;
        d["a"] = r.a;
        d["max_residual"] = r.max_residual;
        d["remainder_slope"] = r.remainder_slope;
        d["admissible"] = r.admissible;
        return d;
      },
      py::arg("kernel"), py::arg("tol") = 1e-10, "Laplace-side check of K(z) = a^2/z + O(1/z^2), a > 0.");

  m.def("omega", &omega, py::arg("kernel"), py::arg("z"));
  m.def(
      "response_semiaxis",
      [](const MemoryKernel& k, Complex z) { return response_semiaxis(k, BoundaryControl::ramp(), z); },
      py::arg("kernel"), py::arg("z"), "R(z) = -F(z) omega(z) for the ramp control.");
  m.def(
      "response_interval",
      [](const MemoryKernel& k, double L, Complex z) { return response_interval(k, BoundaryControl::ramp(), L, z); },
      py::arg("kernel"), py::arg("L"), py::arg("z"));
  m.def("recover_K_semiaxis", &recover_K_semiaxis, py::arg("R"), py::arg("F"), py::arg("z"));
  m.def("recover_omega_interval", &recover_omega_interval, py::arg("R"), py::arg("F"), py::arg("L"), py::arg("z"));

  m.def(
      "inverse_laplace",
      [](const std::function<Complex(Complex)>& f, std::vector<double> times, int nodes) {
        return inverse_laplace(Evaluator(f), times, ContourSpec{talbot(nodes)});
      },
      py::arg("transform"), py::arg("times"), py::arg("nodes") = 48,
      "Talbot inversion of a Python callable at the given times (t > 0).");

  m.def(
      "theta_semiaxis",
      [](const MemoryKernel& k, double x, std::vector<double> times, int nodes) {
        return to_array(theta_semiaxis_time(k, BoundaryControl::ramp(), x, times, talbot(nodes)));
      },
      py::arg("kernel"), py::arg("x"), py::arg("times"), py::arg("nodes") = 48);

  m.def(
      "solve_time_domain",
      [](const MemoryKernel& k, double T, double dt, int nx, double x_max, double length) {
        const FieldSolution f = solve_time_domain(k, BoundaryControl::ramp(), geometry_of(length), {nx, dt, T, x_max});
        const auto rows = static_cast<py::ssize_t>(f.nt());
        const auto cols = static_cast<py::ssize_t>(f.nx());
        const auto w = static_cast<py::ssize_t>(sizeof(double));
        py::array_t<double> theta({rows, cols}, {cols * w, w}, f.values.data());
        const TimeSignal r = extract_response(f);
        py::dict d;
        d["x"] = to_array(f.x_grid);
        d["t"] = to_array(f.t_grid);
        d["theta"] = theta;
        d["r"] = to_array(r.values());
        return d;
      },
      py::arg("kernel"), py::arg("T") = 5.0, py::arg("dt") = 5e-3, py::arg("nx") = 600, py::arg("x_max") = 0.0,
      py::arg("length") = std::numeric_limits<double>::infinity(),
      "Ramp-driven time-domain solve; returns x, t, theta[t, x] and the boundary response r.");

  m.def(
      "synthetic_response",
      [](const MemoryKernel& k, double dt, double horizon, double length) {
        return to_array(make_synthetic_record(k, geometry_of(length), dt, horizon).r.values());
      },
      py::arg("kernel"), py::arg("dt"), py::arg("horizon"), py::arg("length") = std::numeric_limits<double>::infinity(),
      "r(t) at 0, dt, ..., horizon by inversion of the exact response transform.");

  m.def(
      "recover_from_finite_data",
      [](std::vector<double> r, double dt, double T_obs, double z_min, double z_max, double k_dt, double k_horizon,
         bool consistency_check, double length) {
        ResponseRecord rec{geometry_of(length), BoundaryControl::ramp(), TimeSignal(dt, std::move(r)), "external"};
        const double slopes[] = {0.0, 0.5, 1.0};
        FiniteDataOptions o;
        o.k_dt = k_dt;
        o.k_horizon = k_horizon;
        o.consistency_check = consistency_check;
        const auto res = recover_from_finite_data(rec, T_obs, FrequencyGrid::fan(z_min, z_max, 7, slopes),
                                                  BromwichFFT{0.1, 500.0, 4096}, o);
        py::dict d;
        d["t"] = to_array([&] {
          std::vector<double> t(res.k.size());
          for (std::size_t i = 0; i < t.size(); ++i) t[i] = res.k.time(i);
          return t;
        }());
        d["k"] = to_array(res.k.values());
        d["err"] = to_array(res.k_error);
        d["a_estimate"] = res.a_estimate;
        d["T_reliable"] = res.T_reliable;
        d["sigma"] = res.sigma;
        d["consistency_residual"] = res.consistency_residual;
        return d;
      },
      py::arg("r"), py::arg("dt"), py::arg("T_obs"), py::arg("z_min") = 1.0, py::arg("z_max") = 10.0,
      py::arg("k_dt") = 0.05, py::arg("k_horizon") = 0.0, py::arg("consistency_check") = true,
      py::arg("length") = std::numeric_limits<double>::infinity(),
      "Kernel reconstruction from a ramp response observed on [0, T_obs].");

  m.def(
      "uniqueness",
      [](const MemoryKernel& k1, double T, double coeff, double delta, double dt) {
        UniquenessParams p;
        p.delta = delta;
        p.dt = dt;
        const auto rep = run_uniqueness_experiment(k1, perturb_after(k1, T, coeff), T, Geometry::semi_axis(), p);
        py::dict d;
        d["sup_diff_before"] = rep.sup_diff_before;
        d["self_error"] = rep.self_error;
        d["threshold"] = rep.threshold;
        d["first_divergence_time"] = rep.first_divergence_time;
        return d;
      },
      py::arg("kernel"), py::arg("T") = 2.0, py::arg("coeff") = 1.0, py::arg("delta") = 2.0, py::arg("dt") = 5e-3);

  m.def("modal_theta_talbot", &modal_theta_talbot, py::arg("n"), py::arg("xi"), py::arg("t"));
  m.def("modal_theta_residue", &modal_theta_residue, py::arg("n"), py::arg("xi"), py::arg("t"));
  m.def("modal_poles", &modal_poles, py::arg("n"));

  m.def(
      "finite_speed_check",
      [](const MemoryKernel& k, std::vector<double> probes, double tol, double dt) {
        SpeedCheckParams p;
        p.dt = dt;
        const auto rep = run_finite_speed_check(k, probes, tol, p);
        py::list out;
        for (const ProbeResult& pr : rep.probes) {
          py::dict d;
          d["x"] = pr.x;
          d["predicted_arrival"] = pr.predicted_arrival;
          d["measured_arrival"] = pr.measured_arrival;
          d["quiet_max"] = pr.quiet_max;
          d["ok"] = pr.quiet_ok && pr.arrival_ok;
          out.append(d);
        }
        return out;
      },
      py::arg("kernel"), py::arg("probes"), py::arg("tol") = 1e-6, py::arg("dt") = 5e-3);

  m.def(
      "run_config",
      [](const std::string& path, std::optional<std::string> out) {
        const RunConfig cfg = parse_config(path);
        RunOptions o;
        if (out) o.out_dir = *out;
        return run(cfg, o);
      },
      py::arg("path"), py::arg("out") = py::none(), "Runs a config file like the gpmem CLI; returns the exit status.");
}
