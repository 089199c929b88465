#include "gpmem/run.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gpmem/csv_io.hpp"
#include "gpmem/experiments.hpp"
#include "gpmem/forward.hpp"
#include "gpmem/inverse.hpp"
#include "json.hpp"

namespace gpmem {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// Written CSV fields are capped so a full solver grid stays a few MB.
constexpr std::size_t kMaxFieldColumns = 201;
constexpr std::size_t kMaxFieldRows = 1001;

struct Outcome {
  std::vector<std::string> lines;
  std::vector<std::string> files;
  bool negative = false;

  void check(bool ok, const std::string& what) { lines.push_back(std::string(ok ? "PASS " : "FAIL ") + what); }
  void note(const std::string& s) { lines.push_back("     " + s); }
};

std::string num(double v) { return format_number(v); }

std::string geometry_text(const Geometry& g) { return g.finite() ? "interval(L=" + num(g.length) + ")" : "semi_axis"; }

std::string control_text(const BoundaryControl& c) {
  return c.is_ramp() ? "ramp" : "sampled(dt=" + num(c.samples()->dt()) + ",n=" + std::to_string(c.samples()->size()) + ")";
}

void log(const RunOptions& o, const std::string& msg) {
  if (o.log) *o.log << "[gpmem] " << msg << '\n';
}

std::vector<double> time_grid(double dt, double T, bool skip_zero) {
  const auto n = static_cast<std::size_t>(std::llround(T / dt));
  std::vector<double> t;
  for (std::size_t i = skip_zero ? 1 : 0; i <= n; ++i) t.push_back(dt * static_cast<double>(i));
  return t;
}

FrequencyGrid frequency_grid(const FrequencySpec& f) {
  return FrequencyGrid::fan(f.z_min, f.z_max, static_cast<std::size_t>(f.n_radii), f.slopes);
}

const std::vector<std::string> cols(std::initializer_list<const char*> names) {
  return std::vector<std::string>(names.begin(), names.end());
}

void write_header_block(CsvWriter& w, const RunConfig& c) {
  w.comment("kernel", c.kernel.describe());
  w.comment("control", control_text(c.control));
  w.comment("geometry", geometry_text(c.geometry));
}

void cmd_forward(const RunConfig& c, const fs::path& out, Outcome& res, const RunOptions& o) {
  const fs::path file = out / "field.csv";
  if (c.method == "laplace") {
    if (c.geometry.finite()) throw Error(ErrorCode::InvalidArgument, "the laplace forward method covers the semi-axis only");
    const std::vector<double> ts = time_grid(c.time.dt, c.time.T, true);
    CsvWriter w(file);
    write_header_block(w, c);
    w.comment("method", "laplace");
    w.header(cols({"x", "t", "theta"}));
    for (double x : c.space.probes) {
      log(o, "inverting theta at x = " + num(x));
      const std::vector<double> th = theta_semiaxis_time(c.kernel, c.control, x, ts, c.contour);
      const double row0[] = {x, 0.0, 0.0};
      w.row(row0);
      for (std::size_t i = 0; i < ts.size(); ++i) {
        const double row[] = {x, ts[i], th[i]};
        w.row(row);
      }
    }
    res.note("x = probes, t = 0.." + num(c.time.T) + " step " + num(c.time.dt));
  } else {
    SolverParams sp{c.space.nx, c.time.dt, c.time.T, c.space.x_max};
    log(o, "time-domain solve, nx = " + std::to_string(sp.nx));
    const FieldSolution f = solve_time_domain(c.kernel, c.control, c.geometry, sp);
    const std::size_t sx = (f.nx() + kMaxFieldColumns - 1) / kMaxFieldColumns;
    const std::size_t st = (f.nt() + kMaxFieldRows - 1) / kMaxFieldRows;
    CsvWriter w(file);
    write_header_block(w, c);
    w.comment("method", "timedomain");
    w.comment("x_stride", std::to_string(sx));
    w.comment("t_stride", std::to_string(st));
    w.header(cols({"x", "t", "theta"}));
    for (std::size_t it = 0; it < f.nt(); it += st) {
      for (std::size_t ix = 0; ix < f.nx(); ix += sx) {
        const double row[] = {f.x_grid[ix], f.t_grid[it], f(it, ix)};
        w.row(row);
      }
    }
    res.note("grid " + std::to_string(f.nx()) + " x " + std::to_string(f.nt()) + ", written every " +
             std::to_string(sx) + " x " + std::to_string(st));
  }
  res.files.push_back(file.filename().string());
}

TimeSignal response_signal(const RunConfig& c, const RunOptions& o) {
  if (c.method == "timedomain") {
    log(o, "time-domain solve for the response");
    SolverParams sp{c.space.nx, c.time.dt, c.time.T, c.space.x_max};
    return extract_response(solve_time_domain(c.kernel, c.control, c.geometry, sp));
  }
  log(o, "inverting the response transform");
  if (c.control.is_ramp()) {
    const ContourSpec contour =
        c.contour_given ? c.contour : (c.geometry.finite() ? ContourSpec{line_for_horizon(c.time.T)} : ContourSpec{Talbot{}});
    return make_synthetic_record(c.kernel, c.geometry, c.time.dt, c.time.T, contour).r;
  }
  const std::vector<double> ts = time_grid(c.time.dt, c.time.T, true);
  const BromwichFFT line = std::holds_alternative<BromwichFFT>(c.contour) ? std::get<BromwichFFT>(c.contour)
                                                                          : line_for_horizon(c.time.T);
  std::vector<double> r = c.geometry.finite() ? response_interval_time(c.kernel, c.control, c.geometry.length, ts, line)
                                              : response_semiaxis_time(c.kernel, c.control, ts, line);
  // r(0) = -f'(0+)/a, with the one-sided slope of the samples.
  const auto a = wave_speed(c.kernel);
  const TimeSignal& f = *c.control.samples();
  r.insert(r.begin(), a ? -(f[1] - f[0]) / f.dt() / *a : 0.0);
  return TimeSignal(c.time.dt, std::move(r));
}

void write_response(const fs::path& file, const RunConfig& c, const TimeSignal& r, const std::string& provenance) {
  CsvWriter w(file);
  write_header_block(w, c);
  w.comment("method", c.method);
  w.comment("provenance", provenance);
  w.header(cols({"t", "r"}));
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double row[] = {r.time(i), r[i]};
    w.row(row);
  }
}

void cmd_response(const RunConfig& c, const fs::path& out, Outcome& res, const RunOptions& o) {
  const TimeSignal r = response_signal(c, o);
  write_response(out / "response.csv", c, r, "synthetic:" + c.kernel.describe());
  res.files.push_back("response.csv");
  res.note("samples " + std::to_string(r.size()) + ", r(0) = " + num(r[0]));
}

void cmd_invert(const RunConfig& c, const fs::path& out, Outcome& res, const RunOptions& o) {
  if (!c.control.is_ramp()) throw Error(ErrorCode::InvalidArgument, "inversion needs the ramp control");
  ResponseRecord record{c.geometry, c.control, TimeSignal(1.0, {0.0, 0.0}), "external"};
  if (!c.invert.record.empty()) {
    log(o, "reading " + c.invert.record.string());
    const CsvTable t = read_csv(c.invert.record);
    if (t.columns.size() != 2 || t.columns[0] != "t" || t.columns[1] != "r") {
      throw Error(ErrorCode::ParseError, c.invert.record.string() + ": expected columns t,r");
    }
    record.r = read_signal_csv(c.invert.record);
  } else {
    log(o, "building a synthetic record from the kernel");
    record = make_synthetic_record(c.kernel, c.geometry, c.time.dt, c.invert.T_obs);
  }
  const ContourSpec line = c.contour_given ? c.contour : ContourSpec{BromwichFFT{0.1, 500.0, 4096}};
  FiniteDataOptions fo;
  fo.gate_tol = c.tolerances.gate;
  fo.k_tol = c.tolerances.k;
  fo.k_dt = c.invert.k_dt;
  fo.k_horizon = c.invert.k_horizon;
  fo.consistency_check = c.invert.consistency_check;
  fo.consistency_tol = c.tolerances.consistency;
  log(o, "reconstructing k from data on [0, " + num(c.invert.T_obs) + "]");
  const ReconstructionResult rr = recover_from_finite_data(record, c.invert.T_obs, frequency_grid(c.frequency), line, fo);

  {
    CsvWriter w(out / "reconstruction.csv");
    w.comment("provenance", record.provenance);
    w.comment("geometry", geometry_text(record.geometry));
    w.comment("a_estimate", num(rr.a_estimate));
    w.comment("slope_estimate", num(rr.slope_estimate));
    w.comment("T_reliable", num(rr.T_reliable));
    w.comment("sigma", num(rr.sigma));
    w.comment("consistency_residual", num(rr.consistency_residual));
    w.header(cols({"t", "k", "err"}));
    for (std::size_t i = 0; i < rr.k.size(); ++i) {
      const double row[] = {rr.k.time(i), rr.k[i], rr.k_error[i]};
      w.row(row);
    }
  }
  {
    CsvWriter w(out / "K_samples.csv");
    w.header(cols({"z_re", "z_im", "K_re", "K_im", "error", "gated"}));
    for (const KSample& s : rr.K_samples) {
      const double row[] = {s.z.real(), s.z.imag(), s.K.real(), s.K.imag(), s.error, s.gated ? 1.0 : 0.0};
      w.row(row);
    }
  }
  json meta;
  meta["a_estimate"] = rr.a_estimate;
  meta["slope_estimate"] = rr.slope_estimate;
  meta["T_obs"] = c.invert.T_obs;
  meta["T_reliable"] = rr.T_reliable;
  meta["sigma"] = rr.sigma;
  meta["consistency_residual"] = rr.consistency_residual;
  meta["k_grid"] = {{"dt", c.invert.k_dt}, {"size", rr.k.size()}};
  meta["tolerances"] = {{"gate", fo.gate_tol}, {"k", fo.k_tol}, {"consistency", fo.consistency_tol}};
  std::ofstream(out / "reconstruction.json") << meta.dump(2) << '\n';
  res.files.insert(res.files.end(), {"reconstruction.csv", "K_samples.csv", "reconstruction.json"});

  std::size_t gated = 0;
  for (const KSample& s : rr.K_samples) gated += s.gated ? 1 : 0;
  res.check(rr.T_reliable > 0.0, "reliable window is nonempty (T_reliable = " + num(rr.T_reliable) + ")");
  res.note("a estimate " + num(rr.a_estimate) + ", gated samples " + std::to_string(gated) + "/" +
           std::to_string(rr.K_samples.size()));
}

void cmd_uniqueness(const RunConfig& c, const fs::path& out, Outcome& res, const RunOptions& o) {
  const MemoryKernel k2 = perturb_after(c.kernel, c.uniqueness.T, c.uniqueness.coeff);
  UniquenessParams up;
  up.delta = c.uniqueness.delta;
  up.dt = c.time.dt;
  up.threshold_factor = c.tolerances.threshold_factor;
  up.threshold_floor = c.tolerances.threshold_floor;
  log(o, "simulating k1 and k2 at dt and dt/2");
  const UniquenessReport rep = run_uniqueness_experiment(c.kernel, k2, c.uniqueness.T, c.geometry, up);

  CsvWriter w(out / "uniqueness.csv");
  w.comment("k1", c.kernel.describe());
  w.comment("k2", k2.describe());
  w.comment("T", num(rep.T));
  w.comment("sup_diff_before", num(rep.sup_diff_before));
  w.comment("self_error", num(rep.self_error));
  w.comment("threshold", num(rep.threshold));
  w.comment("first_divergence_time", num(rep.first_divergence_time));
  w.header(cols({"t", "r1", "r2", "diff"}));
  for (std::size_t i = 0; i < rep.r1.size(); ++i) {
    const double row[] = {rep.r1.time(i), rep.r1[i], rep.r2[i], std::abs(rep.r1[i] - rep.r2[i])};
    w.row(row);
  }
  res.files.push_back("uniqueness.csv");
  res.check(rep.sup_diff_before <= rep.self_error, "responses agree on [0, T] within the solver self-error (" +
                                                       num(rep.sup_diff_before) + " <= " + num(rep.self_error) + ")");
  res.check(rep.first_divergence_time >= rep.T && rep.first_divergence_time <= rep.T + c.uniqueness.delta,
            "first divergence " + num(rep.first_divergence_time) + " lies in [T, T + delta]");
}

void cmd_nonsobolev(const RunConfig& c, const fs::path& out, Outcome& res, const RunOptions& o) {
  const NonSobolevSpec& s = c.nonsobolev;
  const auto xi = [p = s.p](int n) { return std::pow(static_cast<double>(n), -p); };
  const std::vector<double> ts = time_grid(s.t_step, s.t_max, false);
  log(o, "modes 1.." + std::to_string(s.n_max));
  NonSobolevParams np;
  np.growth_guard = s.growth_guard;
  const std::vector<ModalGrowthReport> reps = run_nonsobolev_demo(s.n_max, xi, ts, np);

  {
    CsvWriter w(out / "modes.csv");
    w.comment("xi_n", "n^-" + num(s.p));
    w.header(cols({"n", "t", "theta_contour", "theta_residue"}));
    for (const auto& r : reps) {
      for (std::size_t i = 0; i < r.t_grid.size(); ++i) {
        const double row[] = {static_cast<double>(r.n), r.t_grid[i], r.theta_n[i], r.theta_residue[i]};
        w.row(row);
      }
    }
  }
  {
    CsvWriter w(out / "growth.csv");
    w.comment("published_rate", "n/sqrt(2), as printed in the source; predicted_rate is Re of the poles");
    w.comment("published_residue_constant", "1/3, as printed in the source; residue_constant is measured");
    w.header(cols({"n", "predicted_rate", "fitted_rate", "published_rate", "residue_constant",
                   "published_residue_constant", "max_rel_deviation", "t_safe"}));
    for (const auto& r : reps) {
      const double row[] = {static_cast<double>(r.n), r.predicted_rate, r.fitted_rate,  r.n / std::numbers::sqrt2,
                            r.residue_constant,       1.0 / 3.0,        r.max_rel_deviation, r.t_safe};
      w.row(row);
    }
  }
  const std::vector<double> maxima = modal_maxima(s.t_probe, s.n_max_values, xi);
  {
    CsvWriter w(out / "maxima.csv");
    w.comment("t", num(s.t_probe));
    w.header(cols({"n_max", "max_abs_theta"}));
    for (std::size_t i = 0; i < maxima.size(); ++i) {
      const double row[] = {static_cast<double>(s.n_max_values[i]), maxima[i]};
      w.row(row);
    }
  }
  res.files.insert(res.files.end(), {"modes.csv", "growth.csv", "maxima.csv"});

  for (int n : s.modes) {
    const auto& r = reps[static_cast<std::size_t>(n - 1)];
    res.check(r.max_rel_deviation < 1e-6, "n = " + std::to_string(n) + ": contour vs residue rel. deviation " +
                                              num(r.max_rel_deviation) + " < 1e-6");
  }
  for (int n : s.growth_modes) {
    const auto& r = reps[static_cast<std::size_t>(n - 1)];
    const double rel = std::abs(r.fitted_rate - r.predicted_rate) / r.predicted_rate;
    res.check(rel <= 0.05, "n = " + std::to_string(n) + ": fitted rate " + num(r.fitted_rate) + " vs sqrt(n/2) = " +
                               num(r.predicted_rate) + " (rel " + num(rel) + ")");
  }
  bool increasing = true;
  for (std::size_t i = 1; i < maxima.size(); ++i) increasing = increasing && maxima[i] > maxima[i - 1];
  res.check(increasing, "max_n |theta_n(" + num(s.t_probe) + ")| strictly increases over the n_max values");
  res.note("measured residue constant " + num(reps.front().residue_constant) + " (published: 1/3)");
  res.note("growth rate from the poles is sqrt(n/2) (published: n/sqrt(2))");
}

void cmd_speedcheck(const RunConfig& c, const fs::path& out, Outcome& res, const RunOptions& o) {
  SpeedCheckParams sp;
  sp.dt = c.time.dt;
  log(o, "finite-speed probes");
  const FiniteSpeedReport rep = run_finite_speed_check(c.kernel, c.space.probes, c.tolerances.speed, sp);
  CsvWriter w(out / "speedcheck.csv");
  w.comment("kernel", c.kernel.describe());
  w.comment("a", num(rep.a));
  w.comment("dt", num(rep.dt));
  w.comment("dx", num(rep.dx));
  w.header(cols({"x", "predicted_arrival", "measured_arrival", "quiet_max", "quiet_ok", "arrival_ok"}));
  for (const ProbeResult& p : rep.probes) {
    const double row[] = {p.x, p.predicted_arrival, p.measured_arrival, p.quiet_max, p.quiet_ok ? 1.0 : 0.0,
                          p.arrival_ok ? 1.0 : 0.0};
    w.row(row);
  }
  res.files.push_back("speedcheck.csv");
  if (rep.probes.empty()) res.note("no probes ran: the kernel has no finite wave speed or the solve failed");
  for (const ProbeResult& p : rep.probes) {
    res.check(p.quiet_ok && p.arrival_ok, "x = " + num(p.x) + ": quiet before the front (" + num(p.quiet_max) +
                                              "), arrival " + num(p.measured_arrival) + " vs " +
                                              num(p.predicted_arrival));
  }
  res.negative = !rep.all_ok;
}

void cmd_validate(const RunConfig& c, const fs::path& out, Outcome& res, const RunOptions& o) {
  log(o, "K0 probes");
  const std::vector<Complex> probes = default_k0_probes();
  const K0Report rep = validate_K0(c.kernel, probes, c.tolerances.k0);
  bool no_zeros = false;
  try {
    no_zeros = validate_no_zeros(c.kernel, frequency_grid(c.frequency));
  } catch (const Error& e) {
    res.note(std::string("zero scan failed: ") + e.what());
  }
  CsvWriter w(out / "validate.csv");
  w.comment("kernel", c.kernel.describe());
  w.header(cols({"a_sq", "a", "max_residual", "remainder_slope", "admissible", "no_zeros"}));
  const double row[] = {rep.a_sq, rep.a, rep.max_residual, rep.remainder_slope, rep.admissible ? 1.0 : 0.0,
                        no_zeros ? 1.0 : 0.0};
  w.row(row);
  res.files.push_back("validate.csv");
  res.check(rep.admissible, "K(z) = a^2/z + O(1/z^2) with a^2 = " + num(rep.a_sq) + " (residual slope " +
                                num(rep.remainder_slope) + ")");
  res.check(no_zeros, "K has no zeros on the frequency grid");
  res.negative = !rep.admissible;
}

}  // namespace

int exit_status(ErrorCode code) noexcept { return is_numerical(code) ? 2 : 1; }

int run(const RunConfig& c, const RunOptions& o) {
  const fs::path out = o.out_dir ? *o.out_dir : c.output_dir;
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) {
    if (o.log) *o.log << "cannot create output directory " << out.string() << ": " << ec.message() << '\n';
    return 1;
  }

  Outcome res;
  int status = 0;
  std::string error;
  try {
    switch (c.command) {
      case Command::Forward: cmd_forward(c, out, res, o); break;
      case Command::Response: cmd_response(c, out, res, o); break;
      case Command::Invert: cmd_invert(c, out, res, o); break;
      case Command::Uniqueness: cmd_uniqueness(c, out, res, o); break;
      case Command::NonSobolev: cmd_nonsobolev(c, out, res, o); break;
      case Command::SpeedCheck: cmd_speedcheck(c, out, res, o); break;
      case Command::Validate: cmd_validate(c, out, res, o); break;
    }
    status = res.negative ? 2 : 0;
  } catch (const Error& e) {
    status = exit_status(e.code());
    error = e.what();
  } catch (const std::exception& e) {
    status = 2;
    error = e.what();
  }

  {
    std::ofstream s(out / "summary.txt");
    s << "command: " << command_name(c.command) << '\n';
    s << "kernel: " << (c.command == Command::NonSobolev ? "polynomial_half_square" : c.kernel.describe()) << '\n';
    for (const auto& line : res.lines) s << line << '\n';
    if (!error.empty()) s << "ERROR " << error << '\n';
    s << "exit status: " << status << '\n';
  }
  if (!error.empty() && o.log) *o.log << "error: " << error << '\n';

  const ToleranceTable& t = c.tolerances;
  json m;
  m["command"] = command_name(c.command);
  m["config_hash"] = config_hash(c.text);
  m["config"] = c.text;
  m["defaults_version"] = ToleranceTable::version;
  m["library_version"] = "0.1.0";
  m["tolerances"] = {{"gate", t.gate},
                     {"k", t.k},
                     {"consistency", t.consistency},
                     {"k0", t.k0},
                     {"speed", t.speed},
                     {"threshold_factor", t.threshold_factor},
                     {"threshold_floor", t.threshold_floor}};
  m["seed"] = o.seed ? json(*o.seed) : json(nullptr);
  m["outputs"] = res.files;
  m["exit_status"] = status;
  m["error"] = error.empty() ? json(nullptr) : json(error);
  std::ofstream(out / "manifest.json") << m.dump(2) << '\n';
  return status;
}

}  // namespace gpmem
