#include "gpmem/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gpmem/error.hpp"

namespace gpmem {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TimeSignal simulate_response(const MemoryKernel& k, const Geometry& geo, double a, double dt, double horizon) {
  SolverParams sp;
  sp.dt = dt;
  sp.T = horizon;
  const double dx = a * dt;
  if (geo.finite()) {
    sp.nx = static_cast<int>(std::floor(geo.length / dx * (1.0 + 1e-12)));
  } else {
    sp.nx = static_cast<int>(std::ceil(horizon / dt)) + 20;
    sp.x_max = dx * sp.nx;
  }
  return extract_response(solve_time_domain(k, BoundaryControl::ramp(), geo, sp));
}

double max_abs_diff_coarse(const TimeSignal& coarse, const TimeSignal& fine) {
  double d = 0.0;
  for (std::size_t i = 0; i < coarse.size() && 2 * i < fine.size(); ++i) {
    d = std::max(d, std::abs(coarse[i] - fine[2 * i]));
  }
  return d;
}

// Contour for the modes: shifted to Re z = alpha, the real part of the
// rightmost poles, with N growing with alpha t so the poles stay inside.
// Accuracy depends on alpha t only and stays below 1e-9 of the envelope
// cosh(alpha t) up to alpha t = 15; doubling N would only add roundoff.
Talbot modal_contour(int n, double t) {
  const double alpha = std::sqrt(n / 2.0);
  const int N = std::max(44, 2 * static_cast<int>(std::ceil((24.0 + 3.5 * alpha * t) / 2.0)));
  Talbot c{N, alpha, 1e-9, N};
  c.adaptive = false;
  return c;
}

}  // namespace

MemoryKernel perturb_after(const MemoryKernel& k1, double T, double coeff) {
  const MemoryKernel parts[] = {k1, MemoryKernel::shifted_power(T, 2, coeff)};
  return MemoryKernel::sum(parts);
}

UniquenessReport run_uniqueness_experiment(const MemoryKernel& k1, const MemoryKernel& k2, double T,
                                           const Geometry& geometry, const UniquenessParams& p) {
  if (!(T > 0.0) || !(p.delta > 0.0) || !(p.dt > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "uniqueness experiment needs T, delta, dt > 0");
  }
  const auto a1 = wave_speed(k1);
  const auto a2 = wave_speed(k2);
  if (!a1 || !a2 || std::abs(*a1 - *a2) > 1e-12 * *a1) {
    throw Error(ErrorCode::InvalidArgument, "both kernels need the same k(0) > 0");
  }
  const double a = *a1;
  const double horizon = T + p.delta;
  UniquenessReport rep;
  rep.T = T;
  rep.r1 = simulate_response(k1, geometry, a, p.dt, horizon);
  rep.r2 = simulate_response(k2, geometry, a, p.dt, horizon);
  const TimeSignal h1 = simulate_response(k1, geometry, a, 0.5 * p.dt, horizon);
  const TimeSignal h2 = simulate_response(k2, geometry, a, 0.5 * p.dt, horizon);
  rep.self_error = std::max(max_abs_diff_coarse(rep.r1, h1), max_abs_diff_coarse(rep.r2, h2));
  rep.threshold = std::max(p.threshold_factor * rep.self_error, p.threshold_floor);
  rep.first_divergence_time = kInf;
  for (std::size_t i = 0; i < rep.r1.size(); ++i) {
    const double t = rep.r1.time(i);
    const double d = std::abs(rep.r1[i] - rep.r2[i]);
    if (t <= T * (1.0 + 1e-12)) rep.sup_diff_before = std::max(rep.sup_diff_before, d);
    if (d > rep.threshold && rep.first_divergence_time == kInf) rep.first_divergence_time = t;
  }
  return rep;
}

TruncationReport run_truncation_consistency(const MemoryKernel& kernel, double T, const FrequencyGrid& z_grid,
                                            const TruncationParams& p) {
  const ResponseRecord rec = make_synthetic_record(kernel, Geometry::semi_axis(), p.dt, T);
  const BoundaryControl ramp = BoundaryControl::ramp();
  const Evaluator R = [&](Complex z) { return response_semiaxis(kernel, ramp, z); };
  TruncationReport rep;
  for (const Complex z : z_grid.points()) {
    const Complex td = project_RT_timedomain(rec.r, T, z);
    const ProjectionValue cv = project_RT_contour(R, T, z, p.quad);
    rep.z.push_back(z);
    rep.timedomain.push_back(td);
    rep.contour.push_back(cv.value);
    rep.max_deviation = std::max(rep.max_deviation, std::abs(td - cv.value));
    rep.max_cutoff_error = std::max(rep.max_cutoff_error, cv.cutoff_error);
  }
  return rep;
}

double modal_theta_talbot(int n, double xi_n, double t) {
  return modal_solution(MemoryKernel::polynomial_half_square(), n, xi_n, t, modal_contour(n, t)).value;
}

double modal_theta_residue(int n, double xi_n, double t) {
  Complex s{0.0, 0.0};
  for (const Complex p : modal_poles(n)) s += std::exp(p * t);
  return 0.25 * xi_n * s.real();
}

double fit_growth_rate(std::span<const double> t, std::span<const double> theta) {
  if (t.size() < 3 || t.size() != theta.size()) throw Error(ErrorCode::InvalidArgument, "growth fit needs >= 3 points");
  const double t_mid = 0.5 * (t.front() + t.back());
  std::vector<double> xs, ys;
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    const double v = std::abs(theta[i]);
    if (t[i] >= t_mid && v > 0.0 && v >= std::abs(theta[i - 1]) && v >= std::abs(theta[i + 1])) {
      xs.push_back(t[i]);
      ys.push_back(std::log(v));
    }
  }
  if (xs.size() < 2) {
    xs.clear();
    ys.clear();
    double peak = 0.0;
    for (double v : theta) peak = std::max(peak, std::abs(v));
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] >= t_mid && std::abs(theta[i]) >= 1e-3 * peak && theta[i] != 0.0) {
        xs.push_back(t[i]);
        ys.push_back(std::log(std::abs(theta[i])));
      }
    }
  }
  if (xs.size() < 2) return 0.0;
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / n;
    my += ys[i] / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

std::vector<ModalGrowthReport> run_nonsobolev_demo(int n_max, const std::function<double(int)>& xi,
                                                   std::span<const double> t_grid, const NonSobolevParams& params) {
  if (n_max < 1 || n_max > 32) throw Error(ErrorCode::InvalidArgument, "n_max must lie in [1, 32]");
  if (t_grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty time grid");
  std::vector<ModalGrowthReport> out;
  for (int n = 1; n <= n_max; ++n) {
    ModalGrowthReport rep;
    rep.n = n;
    rep.xi = xi(n);
    rep.poles = modal_poles(n);
    rep.predicted_rate = 0.0;
    for (const Complex p : rep.poles) rep.predicted_rate = std::max(rep.predicted_rate, p.real());
    rep.t_safe = params.growth_guard / rep.predicted_rate;

    // Residue by a 64-point circle around each pole, radius a tenth of |pole|.
    const double rho = 0.1 * std::abs(rep.poles[0]);
    const double n2 = static_cast<double>(n) * n;
    double acc = 0.0;
    for (const Complex p : rep.poles) {
      Complex s{0.0, 0.0};
      for (int m = 0; m < 64; ++m) {
        const Complex e = std::polar(1.0, 2.0 * std::numbers::pi * m / 64.0);
        const Complex z = p + rho * e;
        s += z * z * z / (z * z * z * z + n2) * rho * e;
      }
      acc += (s / 64.0).real();
    }
    rep.residue_constant = acc / 4.0;

    for (double t : t_grid) {
      if (t < 0.0 || t > rep.t_safe) continue;
      rep.t_grid.push_back(t);
      const double num = modal_theta_talbot(n, rep.xi, t);
      const double res = modal_theta_residue(n, rep.xi, t);
      rep.theta_n.push_back(num);
      rep.theta_residue.push_back(res);
      if (std::abs(res) > 1e-10) {
        rep.max_rel_deviation = std::max(rep.max_rel_deviation, std::abs(num - res) / std::abs(res));
      }
    }
    if (rep.t_grid.size() >= 3) rep.fitted_rate = fit_growth_rate(rep.t_grid, rep.theta_n);
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<double> modal_maxima(double t, std::span<const int> n_max_values, const std::function<double(int)>& xi) {
  int top = 0;
  for (int m : n_max_values) top = std::max(top, m);
  std::vector<double> value(static_cast<std::size_t>(top) + 1, 0.0);
  for (int n = 1; n <= top; ++n) value[n] = std::abs(modal_theta_talbot(n, xi(n), t));
  std::vector<double> out;
  for (int m : n_max_values) {
    double best = 0.0;
    for (int n = 1; n <= m; ++n) best = std::max(best, value[n]);
    out.push_back(best);
  }
  return out;
}

FiniteSpeedReport run_finite_speed_check(const MemoryKernel& kernel, std::span<const double> x_probes,
                                         double tolerance, const SpeedCheckParams& params) {
  FiniteSpeedReport rep;
  const auto a = wave_speed(kernel);
  if (!a || x_probes.empty()) return rep;
  rep.a = *a;
  rep.dt = params.dt;
  rep.dx = *a * params.dt;
  double x_top = 0.0;
  for (double x : x_probes) x_top = std::max(x_top, x);
  const double T = params.T > 0.0 ? params.T : x_top / *a + 1.0;

  FieldSolution field;
  try {
    SolverParams sp;
    sp.dt = params.dt;
    sp.T = T;
    sp.nx = static_cast<int>(std::ceil(T / params.dt)) + 20;
    sp.x_max = rep.dx * sp.nx;
    field = solve_time_domain(kernel, BoundaryControl::ramp(), Geometry::semi_axis(), sp);
  } catch (const Error&) {
    return rep;
  }
  const BoundaryControl ramp = BoundaryControl::ramp();
  double f_inf = 0.0;
  for (double t : field.t_grid) f_inf = std::max(f_inf, std::abs(ramp.value(t)));

  rep.all_ok = true;
  for (double x : x_probes) {
    ProbeResult pr;
    pr.x = x;
    pr.predicted_arrival = x / *a;
    const std::vector<double> col = field.column(x);
    pr.measured_arrival = kInf;
    const double quiet_end = (x - 3.0 * rep.dx) / *a;
    for (std::size_t it = 0; it < col.size(); ++it) {
      const double t = field.t_grid[it];
      const double rel = std::abs(col[it]) / f_inf;
      if (t < quiet_end) pr.quiet_max = std::max(pr.quiet_max, rel);
      if (rel > tolerance && pr.measured_arrival == kInf) pr.measured_arrival = t;
    }
    pr.quiet_ok = pr.quiet_max < tolerance;
    pr.arrival_ok = std::abs(pr.measured_arrival - pr.predicted_arrival) <= 2.0 * params.dt * (1.0 + 1e-9);
    rep.all_ok = rep.all_ok && pr.quiet_ok && pr.arrival_ok;
    rep.probes.push_back(pr);
  }
  return rep;
}

}  // namespace gpmem
