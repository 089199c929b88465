#include "gpmem/inverse.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "gpmem/error.hpp"

namespace gpmem {

namespace {

constexpr double kPi = std::numbers::pi;

Complex newton_run(Complex c, double L, Complex w, double tol, bool& ok) {
  auto g = [&](Complex v) { return v * stable_coth(v * L) + c; };
  Complex gv = g(w);
  ok = false;
  for (int it = 0; it < 100; ++it) {
    if (!std::isfinite(std::abs(gv))) return w;
    if (std::abs(gv) < tol) {
      ok = true;
      return w;
    }
    const Complex ct = stable_coth(w * L);
    const Complex dg = ct - w * L * (ct * ct - 1.0);
    if (dg == Complex{0.0, 0.0}) return w;
    Complex step = gv / dg;
    bool improved = false;
    for (int h = 0; h <= 20; ++h) {
      const Complex trial = w - step;
      const Complex gt = g(trial);
      if (std::isfinite(std::abs(gt)) && std::abs(gt) < std::abs(gv)) {
        w = trial;
        gv = gt;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) {
      ok = std::abs(gv) < tol;
      return w;
    }
  }
  ok = std::abs(gv) < tol;
  return w;
}

// Least-squares fit of Re(z K(z)) = a^2 + c1/z + c2/z^2 at the given real z.
std::array<double, 3> fit_asymptotics(const Evaluator& K, std::span<const double> zs) {
  double A[3][3] = {}, b[3] = {};
  for (double z : zs) {
    const double y = (Complex(z, 0.0) * K(Complex(z, 0.0))).real();
    const double row[3] = {1.0, 1.0 / z, 1.0 / (z * z)};
    for (int i = 0; i < 3; ++i) {
      b[i] += row[i] * y;
      for (int j = 0; j < 3; ++j) A[i][j] += row[i] * row[j];
    }
  }
  // Gaussian elimination with partial pivoting.
  int perm[3] = {0, 1, 2};
  for (int c = 0; c < 3; ++c) {
    int p = c;
    for (int r = c + 1; r < 3; ++r) {
      if (std::abs(A[perm[r]][c]) > std::abs(A[perm[p]][c])) p = r;
    }
    std::swap(perm[c], perm[p]);
    for (int r = c + 1; r < 3; ++r) {
      const double f = A[perm[r]][c] / A[perm[c]][c];
      for (int j = c; j < 3; ++j) A[perm[r]][j] -= f * A[perm[c]][j];
      b[perm[r]] -= f * b[perm[c]];
    }
  }
  std::array<double, 3> x{};
  for (int c = 2; c >= 0; --c) {
    double s = b[perm[c]];
    for (int j = c + 1; j < 3; ++j) s -= A[perm[c]][j] * x[j];
    x[c] = s / A[perm[c]][c];
  }
  return x;
}

void check_uniform_grid(std::span<const double> t, double& dt) {
  if (t.size() < 2 || t[0] != 0.0) {
    throw Error(ErrorCode::InvalidArgument, "kernel grid must start at 0 and have at least two points");
  }
  dt = t[1] - t[0];
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "kernel grid must be increasing");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (std::abs(t[i] - dt * static_cast<double>(i)) > 1e-9 * dt * static_cast<double>(i)) {
      throw Error(ErrorCode::InvalidArgument, "kernel grid must be uniform");
    }
  }
}

}  // namespace

ResponseRecord make_synthetic_record(const MemoryKernel& kernel, const Geometry& geometry, double dt, double horizon,
                                     const ContourSpec& contour) {
  if (!(dt > 0.0) || !(horizon > dt)) throw Error(ErrorCode::InvalidArgument, "synthetic record needs 0 < dt < horizon");
  const auto n = static_cast<std::size_t>(std::llround(horizon / dt));
  std::vector<double> ts(n);
  for (std::size_t i = 0; i < n; ++i) ts[i] = dt * static_cast<double>(i + 1);
  const BoundaryControl ramp = BoundaryControl::ramp();
  std::vector<double> r;
  if (geometry.finite()) {
    const BromwichFFT line = std::holds_alternative<BromwichFFT>(contour) ? std::get<BromwichFFT>(contour)
                                                                          : line_for_horizon(horizon);
    r = response_interval_time(kernel, ramp, geometry.length, ts, line);
  } else {
    r = response_semiaxis_time(kernel, ramp, ts, contour);
  }
  const auto a = wave_speed(kernel);
  r.insert(r.begin(), a ? -1.0 / *a : 0.0);
  return ResponseRecord{geometry, ramp, TimeSignal(dt, std::move(r)), "synthetic:" + kernel.describe()};
}

Complex recover_K_semiaxis(Complex R, Complex F, Complex z) {
  if (R == Complex{0.0, 0.0} || F == Complex{0.0, 0.0}) {
    throw Error(ErrorCode::ZeroResponse, "recovery needs nonzero response and control transforms");
  }
  if (!(z.real() > 0.0)) throw Error(ErrorCode::NonpositiveRealPart, "recovery needs Re z > 0");
  const Complex K = z * F * F / (R * R);
  const Complex back = -F * std::sqrt(z / K);
  if (std::abs(back - R) > 1e-8 * std::abs(R)) {
    throw Error(ErrorCode::BranchMismatch, "-F omega reproduces -R rather than R: the data are off the main branch");
  }
  return K;
}

Evaluator kernel_from_response(Evaluator R, Evaluator F) {
  return [R = std::move(R), F = std::move(F)](Complex z) -> Complex {
    const Complex r = R(z);
    const Complex f = F(z);
    if (z.real() > 0.0) return recover_K_semiaxis(r, f, z);
    return z * f * f / (r * r);
  };
}

Complex recover_omega_interval(Complex R, Complex F, double L, Complex z) {
  if (F == Complex{0.0, 0.0}) throw Error(ErrorCode::ZeroResponse, "recovery needs a nonzero control transform");
  if (R == Complex{0.0, 0.0}) throw Error(ErrorCode::ZeroResponse, "recovery needs a nonzero response transform");
  if (!(L > 0.0)) throw Error(ErrorCode::InvalidArgument, "interval length must be positive");
  if (!(z.real() > 0.0)) throw Error(ErrorCode::NonpositiveRealPart, "recovery needs Re z > 0");
  const Complex c = R / F;
  const Complex w0 = -c;
  const double tol = 1e-12 * (1.0 + std::abs(c));
  for (const Complex start : {w0, w0 * Complex(1.0, 0.1), w0 * Complex(1.0, -0.1)}) {
    bool ok = false;
    Complex w = newton_run(c, L, start, tol, ok);
    if (!ok) continue;
    // omega coth(omega L) is even in omega.
    if (w.real() < 0.0) w = -w;
    if (!(w.real() > 0.0)) throw Error(ErrorCode::WrongHalfPlane, "recovered omega lies on the imaginary axis");
    return w;
  }
  throw Error(ErrorCode::NewtonDivergence, "Newton iteration for omega did not converge from any start");
}

TimeSignal reconstruct_kernel_time(const Evaluator& K, double a, std::span<const double> t_grid,
                                   const ContourSpec& contour, const KernelInversionOptions& opts) {
  if (!(a > 0.0)) throw Error(ErrorCode::InvalidArgument, "wave speed a must be positive");
  double dt = 0.0;
  check_uniform_grid(t_grid, dt);
  const double a2 = a * a;
  const double c1 = opts.slope;
  if (opts.check_k0) {
    const double d_lo = std::abs(64.0 * K(Complex(64.0, 0.0)) - a2);
    const double d_hi = std::abs(4096.0 * K(Complex(4096.0, 0.0)) - a2);
    if (!(d_hi <= 1e-2 * std::max(a2, 1.0)) || !(d_hi <= d_lo + 1e-9 * a2)) {
      throw Error(ErrorCode::K0Violation, "z K(z) does not settle at a^2 = " + std::to_string(a2));
    }
  }
  const Evaluator rem = [&](Complex z) { return K(z) - a2 / z - c1 / (z * z); };
  std::vector<double> out(t_grid.size());
  out[0] = a2;
  const std::vector<double> inner =
      inverse_laplace(rem, std::span<const double>(t_grid).subspan(1), contour);
  for (std::size_t i = 1; i < t_grid.size(); ++i) out[i] = a2 + c1 * t_grid[i] + inner[i - 1];
  return TimeSignal(dt, std::move(out));
}

ReconstructionResult recover_from_finite_data(const ResponseRecord& record, double T_obs, const FrequencyGrid& z_grid,
                                              const ContourSpec& contour, const FiniteDataOptions& opts) {
  if (!record.control.is_ramp()) {
    throw Error(ErrorCode::InvalidArgument, "finite-data reconstruction needs the ramp control");
  }
  const auto* line_in = std::get_if<BromwichFFT>(&contour);
  if (!line_in) {
    throw Error(ErrorCode::InvalidArgument,
                "finite-data reconstruction inverts on a Bromwich line; a Talbot contour would leave the region "
                "where the truncated data are trustworthy");
  }
  validate_contour(contour);
  const TimeSignal& r = record.r;
  if (!(T_obs > 0.0)) throw Error(ErrorCode::InvalidArgument, "T_obs must be positive");
  if (T_obs > r.horizon() * (1.0 + 1e-12)) {
    throw Error(ErrorCode::TruncationBeyondHorizon, "T_obs exceeds the record horizon");
  }

  struct Point {
    Complex K;
    Complex RT;
  };
  auto recover = [&](Complex z) -> Point {
    const Complex RT = project_RT_timedomain(r, T_obs, z);
    const Complex F = 1.0 / (z * z);
    if (record.geometry.finite()) {
      const Complex w = recover_omega_interval(RT, F, record.geometry.length, z);
      return {z / (w * w), RT};
    }
    return {recover_K_semiaxis(RT, F, z), RT};
  };
  const Evaluator Kdata = [&](Complex z) { return recover(z).K; };

  ReconstructionResult res;
  const std::array<double, 3> fit_z = {20.0, 40.0, 80.0};
  const auto coef = fit_asymptotics(Kdata, fit_z);
  double a2 = coef[0];
  if (opts.true_a) a2 = *opts.true_a * *opts.true_a;
  if (!(a2 > 0.0)) throw Error(ErrorCode::K0Violation, "data give a nonpositive a^2 estimate");
  const double a = std::sqrt(a2);
  res.a_estimate = a;
  res.slope_estimate = coef[1];

  // Truncation error of R^T. With |r| <= C (1 + t) beyond T the tail is at
  // most C e^{-sT}((1+T)/s + 1/s^2); one integration by parts with |r'| <= D
  // gives e^{-sT}(|r(T)| + D/s)/|z|, which decays along vertical lines.
  double C = a;
  double D = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double t = r.time(i);
    if (t >= 0.9 * T_obs && t <= T_obs) {
      C = std::max(C, std::abs(r[i]) / (1.0 + t));
      if (i > 0) D = std::max(D, std::abs(r[i] - r[i - 1]) / r.dt());
    }
  }
  const double T = T_obs;
  const double rT = std::abs(r.at(T));
  auto eps = [&](Complex z) {
    const double s = z.real();
    const double crude = C * ((1.0 + T) / s + 1.0 / (s * s));
    const double parts = (rT + D / s) / std::abs(z);
    return std::exp(-s * T) * std::min(crude, parts);
  };

  // Sampling error of the piecewise-linear projection: on a step of length
  // dt the interpolation error integrates to at most dt^3/12 |r''|, with
  // r'' read off the second differences.
  std::vector<std::pair<double, double>> curvature;
  for (std::size_t i = 1; i + 1 < r.size() && r.time(i) < T_obs; ++i) {
    const double d2 = std::abs(r[i + 1] - 2.0 * r[i] + r[i - 1]);
    if (d2 > 0.0) curvature.emplace_back(r.time(i), d2);
  }
  auto sampling = [&](Complex z) {
    double acc = 0.0;
    for (const auto& [t, d2] : curvature) acc += d2 * std::exp(-z.real() * (t - r.dt()));
    return r.dt() / 12.0 * acc;
  };

  bool any = false;
  for (const Complex z : z_grid.points()) {
    KSample ks{z, Complex{0.0, 0.0}, std::numeric_limits<double>::infinity(), false};
    try {
      const Point p = recover(z);
      ks.K = p.K;
      ks.error = 2.0 * std::abs(p.K) * (eps(z) + sampling(z)) / std::abs(p.RT);
      ks.gated = eps(z) <= opts.gate_tol;
    } catch (const Error&) {
      // Points where the truncated data leave the main branch are reported ungated.
    }
    any = any || ks.gated;
    res.K_samples.push_back(ks);
  }
  if (!any) {
    throw Error(ErrorCode::InsufficientHorizon,
                "no grid point has a truncation error below " + std::to_string(opts.gate_tol) + " at T_obs = " +
                    std::to_string(T_obs));
  }

  // Smallest abscissa whose real point passes the gate (eps decreases in s).
  double lo = 1e-9, hi = 1e3;
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    (eps(Complex(mid, 0.0)) > opts.gate_tol ? lo : hi) = mid;
  }
  BromwichFFT line = *line_in;
  line.abscissa = std::max(line.abscissa, hi);
  const double need = std::ceil(3.0 * T_obs * line.cutoff / (2.0 * kPi));
  line.nodes = std::max(line.nodes, static_cast<int>(need));
  res.sigma = line.abscissa;

  const double horizon = opts.k_horizon > 0.0 ? opts.k_horizon : T_obs;
  if (!(opts.k_dt > 0.0) || !(horizon > opts.k_dt)) {
    throw Error(ErrorCode::InvalidArgument, "kernel output grid needs 0 < k_dt < horizon");
  }
  const auto nk = static_cast<std::size_t>(std::llround(horizon / opts.k_dt));
  std::vector<double> tk(nk + 1);
  for (std::size_t i = 0; i <= nk; ++i) tk[i] = opts.k_dt * static_cast<double>(i);
  KernelInversionOptions kio;
  kio.slope = res.slope_estimate;
  kio.check_k0 = true;
  res.k = reconstruct_kernel_time(Kdata, a, tk, ContourSpec{line}, kio);

  // Error model on the line: truncation and sampling error of the data and the cutoff tail.
  const double sigma = line.abscissa;
  const int n_sub = 1024;
  const double dy = line.cutoff / n_sub;
  const double line_sampling = sampling(Complex(sigma, 0.0));
  double data = 0.0;
  for (int m = -n_sub; m <= n_sub; ++m) {
    const Complex z{sigma, dy * m};
    const Point p = recover(z);
    data += 2.0 * std::abs(p.K) * (eps(z) + line_sampling) / std::abs(p.RT) * dy;
  }
  data /= 2.0 * kPi;
  const Complex zc{sigma, line.cutoff};
  const double tail = std::abs(Kdata(zc) - a2 / zc - res.slope_estimate / (zc * zc)) * line.cutoff / (2.0 * kPi);
  res.k_error.resize(tk.size());
  res.T_reliable = 0.0;
  bool ok = true;
  for (std::size_t i = 0; i < tk.size(); ++i) {
    res.k_error[i] = std::exp(sigma * tk[i]) * (data + tail);
    ok = ok && res.k_error[i] <= opts.k_tol;
    if (ok) res.T_reliable = tk[i];
  }
  res.T_reliable = std::min(res.T_reliable, T_obs);

  if (opts.consistency_check && res.T_reliable > 0.0) {
    const double Th = std::min(res.T_reliable, opts.check_horizon);
    const auto nkeep = std::min(res.k.size(), static_cast<std::size_t>(std::ceil(Th / opts.k_dt)) + 2);
    std::vector<double> kv(res.k.values().begin(), res.k.values().begin() + static_cast<std::ptrdiff_t>(nkeep));
    const MemoryKernel krec = MemoryKernel::sampled(TimeSignal(opts.k_dt, std::move(kv)));
    const double a_rec = std::sqrt(std::max(krec.value(0.0), 1e-300));
    const Geometry geo = record.geometry;
    auto simulate = [&](double dt) {
      SolverParams sp;
      sp.dt = dt;
      sp.T = Th;
      if (geo.finite()) {
        sp.nx = std::max(16, static_cast<int>(std::floor(geo.length / (a_rec * dt) * (1.0 + 1e-12))));
      } else {
        sp.nx = std::max(16, static_cast<int>(std::ceil(Th / dt)) + 20);
        sp.x_max = a_rec * dt * sp.nx;
      }
      return extract_response(solve_time_domain(krec, record.control, geo, sp));
    };
    // The half-step run measures the solver's own error, which is dominated
    // by the first-order boundary stencil while the front leaves x = 0.
    const TimeSignal rs = simulate(opts.check_dt);
    const TimeSignal rh = simulate(0.5 * opts.check_dt);
    double scale = 0.0;
    for (std::size_t i = 0; i < rs.size(); ++i) scale = std::max(scale, std::abs(r.at(rs.time(i))));
    double worst = 0.0;
    double first_bad = std::numeric_limits<double>::infinity();
    // i = 0 is skipped: the discrete field starts from zero while r(0+) = -a.
    for (std::size_t i = 1; i < rs.size(); ++i) {
      const double d = std::abs(rs[i] - r.at(rs.time(i)));
      const double self = std::abs(rs[i] - rh[std::min(2 * i, rh.size() - 1)]);
      worst = std::max(worst, d);
      if (d > opts.consistency_tol * scale + 2.0 * self && rs.time(i) < first_bad) first_bad = rs.time(i);
    }
    const double dt_check = opts.check_dt;
    res.consistency_residual = worst;
    if (std::isfinite(first_bad)) res.T_reliable = std::min(res.T_reliable, std::max(0.0, first_bad - dt_check));
  }
  return res;
}

}  // namespace gpmem
