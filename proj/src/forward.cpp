#include "gpmem/forward.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gpmem/error.hpp"

namespace gpmem {

namespace {

// The part of the kernel without delta terms; its k(0) sets the CFL limit.
std::optional<double> smooth_wave_speed(const MemoryKernel& kernel) {
  std::vector<kernels::Term> smooth;
  for (const auto& t : kernel.terms()) {
    if (!std::holds_alternative<kernels::DiracDelta>(t)) smooth.push_back(t);
  }
  if (smooth.empty()) return std::nullopt;
  const double a2 = MemoryKernel(std::move(smooth)).value(0.0);
  if (a2 > 0.0) return std::sqrt(a2);
  return std::nullopt;
}

void require_inversion_path(const MemoryKernel& kernel, const BoundaryControl& control, const ContourSpec& contour) {
  if (!std::holds_alternative<Talbot>(contour)) return;
  if (!kernel.is_analytic() || !control.is_ramp()) {
    throw Error(ErrorCode::InvalidArgument,
                "sampled kernels and controls have no continuation left of the imaginary axis; use a Bromwich line");
  }
}

}  // namespace

Geometry Geometry::interval(double L) {
  if (!(L > 0.0) || !std::isfinite(L)) throw Error(ErrorCode::InvalidArgument, "interval length must be positive");
  return Geometry{L};
}

BoundaryControl BoundaryControl::ramp() { return BoundaryControl{}; }

BoundaryControl BoundaryControl::sampled(TimeSignal samples) {
  double scale = 0.0;
  for (double v : samples.values()) scale = std::max(scale, std::abs(v));
  if (std::abs(samples[0]) > 1e-12 * std::max(scale, 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "a boundary control must start from f(0) = 0");
  }
  BoundaryControl c;
  c.samples_ = std::move(samples);
  return c;
}

double BoundaryControl::value(double t) const {
  if (!samples_) return std::max(t, 0.0);
  return samples_->at(t);
}

Complex BoundaryControl::transform(Complex z) const {
  if (!samples_) return 1.0 / (z * z);
  return forward_laplace(*samples_, z).value;
}

std::vector<double> FieldSolution::column(double x) const {
  std::size_t ix = 0;
  for (std::size_t i = 1; i < x_grid.size(); ++i) {
    if (std::abs(x_grid[i] - x) < std::abs(x_grid[ix] - x)) ix = i;
  }
  std::vector<double> out(t_grid.size());
  for (std::size_t it = 0; it < t_grid.size(); ++it) out[it] = (*this)(it, ix);
  return out;
}

Complex omega(const MemoryKernel& kernel, Complex z) {
  const Complex K = kernel.laplace(z).value;
  if (K == Complex{0.0, 0.0} || !std::isfinite(std::abs(K))) {
    throw Error(ErrorCode::KernelZero, "K(z) vanishes or is not finite at z = (" + std::to_string(z.real()) + ", " +
                                           std::to_string(z.imag()) + ")");
  }
  const Complex w = std::sqrt(z / K);
  if (!(w.real() > 0.0)) {
    throw Error(ErrorCode::BranchViolation,
                "Re omega <= 0 at z = (" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")");
  }
  return w;
}

Complex omega_continued(const MemoryKernel& kernel, Complex z, std::optional<double> a) {
  if (z.real() > 0.0) return omega(kernel, z);
  const Complex K = kernel.laplace_continued(z);
  if (K == Complex{0.0, 0.0}) throw Error(ErrorCode::KernelZero, "K vanishes on the contour");
  const Complex w = std::sqrt(z / K);
  if (!a) return w;
  const Complex target = z / *a;
  return std::abs(w - target) <= std::abs(-w - target) ? w : -w;
}

Complex theta_hat_semiaxis(const MemoryKernel& kernel, const BoundaryControl& control, double x, Complex z) {
  if (!(x >= 0.0)) throw Error(ErrorCode::InvalidArgument, "x must be nonnegative");
  const Complex F = control.transform(z);
  if (x == 0.0) return F;
  return F * std::exp(-omega(kernel, z) * x);
}

Complex response_semiaxis(const MemoryKernel& kernel, const BoundaryControl& control, Complex z) {
  return -control.transform(z) * omega(kernel, z);
}

Complex stable_coth(Complex u) {
  if (u.real() < 0.0) return -stable_coth(-u);
  const Complex e = std::exp(-2.0 * u);
  return (1.0 + e) / (1.0 - e);
}

Complex response_interval(const MemoryKernel& kernel, const BoundaryControl& control, double L, Complex z) {
  if (!(L > 0.0)) throw Error(ErrorCode::InvalidArgument, "interval length must be positive");
  const Complex w = omega(kernel, z);
  const Complex u = w * L;
  // |sinh u| / e^{|Re u|} = |1 - e^{-2u}| / 2 for Re u >= 0.
  if (std::abs(1.0 - std::exp(-2.0 * u)) / 2.0 <= 1e-8) {
    throw Error(ErrorCode::NearPole, "omega L is within tolerance of a zero of sinh");
  }
  return -w * control.transform(z) * stable_coth(u);
}

std::optional<double> wave_speed(const MemoryKernel& kernel) {
  const auto a2 = kernel.wave_speed_sq();
  if (a2 && *a2 > 0.0) return std::sqrt(*a2);
  return std::nullopt;
}

namespace {

// A line sum cut at height Y errs by about |residual transform| near Y. Under
// the ramp R = -1/(a z) + c/z^2 + O(1/z^3); both terms are removed on the line
// and restored as -1/a + c t. c is read off the real axis by extrapolation.
std::vector<double> invert_on_line(const Evaluator& R, std::optional<double> a, const BoundaryControl& control,
                                   std::span<const double> times, const BromwichFFT& line) {
  if (!a || !control.is_ramp()) return inverse_laplace(R, times, ContourSpec{line});
  const double inv_a = 1.0 / *a;
  auto c_at = [&](double z) { return (z * z * (R(Complex(z, 0.0)) + inv_a / z)).real(); };
  const double c = 2.0 * c_at(2e3) - c_at(1e3);
  std::vector<double> out =
      inverse_laplace([&](Complex z) { return R(z) + inv_a / z - c / (z * z); }, times, ContourSpec{line});
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += -inv_a + c * times[i];
  return out;
}

}  // namespace

std::vector<double> theta_semiaxis_time(const MemoryKernel& kernel, const BoundaryControl& control, double x,
                                        std::span<const double> times, const ContourSpec& contour) {
  require_inversion_path(kernel, control, contour);
  const auto a = wave_speed(kernel);
  const double delay = a ? x / *a : 0.0;
  const Evaluator F = [&](Complex z) {
    const Complex w = omega_continued(kernel, z, a);
    const Complex lead = a ? z / *a : Complex{0.0, 0.0};
    return control.transform(z) * std::exp(-(w - lead) * x);
  };
  return inverse_laplace(F, times, contour, delay);
}

std::vector<double> response_semiaxis_time(const MemoryKernel& kernel, const BoundaryControl& control,
                                           std::span<const double> times, const ContourSpec& contour) {
  require_inversion_path(kernel, control, contour);
  const auto a = wave_speed(kernel);
  if (std::holds_alternative<BromwichFFT>(contour)) {
    return invert_on_line([&](Complex z) { return response_semiaxis(kernel, control, z); }, a, control, times,
                          std::get<BromwichFFT>(contour));
  }
  const Evaluator F = [&](Complex z) { return -control.transform(z) * omega_continued(kernel, z, a); };
  return inverse_laplace(F, times, contour);
}

std::vector<double> response_interval_time(const MemoryKernel& kernel, const BoundaryControl& control, double L,
                                           std::span<const double> times, const BromwichFFT& line) {
  return invert_on_line([&](Complex z) { return response_interval(kernel, control, L, z); }, wave_speed(kernel),
                        control, times, line);
}

FieldSolution solve_time_domain(const MemoryKernel& kernel, const BoundaryControl& control, const Geometry& geometry,
                                const SolverParams& p) {
  if (p.nx < 16) throw Error(ErrorCode::InvalidArgument, "time-domain solver needs nx >= 16");
  if (!(p.dt > 0.0) || !(p.T > 0.0)) throw Error(ErrorCode::InvalidArgument, "time-domain solver needs dt > 0, T > 0");
  const auto a = smooth_wave_speed(kernel);
  const double atom = kernel.atom_at_zero();

  double x_max = p.x_max;
  if (geometry.finite()) {
    x_max = geometry.length;
  } else if (!(x_max > 0.0)) {
    if (a) {
      x_max = 1.1 * *a * p.T + 1.0;
    } else {
      x_max = 12.0 * std::sqrt(std::max(atom, 1e-300) * p.T) + 1.0;
    }
  }
  const int nx = p.nx;
  const double dx = x_max / nx;
  if (a && *a * p.dt > dx * (1.0 + 1e-12)) {
    throw Error(ErrorCode::CFLViolation, "a*dt = " + std::to_string(*a * p.dt) + " exceeds dx = " + std::to_string(dx));
  }
  if (!geometry.finite() && a && x_max < *a * p.T) {
    throw Error(ErrorCode::InvalidArgument, "semi-axis truncation x_max must be at least a*T");
  }

  const auto N = static_cast<std::size_t>(std::llround(p.T / p.dt));
  const std::size_t ni = static_cast<std::size_t>(nx) - 1;  // interior unknowns
  const double inv_dx2 = 1.0 / (dx * dx);

  std::vector<double> k1(N + 1);
  for (std::size_t m = 1; m <= N; ++m) k1[m] = kernel.integrated(p.dt * static_cast<double>(m));

  FieldSolution sol;
  sol.x_grid.resize(static_cast<std::size_t>(nx) + 1);
  for (int i = 0; i <= nx; ++i) sol.x_grid[i] = dx * i;
  sol.t_grid.resize(N + 1);
  for (std::size_t n = 0; n <= N; ++n) sol.t_grid[n] = p.dt * static_cast<double>(n);
  sol.values.assign((N + 1) * (static_cast<std::size_t>(nx) + 1), 0.0);
  if (a) sol.wave_speed = *a;

  // H[n] = discrete theta_xx at interior nodes after step n.
  std::vector<double> H((N + 1) * ni, 0.0);
  std::vector<double> S(ni);
  std::vector<double> cp(ni), dp(ni);
  const double c = 0.5 * p.dt * atom;
  double prev_norm = 0.0;
  double f_scale = 0.0;

  for (std::size_t n = 1; n <= N; ++n) {
    const double fn = control.value(sol.t_grid[n]);
    f_scale = std::max(f_scale, std::abs(fn));
    std::fill(S.begin(), S.end(), 0.0);
    for (std::size_t j = 1; j < n; ++j) {
      const double w = p.dt * k1[n - j];
      const double* h = &H[j * ni];
      for (std::size_t i = 0; i < ni; ++i) S[i] += w * h[i];
    }
    double* row = &sol.values[n * (static_cast<std::size_t>(nx) + 1)];
    row[0] = fn;
    row[nx] = 0.0;
    if (c == 0.0) {
      for (std::size_t i = 0; i < ni; ++i) row[i + 1] = S[i];
    } else {
      // (I - c A) theta = S with the boundary value moved to the right side.
      const double off = -c * inv_dx2;
      const double diag = 1.0 + 2.0 * c * inv_dx2;
      S[0] += c * inv_dx2 * fn;
      cp[0] = off / diag;
      dp[0] = S[0] / diag;
      for (std::size_t i = 1; i < ni; ++i) {
        const double m = diag - off * cp[i - 1];
        cp[i] = off / m;
        dp[i] = (S[i] - off * dp[i - 1]) / m;
      }
      row[ni] = dp[ni - 1];
      for (std::size_t i = ni - 1; i-- > 0;) row[i + 1] = dp[i] - cp[i] * row[i + 2];
    }
    double norm = 0.0;
    double* h = &H[n * ni];
    for (std::size_t i = 0; i < ni; ++i) {
      h[i] = (row[i] - 2.0 * row[i + 1] + row[i + 2]) * inv_dx2;
      norm = std::max(norm, std::abs(row[i + 1]));
    }
    if (!std::isfinite(norm) || norm > 1e6 * std::max({prev_norm, f_scale, 1e-300})) {
      throw Error(ErrorCode::UnstableStep, "field norm jumped to " + std::to_string(norm) + " at t = " +
                                               std::to_string(sol.t_grid[n]));
    }
    prev_norm = norm;
  }
  return sol;
}

TimeSignal extract_response(const FieldSolution& field) {
  if (field.nx() < 3 || field.nt() < 2) {
    throw Error(ErrorCode::InvalidArgument, "extract_response needs at least three x nodes and two times");
  }
  const double dx = field.x_grid[1] - field.x_grid[0];
  const double dt = field.t_grid[1] - field.t_grid[0];
  std::vector<double> r(field.nt());
  for (std::size_t it = 0; it < field.nt(); ++it) {
    const double u0 = field(it, 0), u1 = field(it, 1), u2 = field(it, 2);
    const bool near_front = field.wave_speed && field.t_grid[it] * *field.wave_speed < 2.0 * dx * (1.0 - 1e-9);
    r[it] = near_front ? (u1 - u0) / dx : (-3.0 * u0 + 4.0 * u1 - u2) / (2.0 * dx);
  }
  return TimeSignal(dt, std::move(r));
}

std::vector<Complex> modal_poles(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "mode index must be positive");
  std::vector<Complex> poles;
  const double r = std::sqrt(static_cast<double>(n));
  for (int k = 0; k < 4; ++k) poles.push_back(std::polar(r, std::numbers::pi / 4.0 + k * std::numbers::pi / 2.0));
  return poles;
}

ModalValue modal_solution(const MemoryKernel& kernel, int n, double xi_n, double t, const ContourSpec& contour) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "mode index must be positive");
  if (!(t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "modal solution needs t >= 0");
  ModalValue out;
  const auto terms = kernel.terms();
  if (terms.size() == 1 && std::holds_alternative<kernels::PolynomialHalfSquare>(terms[0])) out.poles = modal_poles(n);
  if (t == 0.0) {
    out.value = xi_n;
    return out;
  }
  const double n2 = static_cast<double>(n) * n;
  const Evaluator F = [&](Complex z) { return xi_n / (z + n2 * kernel.laplace_continued(z)); };
  out.value = inverse_laplace(F, t, contour);
  return out;
}

}  // namespace gpmem
