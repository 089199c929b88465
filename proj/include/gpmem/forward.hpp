#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "gpmem/kernel.hpp"
#include "gpmem/laplace.hpp"
#include "gpmem/signal.hpp"

namespace gpmem {

/// Spatial domain (0, L); L = +inf is the semi-axis.
struct Geometry {
  double length = std::numeric_limits<double>::infinity();

  static Geometry semi_axis() { return Geometry{}; }
  static Geometry interval(double L);
  bool finite() const noexcept { return length < std::numeric_limits<double>::infinity(); }
};

/// Dirichlet data f(t) at x = 0 with f(0) = 0.
class BoundaryControl {
 public:
  /// f(t) = t^+, F(z) = 1/z^2.
  static BoundaryControl ramp();
  /// Tabulated control; values[0] must vanish.
  static BoundaryControl sampled(TimeSignal samples);

  bool is_ramp() const noexcept { return !samples_.has_value(); }
  const std::optional<TimeSignal>& samples() const noexcept { return samples_; }

  double value(double t) const;
  /// F(z). The ramp continues to all z != 0; sampled controls need Re z > 0.
  Complex transform(Complex z) const;

 private:
  std::optional<TimeSignal> samples_;
};

/// theta(x_i, t_n) on a tensor grid, stored time-major.
struct FieldSolution {
  std::vector<double> x_grid;
  std::vector<double> t_grid;
  std::vector<double> values;
  /// Propagation speed a when the kernel has one; used to pick the boundary
  /// stencil while the front is within two cells of x = 0.
  std::optional<double> wave_speed;

  std::size_t nx() const noexcept { return x_grid.size(); }
  std::size_t nt() const noexcept { return t_grid.size(); }
  double operator()(std::size_t it, std::size_t ix) const noexcept { return values[it * x_grid.size() + ix]; }
  /// Time series at the grid column nearest to x.
  std::vector<double> column(double x) const;
};

/// Principal sqrt(z/K(z)) for Re z > 0. KernelZero if K(z) = 0; BranchViolation
/// if the root is not in the open right half-plane.
Complex omega(const MemoryKernel& kernel, Complex z);

/// omega continued off the right half-plane for closed-form kernels: the
/// principal root for Re z > 0, otherwise the root closest to z/a (or the
/// principal root when no wave speed is given). Used on Talbot contours.
Complex omega_continued(const MemoryKernel& kernel, Complex z, std::optional<double> wave_speed);

/// F(z) e^{-omega x}.
Complex theta_hat_semiaxis(const MemoryKernel& kernel, const BoundaryControl& control, double x, Complex z);

/// -F(z) omega(z).
Complex response_semiaxis(const MemoryKernel& kernel, const BoundaryControl& control, Complex z);

/// -omega F coth(omega L). NearPole when |sinh(omega L)| <= 1e-8 e^{|Re omega L|}.
Complex response_interval(const MemoryKernel& kernel, const BoundaryControl& control, double L, Complex z);

/// coth(u) evaluated without overflow.
Complex stable_coth(Complex u);

/// Wave speed a = sqrt(k(0)) when k(0) > 0, otherwise nothing.
std::optional<double> wave_speed(const MemoryKernel& kernel);

/// theta(x, t) on the semi-axis by numerical inversion. With a wave speed the
/// factor e^{-z x/a} is inverted as an exact delay.
std::vector<double> theta_semiaxis_time(const MemoryKernel& kernel, const BoundaryControl& control, double x,
                                        std::span<const double> times, const ContourSpec& contour);

/// r(t) on the semi-axis by numerical inversion of -F omega.
std::vector<double> response_semiaxis_time(const MemoryKernel& kernel, const BoundaryControl& control,
                                           std::span<const double> times, const ContourSpec& contour);

/// r(t) on (0, L). The transform has poles near the imaginary axis, so only a
/// Bromwich line is accepted.
std::vector<double> response_interval_time(const MemoryKernel& kernel, const BoundaryControl& control, double L,
                                           std::span<const double> times, const BromwichFFT& line);

struct SolverParams {
  /// Number of spatial cells.
  int nx = 600;
  double dt = 5e-3;
  double T = 5.0;
  /// Truncation point for the semi-axis; 0 picks a*T plus a margin.
  double x_max = 0.0;
};

/// Time-domain oracle for theta_t = Int_0^t k(t-s) theta_xx(s) ds with zero
/// initial data. The equation is integrated once in time,
///   theta(t) = Int_0^t k1(t-s) theta_xx(s) ds,  k1(t) = Int_0^t k,
/// and the history integral uses trapezoid weights on the time grid with
/// centred second differences in space. Only a delta component of k makes the
/// newest value implicit (a tridiagonal solve); for a constant kernel the
/// scheme is the leapfrog scheme, exact at a*dt = dx. The semi-axis is cut at
/// x_max >= a*T with a zero Dirichlet condition, which is exact by finite speed.
/// Throws CFLViolation if a*dt > dx and UnstableStep if the field grows by more
/// than 1e6 in one step.
FieldSolution solve_time_domain(const MemoryKernel& kernel, const BoundaryControl& control, const Geometry& geometry,
                                const SolverParams& params);

/// r(t) = theta_x(0, t) by the one-sided three-point stencil. While the front
/// is within two cells of the boundary the two-point stencil is used instead,
/// because the three-point stencil straddles the kink.
TimeSignal extract_response(const FieldSolution& field);

/// Roots of z^4 = -n^2, i.e. sqrt(n) e^{i pi/4} i^k for k = 0..3.
std::vector<Complex> modal_poles(int n);

struct ModalValue {
  double value = 0.0;
  /// Filled when the kernel is the t^2/2 kernel.
  std::vector<Complex> poles;
};

/// theta_n(t) = inverse transform of xi_n / (z + n^2 K(z)). t = 0 returns xi_n.
ModalValue modal_solution(const MemoryKernel& kernel, int n, double xi_n, double t, const ContourSpec& contour);

}  // namespace gpmem
