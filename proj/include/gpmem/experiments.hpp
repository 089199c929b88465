#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gpmem/forward.hpp"
#include "gpmem/inverse.hpp"
#include "gpmem/kernel.hpp"
#include "gpmem/laplace.hpp"

namespace gpmem {

struct UniquenessReport {
  double T = 0.0;
  /// sup over [0, T] of |r1 - r2|.
  double sup_diff_before = 0.0;
  /// First time with |r1 - r2| > threshold; +inf when the responses never separate.
  double first_divergence_time = 0.0;
  double threshold = 0.0;
  /// max |r(dt) - r(dt/2)| over both kernels and the whole horizon.
  double self_error = 0.0;
  TimeSignal r1{1.0, {0.0, 0.0}};
  TimeSignal r2{1.0, {0.0, 0.0}};
};

struct UniquenessParams {
  /// Extra horizon past T.
  double delta = 2.0;
  double dt = 5e-3;
  /// Threshold = max(threshold_factor * self_error, threshold_floor).
  double threshold_factor = 10.0;
  double threshold_floor = 1e-12;
};

/// Simulates both responses to T + delta on a grid with a dt = dx and
/// compares them. The kernels must share k(0) > 0; the caller builds k2 from k1
/// with a perturbation supported in (T, inf).
UniquenessReport run_uniqueness_experiment(const MemoryKernel& k1, const MemoryKernel& k2, double T,
                                           const Geometry& geometry, const UniquenessParams& params = {});

/// k1 + ((t - T)^+)^2: equal to k1 on [0, T] with matching value and slope.
MemoryKernel perturb_after(const MemoryKernel& k1, double T, double coeff = 1.0);

struct TruncationReport {
  std::vector<Complex> z;
  std::vector<Complex> timedomain;
  std::vector<Complex> contour;
  double max_deviation = 0.0;
  /// Largest cutoff-error estimate of the contour quadrature.
  double max_cutoff_error = 0.0;
};

struct TruncationParams {
  /// Step of the synthetic response used by the time-domain projection.
  double dt = 1e-3;
  ContourQuadrature quad{};
};

/// max over the grid of |project_RT_timedomain - project_RT_contour| for the
/// ramp response of `kernel` on the semi-axis.
TruncationReport run_truncation_consistency(const MemoryKernel& kernel, double T, const FrequencyGrid& z_grid,
                                            const TruncationParams& params = {});

struct ModalGrowthReport {
  int n = 0;
  double xi = 0.0;
  std::vector<double> t_grid;
  /// By contour inversion.
  std::vector<double> theta_n;
  /// By the residue sum over the four poles.
  std::vector<double> theta_residue;
  std::vector<Complex> poles;
  /// Residue of xi z^3/(z^4 + n^2) divided by xi, measured by a small circle
  /// integral around each pole (mean over the four poles).
  double residue_constant = 0.0;
  double fitted_rate = 0.0;
  double predicted_rate = 0.0;
  /// Largest |contour - residue| / |residue| over points with |residue| > 1e-10.
  double max_rel_deviation = 0.0;
  /// Largest t kept for this mode (growth guard).
  double t_safe = 0.0;
};

struct NonSobolevParams {
  /// Points with sqrt(n/2) t above this are dropped.
  double growth_guard = 10.0;
};

/// Modes of the t^2/2 kernel on (0, pi): theta_n(t) from Theta_n = xi z^3/(z^4 + n^2)
/// by Talbot inversion and by residues; growth fitted on the peaks of |theta_n|.
std::vector<ModalGrowthReport> run_nonsobolev_demo(int n_max, const std::function<double(int)>& xi,
                                                   std::span<const double> t_grid, const NonSobolevParams& params = {});

/// theta_n(t) for one mode by Talbot inversion with the contour sized to the poles.
double modal_theta_talbot(int n, double xi_n, double t);

/// theta_n(t) by the residue sum (xi/4) sum_k e^{z_k t}.
double modal_theta_residue(int n, double xi_n, double t);

/// max over 1 <= n <= n_max of |theta_n(t)| for each n_max.
std::vector<double> modal_maxima(double t, std::span<const int> n_max_values, const std::function<double(int)>& xi);

/// Exponent of the log-linear fit of |theta| on its local maxima in the upper
/// half of the grid (all points above 1e-3 max if there are fewer than two peaks).
double fit_growth_rate(std::span<const double> t, std::span<const double> theta);

struct ProbeResult {
  double x = 0.0;
  double predicted_arrival = 0.0;
  /// First grid time with |theta| > tolerance * |f|_inf; +inf if none.
  double measured_arrival = 0.0;
  /// max |theta| / |f|_inf for t < (x - 3 dx)/a.
  double quiet_max = 0.0;
  bool quiet_ok = false;
  bool arrival_ok = false;
};

struct FiniteSpeedReport {
  double a = 0.0;
  double dt = 0.0;
  double dx = 0.0;
  std::vector<ProbeResult> probes;
  bool all_ok = false;
};

struct SpeedCheckParams {
  double dt = 5e-3;
  /// Horizon; 0 picks max(x)/a + 1.
  double T = 0.0;
};

/// Ramp-driven semi-axis solve on a grid with a dt = dx. Failures are reported,
/// not thrown.
FiniteSpeedReport run_finite_speed_check(const MemoryKernel& kernel, std::span<const double> x_probes, double tolerance,
                                         const SpeedCheckParams& params = {});

}  // namespace gpmem
