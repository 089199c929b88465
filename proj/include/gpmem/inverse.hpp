#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpmem/forward.hpp"
#include "gpmem/kernel.hpp"
#include "gpmem/laplace.hpp"
#include "gpmem/signal.hpp"

namespace gpmem {

/// A boundary observation r(t) = theta_x(0, t) for a known control.
struct ResponseRecord {
  Geometry geometry;
  BoundaryControl control;
  TimeSignal r;
  /// "synthetic:<kernel>" or "external".
  std::string provenance = "external";
};

/// Synthetic ramp-control record sampled at 0, dt, ..., horizon by numerical
/// inversion of the exact response transform; r(0) = lim z R(z) = -1/a.
/// Semi-axis records use `contour`; interval records always use a Bromwich line.
ResponseRecord make_synthetic_record(const MemoryKernel& kernel, const Geometry& geometry, double dt, double horizon,
                                     const ContourSpec& contour = Talbot{});

/// K = z F^2 / R^2 from the semi-axis relation R = -F omega. ZeroResponse if
/// R or F vanishes; BranchMismatch unless -F sqrt(z/K) reproduces R (not -R).
Complex recover_K_semiaxis(Complex R, Complex F, Complex z);

/// z -> z F(z)^2 / R(z)^2 as an evaluator. The branch check of
/// recover_K_semiaxis runs wherever Re z > 0; to the left of the imaginary
/// axis (Talbot nodes) the formula is applied to the continued data as is.
Evaluator kernel_from_response(Evaluator R, Evaluator F);

/// Solves omega coth(omega L) = -R/F by damped Newton (step halving up to 20
/// times, restarts from omega0 (1 +/- 0.1i)), omega0 = -R/F. The residual must
/// drop below 1e-12 (1 + |R/F|). NewtonDivergence if no start converges;
/// WrongHalfPlane if the root has Re omega <= 0.
Complex recover_omega_interval(Complex R, Complex F, double L, Complex z);

struct KernelInversionOptions {
  /// Second coefficient c1 of z K = a^2 + c1/z + ...; removed together with
  /// a^2/z and restored as c1 t, so the inverted remainder decays like 1/z^3.
  double slope = 0.0;
  /// Check that z K(z) approaches a^2 along the real axis (K0Violation).
  bool check_k0 = true;
};

/// k(t) = a^2 + c1 t + inverse transform of K(z) - a^2/z - c1/z^2 on a uniform
/// grid starting at 0.
TimeSignal reconstruct_kernel_time(const Evaluator& K, double a, std::span<const double> t_grid,
                                   const ContourSpec& contour, const KernelInversionOptions& opts = {});

struct KSample {
  Complex z;
  Complex K;
  /// Bound on |K - K_true| from truncating the data at T_obs.
  double error = 0.0;
  /// True when the truncation error of R^T at z is below the gate.
  bool gated = false;
};

struct ReconstructionResult {
  std::vector<KSample> K_samples;
  double a_estimate = 0.0;
  /// Second asymptotic coefficient of z K(z), i.e. k'(0).
  double slope_estimate = 0.0;
  TimeSignal k{1.0, {0.0, 0.0}};
  std::vector<double> k_error;
  double T_reliable = 0.0;
  /// Abscissa of the inversion line.
  double sigma = 0.0;
  /// Max |r_resim - r| on the re-simulation window, or -1 if not run.
  double consistency_residual = -1.0;
};

struct FiniteDataOptions {
  /// Points with a truncation error of R^T above this are not used.
  double gate_tol = 1e-6;
  /// Per-sample error level that bounds T_reliable.
  double k_tol = 1e-3;
  /// Output grid for k; 0 means T_obs.
  double k_dt = 0.05;
  double k_horizon = 0.0;
  /// Use this a instead of the data estimate (for ablation runs).
  std::optional<double> true_a;
  /// Re-simulate the reconstructed kernel and shorten T_reliable where the
  /// response misfit exceeds consistency_tol * max|r|.
  bool consistency_check = true;
  double consistency_tol = 1e-3;
  double check_horizon = 10.0;
  double check_dt = 0.01;
};

/// Reconstruction of k from r observed on [0, T_obs] under the ramp control.
/// R^T replaces R in the exact recovery formulas; the truncation error
///   eps(z) = C e^{-s T} ((1 + T)/s + 1/s^2),  s = Re z,  C = max(a, |r|/(1+t) near T)
/// gates which points are trusted; the error attached to each sample adds
/// the sampling error of the piecewise-linear projection. k is recovered on a Bromwich line
/// Re z = sigma >= sigma_gate, and each sample carries the bound
///   e^{sigma t} (data error + cutoff tail) / (2 pi).
/// `contour` must be a Bromwich line: its abscissa is a lower bound for sigma,
/// its cutoff is used as given and its node count is raised until the
/// aliasing period exceeds 3 T_obs. InsufficientHorizon if no grid point
/// passes the gate.
ReconstructionResult recover_from_finite_data(const ResponseRecord& record, double T_obs, const FrequencyGrid& z_grid,
                                              const ContourSpec& contour, const FiniteDataOptions& opts = {});

}  // namespace gpmem
