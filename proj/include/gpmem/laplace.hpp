#pragma once

#include <span>
#include <variant>
#include <vector>

#include "gpmem/signal.hpp"

namespace gpmem {

/// Cotangent (Talbot-type) contour
///   z(theta) = shift + (N/t) * (-0.6122 + 0.5017 theta cot(0.6407 theta) + 0.2645 i theta)
/// with the midpoint rule in theta. The transform must be analytic to the
/// right of the contour and decay to its left; `shift` moves the contour past
/// singularities with positive real part.
struct Talbot {
  int nodes = 48;
  double shift = 0.0;
  /// Doubling stops once successive values agree to this relative tolerance.
  double tolerance = 1e-9;
  int max_nodes = 192;
  /// When false the sum is taken once with `nodes` points. For transforms
  /// whose poles dictate N, where doubling only adds roundoff (which grows
  /// like e^{0.17 N}); the caller validates the value by other means.
  bool adaptive = true;
};

/// Trapezoidal sum along the vertical line Re z = abscissa with `nodes`
/// points per half line, spacing cutoff/nodes. Evaluated by direct
/// summation. The abscissa must lie to the right of every singularity.
struct BromwichFFT {
  double abscissa = 1.0;
  double cutoff = 200.0;
  int nodes = 8192;
};

using ContourSpec = std::variant<Talbot, BromwichFFT>;

/// Line for signals that grow at most polynomially, read on (0, horizon]:
/// abscissa 1/horizon (capped at 1) keeps e^{sigma t} = O(1), and the node
/// count puts the aliasing period at 30/sigma.
BromwichFFT line_for_horizon(double horizon, double cutoff = 200.0);

/// Throws InvalidArgument unless N >= 8 is even (Talbot) or all Bromwich
/// parameters are positive.
void validate_contour(const ContourSpec& contour);

struct LaplaceValue {
  Complex value;
  /// Bound on the discarded tail over (T, inf).
  double truncation_bound = 0.0;
};

/// Laplace transform of the piecewise-linear interpolant of `signal` over
/// [0, T]. Equals the composite trapezoid rule as z*dt -> 0 and stays exact for
/// piecewise-linear data at any |z|. The tail bound assumes
/// |signal(t)| <= C (1 + t) beyond T with C read off the last samples.
/// Requires Re z > 0.
LaplaceValue forward_laplace(const TimeSignal& signal, Complex z);

/// Bromwich integral of `transform` at time t > 0. With delay d > 0 the
/// transform is read as e^{-z d} * transform(z): the result is 0 for t <= d and
/// the inversion runs at t - d, which keeps delayed transforms usable on the
/// Talbot contour. The imaginary residue of the contour sum must be below
/// 1e-8 (1 + |value|), otherwise SymmetryViolation is raised.
double inverse_laplace(const Evaluator& transform, double t, const ContourSpec& contour, double delay = 0.0);

/// Same as above for many times. Bromwich nodes are evaluated once and shared.
std::vector<double> inverse_laplace(const Evaluator& transform, std::span<const double> times,
                                    const ContourSpec& contour, double delay = 0.0);

/// Transform of chi_[0,T] r at z. T may fall between samples; the partial
/// interval is integrated with the interpolated end value.
Complex project_RT_timedomain(const TimeSignal& r, double T, Complex z);

/// Parameters for the line integral behind project_RT_contour.
struct ContourQuadrature {
  /// Abscissa of the integration line, just right of the imaginary axis.
  double epsilon = 1e-3;
  /// Frequency cutoff Y: the line is integrated over |y| <= Y and the
  /// remaining tail is corrected with its leading 1/y^2 term.
  double cutoff = 4000.0;
  double abs_tol = 1e-10;
  int max_panels = 400000;
};

struct ProjectionValue {
  Complex value;
  double cutoff_error = 0.0;
};

/// R^T(z) = (1/2 pi) Int (e^{T(p - z)} - 1) / (p - z) R(p) dy with
/// p = epsilon + i y. `response` is the full response transform R, called on
/// the integration line. Throws SlowDecay if R decays slower than 1/|y|.
ProjectionValue project_RT_contour(const Evaluator& response, double T, Complex z,
                                   const ContourQuadrature& quad = {});

}  // namespace gpmem
