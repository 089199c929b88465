#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gpmem/signal.hpp"

namespace gpmem {

namespace kernels {

/// k(t) = alpha_sq.
struct Constant {
  double alpha_sq = 1.0;
};
/// k(t) = amplitude * e^{-decay t}.
struct Exponential {
  double decay = 1.0;
  double amplitude = 1.0;
};
/// k(t) = t^2 / 2, so K(z) = 1/z^3 and k(0) = 0.
struct PolynomialHalfSquare {};
/// k(t) = weight * delta(t); K(z) = weight. The memoryless (heat) limit.
struct DiracDelta {
  double weight = 1.0;
};
/// k(t) = coeff * ((t - shift)^+)^power. With shift > 0 and power >= 2 this
/// is a C^1 perturbation supported in (shift, inf).
struct ShiftedPower {
  double shift = 0.0;
  int power = 2;
  double coeff = 1.0;
};
/// Tabulated kernel on its own uniform grid. The transform covers the
/// sampled range only and reports a bound on the discarded tail.
struct Sampled {
  TimeSignal samples;
};

using Term = std::variant<Constant, Exponential, PolynomialHalfSquare, DiracDelta, ShiftedPower, Sampled>;

}  // namespace kernels

/// Transform value of a sampled kernel with the bound on the discarded tail.
struct KernelTransform {
  Complex value;
  double truncation_bound = 0.0;
};

/// A memory kernel k(t) as a sum of catalogued terms. Immutable after
/// construction.
class MemoryKernel {
 public:
  explicit MemoryKernel(kernels::Term term);
  explicit MemoryKernel(std::vector<kernels::Term> terms);

  static MemoryKernel constant(double alpha_sq);
  static MemoryKernel exponential(double decay, double amplitude = 1.0);
  static MemoryKernel polynomial_half_square();
  static MemoryKernel dirac_delta(double weight = 1.0);
  static MemoryKernel shifted_power(double shift, int power, double coeff);
  static MemoryKernel sampled(TimeSignal samples);
  static MemoryKernel sum(std::span<const MemoryKernel> parts);

  std::span<const kernels::Term> terms() const noexcept { return terms_; }

  /// K(z) with its truncation bound. Requires Re z > 0 (NonpositiveRealPart).
  KernelTransform laplace(Complex z) const;

  /// Analytic continuation of K for closed-form kernels, used on contours that
  /// leave the right half-plane. Sampled terms still need Re z > 0.
  Complex laplace_continued(Complex z) const;

  /// True when every term has a closed-form transform.
  bool is_analytic() const noexcept;

  /// False when a Dirac term is present.
  bool has_time_evaluator() const noexcept;

  /// k(t); throws InvalidArgument for kernels with a Dirac term.
  double value(double t) const;

  /// Int_0^t k(s) ds with Dirac mass counted for t > 0.
  double integrated(double t) const;

  /// Total Dirac mass at the origin.
  double atom_at_zero() const noexcept;

  /// k(0) = a^2 when it is finite, i.e. when no Dirac term is present.
  std::optional<double> wave_speed_sq() const noexcept;

  /// Human-readable form, e.g. "constant(alpha_sq=1)+exponential(decay=1,amplitude=1)".
  std::string describe() const;

 private:
  std::vector<kernels::Term> terms_;
};

/// K(z) for Re z > 0.
Complex laplace_of_kernel(const MemoryKernel& kernel, Complex z);

struct K0Report {
  double a_sq = 0.0;
  double a = 0.0;
  /// max over probes of |z^2 (K(z) - a^2/z)| / max(a^2, 1).
  double max_residual = 0.0;
  /// Log-log slope of the residual over the upper half of the probes; near 0
  /// for a bounded O(1/z^2) remainder.
  double remainder_slope = 0.0;
  bool admissible = false;
};

/// Probe points 2^j (j = 0..20) on the real axis and on the rays arg z = +/- pi/4.
std::vector<Complex> default_k0_probes();

/// Laplace-side check of K(z) = a^2/z + O(1/z^2), a > 0, on the probe points.
/// a^2 is k(0) when a time-domain evaluator exists and the limit of z K(z)
/// otherwise. This is a necessary-condition check on a finite probe set.
K0Report validate_K0(const MemoryKernel& kernel, std::span<const Complex> probes, double tol = 1e-10);

/// True iff |K(z)| > tol / (1 + |z|) at every grid point. A sampling check,
/// not a proof that K has no zeros in the right half-plane.
bool validate_no_zeros(const MemoryKernel& kernel, const FrequencyGrid& grid, double tol = 1e-12);

}  // namespace gpmem
