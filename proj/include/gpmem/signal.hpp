#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gpmem {

using Complex = std::complex<double>;

/// A Laplace-domain function z -> F(z). Evaluators handed to the contour
/// routines may be called for many nodes and must not keep mutable state.
using Evaluator = std::function<Complex(Complex)>;

/// Uniformly sampled real function on [0, T], sample i at t = i*dt.
/// The horizon is dt*(size-1); there is no implicit padding.
class TimeSignal {
 public:
  TimeSignal(double dt, std::vector<double> values);

  /// Samples f at 0, dt, ..., n*dt with n = round(horizon/dt).
  static TimeSignal sample(const std::function<double(double)>& f, double dt, double horizon);

  double dt() const noexcept { return dt_; }
  double horizon() const noexcept { return dt_ * static_cast<double>(values_.size() - 1); }
  std::size_t size() const noexcept { return values_.size(); }
  double time(std::size_t i) const noexcept { return dt_ * static_cast<double>(i); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  /// Linear interpolation; t outside [0, horizon] holds the end value.
  double at(double t) const noexcept;

 private:
  double dt_;
  std::vector<double> values_;
};

/// Sample points in the open right half-plane.
class FrequencyGrid {
 public:
  /// Throws InvalidArgument if a point has Re z <= 0, or if `symmetric` is
  /// requested and some conjugate is missing.
  explicit FrequencyGrid(std::vector<Complex> points, bool symmetric = false);

  /// Points x_j and x_j*(1 +/- i*s) for x_j geometric in [z_min, z_max] and s
  /// in `slopes`. Slope 0 contributes the real point only once.
  static FrequencyGrid fan(double z_min, double z_max, std::size_t n_radii,
                           std::span<const double> slopes);

  std::span<const Complex> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  double z_min() const noexcept { return z_min_; }
  bool symmetric() const noexcept { return symmetric_; }

 private:
  std::vector<Complex> points_;
  double z_min_;
  bool symmetric_;
};

}  // namespace gpmem
