#include "gpmem/signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gpmem/error.hpp"

namespace gpmem {

TimeSignal::TimeSignal(double dt, std::vector<double> values) : dt_(dt), values_(std::move(values)) {
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) {
    throw Error(ErrorCode::InvalidArgument, "time step must be positive, got " + std::to_string(dt_));
  }
  if (values_.size() < 2) {
    throw Error(ErrorCode::EmptySignal, "a time signal needs at least two samples");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(ErrorCode::InvalidArgument, "non-finite sample at index " + std::to_string(i));
    }
  }
}

TimeSignal TimeSignal::sample(const std::function<double(double)>& f, double dt, double horizon) {
  if (!(dt > 0.0) || !(horizon > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "sample() needs dt > 0 and horizon > 0");
  }
  const auto n = static_cast<std::size_t>(std::llround(horizon / dt));
  std::vector<double> v(std::max<std::size_t>(n, 1) + 1);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(dt * static_cast<double>(i));
  return TimeSignal(dt, std::move(v));
}

double TimeSignal::at(double t) const noexcept {
  if (t <= 0.0) return values_.front();
  const double s = t / dt_;
  const auto i = static_cast<std::size_t>(s);
  if (i + 1 >= values_.size()) return values_.back();
  const double w = s - static_cast<double>(i);
  return (1.0 - w) * values_[i] + w * values_[i + 1];
}

FrequencyGrid::FrequencyGrid(std::vector<Complex> points, bool symmetric)
    : points_(std::move(points)), z_min_(std::numeric_limits<double>::infinity()), symmetric_(symmetric) {
  if (points_.empty()) throw Error(ErrorCode::InvalidArgument, "frequency grid is empty");
  for (const auto& z : points_) {
    if (!(z.real() > 0.0) || !std::isfinite(std::abs(z))) {
      throw Error(ErrorCode::InvalidArgument, "frequency grid point outside the open right half-plane");
    }
    z_min_ = std::min(z_min_, z.real());
  }
  if (symmetric_) {
    for (const auto& z : points_) {
      const bool found = std::any_of(points_.begin(), points_.end(), [&](const Complex& w) {
        return std::abs(w - std::conj(z)) <= 1e-14 * std::abs(z);
      });
      if (!found) throw Error(ErrorCode::InvalidArgument, "grid declared symmetric but a conjugate is missing");
    }
  }
}

FrequencyGrid FrequencyGrid::fan(double z_min, double z_max, std::size_t n_radii, std::span<const double> slopes) {
  if (!(z_min > 0.0) || !(z_max >= z_min) || n_radii == 0) {
    throw Error(ErrorCode::InvalidArgument, "fan() needs 0 < z_min <= z_max and n_radii >= 1");
  }
  std::vector<Complex> pts;
  for (std::size_t j = 0; j < n_radii; ++j) {
    const double x = n_radii == 1 ? z_min
                                  : z_min * std::pow(z_max / z_min, static_cast<double>(j) /
                                                                        static_cast<double>(n_radii - 1));
    for (double s : slopes) {
      if (s == 0.0) {
        pts.emplace_back(x, 0.0);
      } else {
        pts.emplace_back(x, std::abs(s) * x);
        pts.emplace_back(x, -std::abs(s) * x);
      }
    }
  }
  return FrequencyGrid(std::move(pts), true);
}

}  // namespace gpmem
