#include "gpmem/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gpmem/detail/quadrature.hpp"
#include "gpmem/error.hpp"

namespace gpmem {

namespace {

constexpr double kPi = std::numbers::pi;

// Weights of the linear-interpolant transform on one interval, u = z*dt:
//   alpha(u) = Int_0^1 e^{-us} (1-s) ds,  beta(u) = Int_0^1 e^{-us} s ds.
void filon_weights(Complex u, Complex& alpha, Complex& beta) {
  if (std::abs(u) < 0.5) {
    // alpha = sum (-u)^k/(k+2)!, beta = sum (-u)^k (k+1)/(k+2)!
    Complex term = 0.5;  // (-u)^k/(k+2)! at k = 0
    alpha = 0.0;
    beta = 0.0;
    for (int k = 0; k < 24; ++k) {
      alpha += term;
      beta += term * static_cast<double>(k + 1);
      term *= -u / static_cast<double>(k + 3);
    }
    return;
  }
  const Complex e = std::exp(-u);
  const Complex u2 = u * u;
  alpha = (u - 1.0 + e) / u2;
  beta = (1.0 - e * (1.0 + u)) / u2;
}

// Sum_{n=lo}^{hi-1} e^{-z t_n} (alpha r_n + beta r_{n+1}) * dt, t_n = n dt.
Complex filon_sum(std::span<const double> r, double dt, std::size_t lo, std::size_t hi, Complex z) {
  Complex alpha, beta;
  filon_weights(z * dt, alpha, beta);
  const Complex q = std::exp(-z * dt);
  Complex s0{0.0, 0.0};
  Complex s1{0.0, 0.0};
  Complex e{0.0, 0.0};
  for (std::size_t n = lo; n < hi; ++n) {
    if ((n - lo) % 256 == 0) {
      e = std::exp(-z * (dt * static_cast<double>(n)));
    } else {
      e *= q;
    }
    s0 += e * r[n];
    s1 += e * r[n + 1];
  }
  return dt * (alpha * s0 + beta * s1);
}

void require_right_half_plane(Complex z, const char* where) {
  if (!(z.real() > 0.0)) {
    throw Error(ErrorCode::NonpositiveRealPart,
                std::string(where) + " needs Re z > 0, got Re z = " + std::to_string(z.real()));
  }
}

struct TalbotSum {
  double value;
  double imag_residue;
  double outer_ratio;
  // Rounding level of the sum: eps times the summed term magnitudes.
  double roundoff;
};

TalbotSum talbot_sum(const Evaluator& F, double t, int n, double shift) {
  constexpr double c0 = -0.6122, c1 = 0.5017, c2 = 0.6407, c3 = 0.2645;
  const double mu = static_cast<double>(n) / t;
  Complex total{0.0, 0.0};
  double max_term = 0.0;
  double outer = 0.0;
  double abs_sum = 0.0;
  for (int k = 0; k < n / 2; ++k) {
    const double th = (2.0 * k + 1.0) * kPi / static_cast<double>(n);
    const double a = c2 * th;
    const double cot = std::cos(a) / std::sin(a);
    const Complex z{shift + mu * (c0 + c1 * th * cot), mu * c3 * th};
    const Complex dz{mu * c1 * (cot - a / (std::sin(a) * std::sin(a))), mu * c3};
    const Complex zc = std::conj(z);
    const Complex dzc = -std::conj(dz);
    const Complex wp = std::exp(z * t) * F(z) * dz;
    const Complex wm = std::exp(zc * t) * F(zc) * dzc;
    total += wp + wm;
    const double mag = std::max(std::abs(wp), std::abs(wm));
    max_term = std::max(max_term, mag);
    abs_sum += std::abs(wp) + std::abs(wm);
    if (k == n / 2 - 1) outer = mag;
  }
  const Complex f = total / Complex(0.0, static_cast<double>(n));
  const double roundoff = std::numeric_limits<double>::epsilon() * abs_sum / n;
  if (!std::isfinite(f.real()) || !std::isfinite(f.imag())) {
    return TalbotSum{f.real(), std::abs(f.imag()), std::numeric_limits<double>::infinity(), roundoff};
  }
  return TalbotSum{f.real(), std::abs(f.imag()), max_term > 0.0 ? outer / max_term : 0.0, roundoff};
}

void check_symmetry(double value, double imag_residue) {
  if (imag_residue > 1e-8 * (1.0 + std::abs(value))) {
    throw Error(ErrorCode::SymmetryViolation,
                "imaginary residue " + std::to_string(imag_residue) + " for value " + std::to_string(value) +
                    "; transform is not conjugate-symmetric on the contour");
  }
}

double talbot_invert(const Evaluator& F, double t, const Talbot& spec) {
  if (!spec.adaptive) {
    const TalbotSum once = talbot_sum(F, t, spec.nodes, spec.shift);
    if (!(once.outer_ratio < 1e-8) || !std::isfinite(once.value)) {
      throw Error(ErrorCode::NonconvergentSum, "Talbot terms do not decay along the contour at t = " + std::to_string(t));
    }
    check_symmetry(once.value, once.imag_residue);
    return once.value;
  }
  int n = std::max(8, (spec.nodes / 2) & ~1);
  TalbotSum prev = talbot_sum(F, t, n, spec.shift);
  for (;;) {
    const int next = 2 * n;
    if (next > std::max(spec.max_nodes, spec.nodes)) {
      throw Error(ErrorCode::NonconvergentSum,
                  "Talbot sums did not settle up to N = " + std::to_string(n) + " at t = " + std::to_string(t));
    }
    TalbotSum cur = talbot_sum(F, t, next, spec.shift);
    if (!(cur.outer_ratio < 1e-8) || !std::isfinite(cur.value)) {
      throw Error(ErrorCode::NonconvergentSum,
                  "Talbot terms do not decay along the contour at t = " + std::to_string(t) +
                      " (transform grows to the left of the contour)");
    }
    if (next >= spec.nodes &&
        std::abs(cur.value - prev.value) <= spec.tolerance * (1.0 + std::abs(cur.value))) {
      check_symmetry(cur.value, cur.imag_residue);
      return cur.value;
    }
    // Past the rounding floor a larger N only gets worse: the smaller sum
    // is the best available and its truncation error is below the gap.
    if (next > spec.nodes && prev.roundoff < spec.tolerance * (1.0 + std::abs(prev.value)) &&
        std::abs(cur.value - prev.value) <= 100.0 * cur.roundoff) {
      check_symmetry(prev.value, prev.imag_residue);
      return prev.value;
    }
    prev = cur;
    n = next;
  }
}

struct BromwichNodes {
  double sigma;
  double dy;
  std::vector<Complex> upper;  // F(sigma + i m dy), m = 0..M-1
  std::vector<Complex> lower;  // F(sigma - i m dy)
};

BromwichNodes bromwich_nodes(const Evaluator& F, const BromwichFFT& spec) {
  BromwichNodes nodes{spec.abscissa, spec.cutoff / spec.nodes, {}, {}};
  nodes.upper.resize(static_cast<std::size_t>(spec.nodes));
  nodes.lower.resize(static_cast<std::size_t>(spec.nodes));
  for (int m = 0; m < spec.nodes; ++m) {
    const double y = nodes.dy * m;
    nodes.upper[m] = F(Complex(spec.abscissa, y));
    nodes.lower[m] = m == 0 ? nodes.upper[0] : F(Complex(spec.abscissa, -y));
  }
  return nodes;
}

double bromwich_eval(const BromwichNodes& nodes, double t) {
  const Complex rot = std::exp(Complex(0.0, nodes.dy * t));
  Complex e{1.0, 0.0};
  Complex sum = nodes.upper[0];
  for (std::size_t m = 1; m < nodes.upper.size(); ++m) {
    if (m % 256 == 0) {
      e = std::exp(Complex(0.0, nodes.dy * t * static_cast<double>(m)));
    } else {
      e *= rot;
    }
    sum += nodes.upper[m] * e + nodes.lower[m] * std::conj(e);
  }
  const Complex f = sum * (std::exp(nodes.sigma * t) * nodes.dy / (2.0 * kPi));
  if (!std::isfinite(f.real())) {
    throw Error(ErrorCode::NonconvergentSum, "Bromwich sum is not finite at t = " + std::to_string(t));
  }
  check_symmetry(f.real(), std::abs(f.imag()));
  return f.real();
}

}  // namespace

BromwichFFT line_for_horizon(double horizon, double cutoff) {
  if (!(horizon > 0.0) || !(cutoff > 0.0)) throw Error(ErrorCode::InvalidArgument, "line needs horizon, cutoff > 0");
  const double sigma = std::min(1.0, 1.0 / horizon);
  const double period = 30.0 / sigma;
  return BromwichFFT{sigma, cutoff, static_cast<int>(std::ceil(period * cutoff / (2.0 * kPi)))};
}

void validate_contour(const ContourSpec& contour) {
  if (const auto* tb = std::get_if<Talbot>(&contour)) {
    if (tb->nodes < 8 || tb->nodes % 2 != 0) {
      throw Error(ErrorCode::InvalidArgument, "Talbot contour needs an even node count >= 8");
    }
    if (!(tb->tolerance > 0.0)) throw Error(ErrorCode::InvalidArgument, "Talbot tolerance must be positive");
    if (!std::isfinite(tb->shift)) throw Error(ErrorCode::InvalidArgument, "Talbot shift must be finite");
  } else {
    const auto& bw = std::get<BromwichFFT>(contour);
    if (!(bw.abscissa > 0.0) || !(bw.cutoff > 0.0) || bw.nodes < 2) {
      throw Error(ErrorCode::InvalidArgument, "Bromwich line needs abscissa > 0, cutoff > 0 and nodes >= 2");
    }
  }
}

LaplaceValue forward_laplace(const TimeSignal& signal, Complex z) {
  require_right_half_plane(z, "forward_laplace");
  const auto r = signal.values();
  const double dt = signal.dt();
  const Complex value = filon_sum(r, dt, 0, r.size() - 1, z);

  const double T = signal.horizon();
  const std::size_t tail = std::min<std::size_t>(10, r.size());
  double c = 0.0;
  for (std::size_t i = r.size() - tail; i < r.size(); ++i) {
    c = std::max(c, std::abs(r[i]) / (1.0 + signal.time(i)));
  }
  const double s = z.real();
  const double bound = c * std::exp(-s * T) * ((1.0 + T) / s + 1.0 / (s * s));
  return LaplaceValue{value, bound};
}

Complex project_RT_timedomain(const TimeSignal& r, double T, Complex z) {
  require_right_half_plane(z, "project_RT_timedomain");
  const double H = r.horizon();
  if (T > H * (1.0 + 1e-12)) {
    throw Error(ErrorCode::TruncationBeyondHorizon,
                "T = " + std::to_string(T) + " exceeds the signal horizon " + std::to_string(H));
  }
  if (!(T > 0.0)) return Complex{0.0, 0.0};
  const double dt = r.dt();
  const auto full = static_cast<std::size_t>(std::floor(T / dt * (1.0 + 1e-14)));
  const std::size_t n_full = std::min(full, r.size() - 1);
  Complex value = filon_sum(r.values(), dt, 0, n_full, z);
  const double t0 = dt * static_cast<double>(n_full);
  const double rem = T - t0;
  if (rem > 1e-14 * dt && n_full + 1 < r.size()) {
    // Linear piece on [t0, T] with interpolated end value.
    const double r0 = r[n_full];
    const double r1 = r.at(T);
    Complex alpha, beta;
    filon_weights(z * rem, alpha, beta);
    value += std::exp(-z * t0) * rem * (alpha * r0 + beta * r1);
  }
  return value;
}

double inverse_laplace(const Evaluator& transform, double t, const ContourSpec& contour, double delay) {
  const std::vector<double> ts{t};
  return inverse_laplace(transform, ts, contour, delay).front();
}

std::vector<double> inverse_laplace(const Evaluator& transform, std::span<const double> times,
                                    const ContourSpec& contour, double delay) {
  validate_contour(contour);
  for (double t : times) {
    if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "inverse_laplace needs t > 0");
  }
  std::vector<double> out(times.size(), 0.0);
  if (const auto* tb = std::get_if<Talbot>(&contour)) {
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double tau = times[i] - delay;
      if (tau <= 0.0) continue;
      out[i] = talbot_invert(transform, tau, *tb);
    }
    return out;
  }
  const auto& bw = std::get<BromwichFFT>(contour);
  const BromwichNodes nodes = bromwich_nodes(transform, bw);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double tau = times[i] - delay;
    if (tau <= 0.0) continue;
    out[i] = bromwich_eval(nodes, tau);
  }
  return out;
}

ProjectionValue project_RT_contour(const Evaluator& response, double T, Complex z, const ContourQuadrature& quad) {
  require_right_half_plane(z, "project_RT_contour");
  if (!(T > 0.0)) throw Error(ErrorCode::InvalidArgument, "project_RT_contour needs T > 0");
  if (!(quad.epsilon > 0.0) || !(quad.cutoff > 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "contour quadrature needs epsilon > 0 and cutoff > 1");
  }
  const double eps = quad.epsilon;
  const double Y = quad.cutoff;

  const Complex p_hi{eps, Y};
  const Complex p_lo{eps, -Y};
  const Complex c_hi = p_hi * response(p_hi);
  const Complex c_lo = p_lo * response(p_lo);
  const double at_Y = std::abs(c_hi) + std::abs(c_lo);
  if (at_Y > 0.0) {
    const Complex p2{eps, 2.0 * Y};
    const double at_2Y = std::abs(p2 * response(p2)) + std::abs(std::conj(p2) * response(std::conj(p2)));
    const double slope = std::log2(at_2Y / at_Y);
    if (!(slope <= 0.25)) {
      throw Error(ErrorCode::SlowDecay, "response decays slower than 1/|y| on the integration line (log-slope " +
                                            std::to_string(slope) + ")");
    }
  }

  auto integrand = [&](double y) -> Complex {
    const Complex p{eps, y};
    const Complex d = p - z;
    return response(p) * (std::exp(T * d) - 1.0) / d;
  };

  // Breakpoints: geometric refinement around the line's closest approach to
  // the origin, the bump near Im z, and panels no wider than one period of
  // e^{iyT} further out.
  std::vector<double> bp{0.0};
  for (double s = eps / 4.0; s < 1.0; s *= 2.0) {
    bp.push_back(s);
    bp.push_back(-s);
  }
  for (double f : {0.5, 1.0, 2.0}) {
    bp.push_back(z.imag() + f * z.real());
    bp.push_back(z.imag() - f * z.real());
  }
  const double period = 2.0 * kPi / T;
  for (double y = 1.0; y < Y; y += std::min(period, std::max(0.25, 0.5 * y))) {
    bp.push_back(y);
    bp.push_back(-y);
  }
  bp.push_back(Y);
  bp.push_back(-Y);
  std::erase_if(bp, [&](double v) { return std::abs(v) > Y; });
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

  const auto res = detail::integrate_adaptive(integrand, bp, quad.abs_tol, quad.max_panels);
  Complex value = res.value / (2.0 * kPi);
  // Leading tail of -R(p)/(p - z) ~ c/y^2 beyond |y| = Y.
  value += (c_hi + c_lo) / (2.0 * kPi * Y);

  const double oscillatory = std::exp((eps - z.real()) * T) * at_Y / (kPi * Y * Y * T);
  const double second_order = at_Y * (std::abs(z) + eps) / (2.0 * kPi * Y * Y);
  return ProjectionValue{value, oscillatory + second_order + res.error / (2.0 * kPi)};
}

}  // namespace gpmem
