#include "gpmem/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "gpmem/error.hpp"
#include "gpmem/laplace.hpp"

namespace gpmem {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double factorial(int p) {
  double f = 1.0;
  for (int i = 2; i <= p; ++i) f *= i;
  return f;
}

void check_term(const kernels::Term& term) {
  std::visit(overloaded{
                 [](const kernels::Constant& c) {
                   if (!std::isfinite(c.alpha_sq)) throw Error(ErrorCode::InvalidArgument, "constant kernel needs finite alpha_sq");
                 },
                 [](const kernels::Exponential& e) {
                   if (!std::isfinite(e.decay) || !std::isfinite(e.amplitude) || e.decay < 0.0) {
                     throw Error(ErrorCode::InvalidArgument, "exponential kernel needs finite decay >= 0");
                   }
                 },
                 [](const kernels::PolynomialHalfSquare&) {},
                 [](const kernels::DiracDelta& d) {
                   if (!std::isfinite(d.weight)) throw Error(ErrorCode::InvalidArgument, "delta kernel needs finite weight");
                 },
                 [](const kernels::ShiftedPower& s) {
                   if (!(s.shift >= 0.0) || !std::isfinite(s.shift) || s.power < 0 || s.power > 20 ||
                       !std::isfinite(s.coeff)) {
                     throw Error(ErrorCode::InvalidArgument, "shifted power needs shift >= 0 and 0 <= power <= 20");
                   }
                 },
                 [](const kernels::Sampled&) {},
             },
             term);
}

// Transform of one sampled term over its own range plus the tail bound
// M e^{-sT}/s, M the largest magnitude seen at either end.
KernelTransform sampled_transform(const TimeSignal& k, Complex z) {
  const double s = z.real();
  const double T = k.horizon();
  const auto v = k.values();
  // The damped integrand |k(t)| e^{-st} must not be growing at the end of the
  // sampled range, otherwise the discarded tail is not controlled.
  const std::size_t n = v.size() - 1;
  const std::size_t m = n - std::max<std::size_t>(1, n / 10);
  double peak = 0.0;
  for (std::size_t i = 0; i <= n; ++i) peak = std::max(peak, std::abs(v[i]) * std::exp(-s * k.time(i)));
  const double g_end = std::abs(v[n]) * std::exp(-s * T);
  const double g_mid = std::abs(v[m]) * std::exp(-s * k.time(m));
  if (g_end > g_mid * (1.0 + 1e-12) && g_end > 1e-14 * peak) {
    throw Error(ErrorCode::QuadratureDivergence,
                "sampled kernel grows faster than Re z = " + num(s) + " can damp on its range");
  }
  const LaplaceValue lv = forward_laplace(k, z);
  const double M = std::max(std::abs(v[0]), std::abs(v[n]));
  return KernelTransform{lv.value, M * std::exp(-s * T) / s};
}

Complex closed_form(const kernels::Term& term, Complex z) {
  return std::visit(overloaded{
                        [&](const kernels::Constant& c) -> Complex { return c.alpha_sq / z; },
                        [&](const kernels::Exponential& e) -> Complex { return e.amplitude / (z + e.decay); },
                        [&](const kernels::PolynomialHalfSquare&) -> Complex { return 1.0 / (z * z * z); },
                        [&](const kernels::DiracDelta& d) -> Complex { return Complex(d.weight, 0.0); },
                        [&](const kernels::ShiftedPower& sp) -> Complex {
                          return sp.coeff * factorial(sp.power) * std::exp(-z * sp.shift) /
                                 std::pow(z, sp.power + 1);
                        },
                        [&](const kernels::Sampled& s) -> Complex { return sampled_transform(s.samples, z).value; },
                    },
                    term);
}

// Int_0^t of the piecewise-linear interpolant, held at the last value beyond.
double sampled_integral(const TimeSignal& k, double t) {
  const double dt = k.dt();
  const auto v = k.values();
  double acc = 0.0;
  std::size_t i = 0;
  while (i + 1 < v.size() && dt * static_cast<double>(i + 1) <= t) {
    acc += 0.5 * dt * (v[i] + v[i + 1]);
    ++i;
  }
  const double t0 = dt * static_cast<double>(i);
  const double rem = t - t0;
  if (rem > 0.0) acc += 0.5 * rem * (v[i] + k.at(t));
  return acc;
}

}  // namespace

MemoryKernel::MemoryKernel(kernels::Term term) : MemoryKernel(std::vector<kernels::Term>{std::move(term)}) {}

MemoryKernel::MemoryKernel(std::vector<kernels::Term> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw Error(ErrorCode::InvalidArgument, "a kernel needs at least one term");
  for (const auto& t : terms_) check_term(t);
}

MemoryKernel MemoryKernel::constant(double alpha_sq) { return MemoryKernel(kernels::Constant{alpha_sq}); }
MemoryKernel MemoryKernel::exponential(double decay, double amplitude) {
  return MemoryKernel(kernels::Exponential{decay, amplitude});
}
MemoryKernel MemoryKernel::polynomial_half_square() { return MemoryKernel(kernels::PolynomialHalfSquare{}); }
MemoryKernel MemoryKernel::dirac_delta(double weight) { return MemoryKernel(kernels::DiracDelta{weight}); }
MemoryKernel MemoryKernel::shifted_power(double shift, int power, double coeff) {
  return MemoryKernel(kernels::ShiftedPower{shift, power, coeff});
}
MemoryKernel MemoryKernel::sampled(TimeSignal samples) { return MemoryKernel(kernels::Sampled{std::move(samples)}); }

MemoryKernel MemoryKernel::sum(std::span<const MemoryKernel> parts) {
  std::vector<kernels::Term> all;
  for (const auto& p : parts) all.insert(all.end(), p.terms_.begin(), p.terms_.end());
  return MemoryKernel(std::move(all));
}

KernelTransform MemoryKernel::laplace(Complex z) const {
  if (!(z.real() > 0.0)) {
    throw Error(ErrorCode::NonpositiveRealPart, "kernel transform needs Re z > 0, got Re z = " + num(z.real()));
  }
  KernelTransform out{Complex{0.0, 0.0}, 0.0};
  for (const auto& t : terms_) {
    if (const auto* s = std::get_if<kernels::Sampled>(&t)) {
      const KernelTransform kt = sampled_transform(s->samples, z);
      out.value += kt.value;
      out.truncation_bound += kt.truncation_bound;
    } else {
      out.value += closed_form(t, z);
    }
  }
  return out;
}

Complex MemoryKernel::laplace_continued(Complex z) const {
  if (!is_analytic() && !(z.real() > 0.0)) {
    throw Error(ErrorCode::NonpositiveRealPart, "sampled kernels have no continuation to Re z <= 0");
  }
  Complex v{0.0, 0.0};
  for (const auto& t : terms_) v += closed_form(t, z);
  return v;
}

bool MemoryKernel::is_analytic() const noexcept {
  return std::none_of(terms_.begin(), terms_.end(),
                      [](const kernels::Term& t) { return std::holds_alternative<kernels::Sampled>(t); });
}

bool MemoryKernel::has_time_evaluator() const noexcept {
  return std::none_of(terms_.begin(), terms_.end(),
                      [](const kernels::Term& t) { return std::holds_alternative<kernels::DiracDelta>(t); });
}

double MemoryKernel::value(double t) const {
  if (!has_time_evaluator()) {
    throw Error(ErrorCode::InvalidArgument, "a delta kernel has no pointwise time-domain value");
  }
  t = std::max(t, 0.0);
  double v = 0.0;
  for (const auto& term : terms_) {
    v += std::visit(overloaded{
                        [&](const kernels::Constant& c) { return c.alpha_sq; },
                        [&](const kernels::Exponential& e) { return e.amplitude * std::exp(-e.decay * t); },
                        [&](const kernels::PolynomialHalfSquare&) { return 0.5 * t * t; },
                        [&](const kernels::DiracDelta&) { return 0.0; },
                        [&](const kernels::ShiftedPower& sp) {
                          const double u = t - sp.shift;
                          if (u <= 0.0) return sp.power == 0 && u == 0.0 ? sp.coeff : 0.0;
                          return sp.coeff * std::pow(u, sp.power);
                        },
                        [&](const kernels::Sampled& s) { return s.samples.at(t); },
                    },
                    term);
  }
  return v;
}

double MemoryKernel::integrated(double t) const {
  if (!(t > 0.0)) return 0.0;
  double v = 0.0;
  for (const auto& term : terms_) {
    v += std::visit(overloaded{
                        [&](const kernels::Constant& c) { return c.alpha_sq * t; },
                        [&](const kernels::Exponential& e) {
                          if (e.decay == 0.0) return e.amplitude * t;
                          return e.amplitude * -std::expm1(-e.decay * t) / e.decay;
                        },
                        [&](const kernels::PolynomialHalfSquare&) { return t * t * t / 6.0; },
                        [&](const kernels::DiracDelta& d) { return d.weight; },
                        [&](const kernels::ShiftedPower& sp) {
                          const double u = t - sp.shift;
                          if (u <= 0.0) return 0.0;
                          return sp.coeff * std::pow(u, sp.power + 1) / (sp.power + 1);
                        },
                        [&](const kernels::Sampled& s) { return sampled_integral(s.samples, t); },
                    },
                    term);
  }
  return v;
}

double MemoryKernel::atom_at_zero() const noexcept {
  double w = 0.0;
  for (const auto& t : terms_) {
    if (const auto* d = std::get_if<kernels::DiracDelta>(&t)) w += d->weight;
  }
  return w;
}

std::optional<double> MemoryKernel::wave_speed_sq() const noexcept {
  if (!has_time_evaluator()) return std::nullopt;
  return value(0.0);
}

std::string MemoryKernel::describe() const {
  std::string out;
  for (const auto& term : terms_) {
    if (!out.empty()) out += "+";
    out += std::visit(
        overloaded{
            [](const kernels::Constant& c) { return "constant(alpha_sq=" + num(c.alpha_sq) + ")"; },
            [](const kernels::Exponential& e) {
              return "exponential(decay=" + num(e.decay) + ",amplitude=" + num(e.amplitude) + ")";
            },
            [](const kernels::PolynomialHalfSquare&) { return std::string("polynomial_half_square"); },
            [](const kernels::DiracDelta& d) { return "dirac_delta(weight=" + num(d.weight) + ")"; },
            [](const kernels::ShiftedPower& sp) {
              return "shifted_power(shift=" + num(sp.shift) + ",power=" + std::to_string(sp.power) +
                     ",coeff=" + num(sp.coeff) + ")";
            },
            [](const kernels::Sampled& s) {
              return "sampled(dt=" + num(s.samples.dt()) + ",n=" + std::to_string(s.samples.size()) + ")";
            },
        },
        term);
  }
  return out;
}

Complex laplace_of_kernel(const MemoryKernel& kernel, Complex z) { return kernel.laplace(z).value; }

std::vector<Complex> default_k0_probes() {
  std::vector<Complex> probes;
  const Complex ray = std::polar(1.0, std::numbers::pi / 4.0);
  for (int j = 0; j <= 20; ++j) {
    const double r = std::ldexp(1.0, j);
    probes.emplace_back(r, 0.0);
    probes.push_back(r * ray);
    probes.push_back(r * std::conj(ray));
  }
  return probes;
}

K0Report validate_K0(const MemoryKernel& kernel, std::span<const Complex> probes, double tol) {
  struct Sample {
    Complex z;
    Complex K;
  };
  std::vector<Sample> pts;
  for (const Complex& z : probes) {
    if (!(z.real() > 0.0)) continue;
    try {
      pts.push_back({z, kernel.laplace(z).value});
    } catch (const Error&) {
      // Probes the kernel cannot be evaluated at carry no information.
    }
  }
  K0Report rep;
  if (pts.size() < 4) return rep;
  std::sort(pts.begin(), pts.end(), [](const Sample& a, const Sample& b) { return std::abs(a.z) < std::abs(b.z); });

  if (kernel.has_time_evaluator()) {
    rep.a_sq = kernel.value(0.0);
  } else {
    // Least squares of z K(z) = a^2 + c/z over the largest quarter of the probes.
    const std::size_t lo = pts.size() - std::max<std::size_t>(2, pts.size() / 4);
    double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
    for (std::size_t i = lo; i < pts.size(); ++i) {
      const double x = (1.0 / pts[i].z).real();
      const double y = (pts[i].z * pts[i].K).real();
      s11 += 1.0;
      s12 += x;
      s22 += x * x;
      b1 += y;
      b2 += x * y;
    }
    const double det = s11 * s22 - s12 * s12;
    rep.a_sq = std::abs(det) > 0.0 ? (b1 * s22 - b2 * s12) / det : b1 / s11;
  }
  rep.a = std::sqrt(std::max(rep.a_sq, 0.0));

  const double norm = std::max(std::abs(rep.a_sq), 1.0);
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Complex z = pts[i].z;
    const double res = std::abs(z * z * (pts[i].K - rep.a_sq / z)) / norm;
    rep.max_residual = std::max(rep.max_residual, res);
    if (i >= pts.size() / 2) {
      lx.push_back(std::log(std::abs(z)));
      ly.push_back(std::log(std::max(res, tol)));
    }
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  rep.remainder_slope = sxx > 0.0 ? sxy / sxx : 0.0;
  rep.admissible = rep.a_sq > tol && std::isfinite(rep.max_residual) && rep.remainder_slope <= 0.5;
  return rep;
}

bool validate_no_zeros(const MemoryKernel& kernel, const FrequencyGrid& grid, double tol) {
  for (const Complex& z : grid.points()) {
    if (!(std::abs(kernel.laplace(z).value) > tol / (1.0 + std::abs(z)))) return false;
  }
  return true;
}

}  // namespace gpmem
