#pragma once

// Adaptive Gauss-Kronrod (7/15) integration of complex-valued integrands on
// a finite interval split at caller-supplied breakpoints. The panel with the
// largest error estimate is bisected until the summed estimate meets the
// tolerance or the panel budget runs out.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <span>
#include <vector>

namespace gpmem::detail {

struct QuadratureResult {
  std::complex<double> value;
  double error = 0.0;
  int panels = 0;
  bool converged = false;
};

namespace gk15 {
inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the nodes xgk[1], xgk[3], xgk[5], xgk[7].
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
}  // namespace gk15

struct Panel {
  double a, b;
  std::complex<double> value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15_panel(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const std::complex<double> fc = f(c);
  std::complex<double> kron = fc * gk15::wgk[7];
  std::complex<double> gauss = fc * gk15::wg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * gk15::xgk[j];
    const std::complex<double> s = f(c - dx) + f(c + dx);
    kron += gk15::wgk[j] * s;
    if (j % 2 == 1) gauss += gk15::wg[j / 2] * s;
  }
  return Panel{a, b, kron * h, std::abs((kron - gauss) * h)};
}

/// Integrates f over [breakpoints.front(), breakpoints.back()]; breakpoints
/// must be sorted.
template <class F>
QuadratureResult integrate_adaptive(F&& f, std::span<const double> breakpoints, double abs_tol,
                                    int max_panels) {
  std::priority_queue<Panel> heap;
  std::complex<double> total{0.0, 0.0};
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i + 1] > breakpoints[i])) continue;
    Panel p = gk15_panel(f, breakpoints[i], breakpoints[i + 1]);
    total += p.value;
    err += p.error;
    heap.push(p);
  }
  int panels = static_cast<int>(heap.size());
  while (err > abs_tol && panels < max_panels && !heap.empty()) {
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = gk15_panel(f, worst.a, mid);
    Panel right = gk15_panel(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  // Re-sum to shed the drift of the running updates.
  std::complex<double> resum{0.0, 0.0};
  double reerr = 0.0;
  while (!heap.empty()) {
    resum += heap.top().value;
    reerr += heap.top().error;
    heap.pop();
  }
  return QuadratureResult{resum, reerr, panels, reerr <= abs_tol};
}

}  // namespace gpmem::detail
