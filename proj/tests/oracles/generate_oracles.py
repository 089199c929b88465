"""Reference values computed independently with mpmath at 30 digits.

Run from the repo root to refresh tests/oracles/oracle_values.hpp:
    python3 tests/oracles/generate_oracles.py
"""

from pathlib import Path

import mpmath as mp

mp.mp.dps = 30


def invert(f, t):
    # Two unrelated inversion schemes must agree before a value is frozen.
    a = mp.invertlaplace(f, t, method="talbot")
    b = mp.invertlaplace(f, t, method="cohen")
    assert abs(a - b) <= mp.mpf("1e-18") * (1 + abs(a)), (t, a, b)
    return a


def omega_exp(z):
    # Exponential(1): K = 1/(z+1), omega = sqrt(z(z+1)). Written as
    # z sqrt(1 + 1/z) so the cut stays on [-1, 0] for contours reaching Re z < 0.
    return z * mp.sqrt(1 + 1 / z)


entries = []


def real(name, value, note):
    entries.append((name, f"{mp.nstr(mp.re(value), 20)}", note))


def cplx(name, value, note):
    entries.append((name, f"{{{mp.nstr(mp.re(value), 20)}, {mp.nstr(mp.im(value), 20)}}}", note))


# Semi-axis response of the exponential kernel under the ramp: R = -omega/z^2.
for t in (0.5, 1.0, 2.0, 5.0):
    real(f"r_exp_t{str(t).replace('.', '_')}", invert(lambda z: -omega_exp(z) / z**2, t),
         f"r(t) for k = e^-t, ramp control, t = {t}")

# Field of the exponential kernel at x = 1: Theta = e^{-z} e^{-(omega - z)}/z^2.
# The delay is taken out by hand (theta(1, t) = g(t - 1)); the contour sum
# cannot resolve e^{-z} itself.
for t in (1.5, 2.0, 3.0, 4.0):
    g = invert(lambda z: mp.exp(-(omega_exp(z) - z)) / z**2, t - 1)
    real(f"theta_exp_x1_t{str(t).replace('.', '_')}", g, f"theta(1, t) for k = e^-t, t = {t}")

# Heat case: R = -z^{-3/2}, r = -2 sqrt(t/pi).
real("r_dirac_t0_5", invert(lambda z: -z**mp.mpf(-1.5), 0.5), "r(0.5) for k = delta")

# Interval response and omega at a complex point.
z = mp.mpc(1, 1)
w = omega_exp(z)
cplx("omega_exp_z1p1i", w, "omega at z = 1+i for k = e^-t")
cplx("R_interval_exp_L2_z1p1i", -w / z**2 * mp.coth(2 * w), "interval response, L = 2, z = 1+i")

# Modes of the t^2/2 kernel: Theta_n = z^3/(z^4 + n^2).
for n, t in ((4, 1.0), (4, 3.0), (9, 1.0), (16, 2.0)):
    real(f"theta_mode_n{n}_t{str(t).replace('.', '_')}", invert(lambda z: z**3 / (z**4 + n**2), t),
         f"mode n = {n}, xi = 1, t = {t}")
p = mp.sqrt(4) * mp.expjpi(mp.mpf(1) / 4)
real("mode_residue_constant", mp.re(p**3 / (4 * p**3)), "residue of z^3/(z^4+n^2) at a simple pole")

# Finite-interval Newton target: -R/F for the exponential kernel, L = 2, z = 0.5 - 2i.
z = mp.mpc(0.5, -2)
cplx("omega_exp_z0p5m2i", omega_exp(z), "omega at z = 0.5-2i for k = e^-t")

# Kernel reconstruction examples.
real("k_sum_t0_5", invert(lambda z: 2 / z + 1 / (z + 3) ** 2, 0.5), "k from K = 2/z + 1/(z+3)^2 at t = 0.5")

out = Path(__file__).with_name("oracle_values.hpp")
lines = ["#pragma once", "", "// Generated by generate_oracles.py (mpmath, 30 digits). Do not edit.", "",
         "#include <complex>", "", "namespace oracle {", ""]
for name, value, note in entries:
    ctype = "std::complex<double>" if value.startswith("{") else "double"
    lines.append(f"// {note}")
    lines.append(f"inline const {ctype} {name}{value if value.startswith('{') else ' = ' + value};")
lines += ["", "}  // namespace oracle", ""]
out.write_text("\n".join(lines))
print(f"wrote {len(entries)} values to {out}")
