#pragma once

// Generated by generate_oracles.py (mpmath, 30 digits). Do not edit.

#include <complex>

namespace oracle {

// r(t) for k = e^-t, ramp control, t = 0.5
inline const double r_exp_t0_5 = -1.2355820575582631692;
// r(t) for k = e^-t, ramp control, t = 1.0
inline const double r_exp_t1_0 = -1.4464913440831718334;
// r(t) for k = e^-t, ramp control, t = 2.0
inline const double r_exp_t2_0 = -1.8130996534803382072;
// r(t) for k = e^-t, ramp control, t = 5.0
inline const double r_exp_t5_0 = -2.6532018973295492084;
// theta(1, t) for k = e^-t, t = 1.5
inline const double theta_exp_x1_t1_5 = 0.31209808552774802685;
// theta(1, t) for k = e^-t, t = 2.0
inline const double theta_exp_x1_t2_0 = 0.63961397592793493568;
// theta(1, t) for k = e^-t, t = 3.0
inline const double theta_exp_x1_t3_0 = 1.330510667374684947;
// theta(1, t) for k = e^-t, t = 4.0
inline const double theta_exp_x1_t4_0 = 2.0573417335343589865;
// r(0.5) for k = delta
inline const double r_dirac_t0_5 = -0.79788456080286535588;
// omega at z = 1+i for k = e^-t
inline const std::complex<double> omega_exp_z1p1i{1.4426152744526829202, 1.0397782600555705339};
// interval response, L = 2, z = 1+i
inline const std::complex<double> R_interval_exp_L2_z1p1i{-0.52199569655737977602, 0.71618793441657242741};
// mode n = 4, xi = 1, t = 1.0
inline const double theta_mode_n4_t1_0 = 0.33967399169472474532;
// mode n = 4, xi = 1, t = 3.0
inline const double theta_mode_n4_t3_0 = -15.753933599055277056;
// mode n = 9, xi = 1, t = 1.0
inline const double theta_mode_n9_t1_0 = -2.2133842061997761542;
// mode n = 16, xi = 1, t = 2.0
inline const double theta_mode_n16_t2_0 = 115.95763244361587949;
// residue of z^3/(z^4+n^2) at a simple pole
inline const double mode_residue_constant = 0.25;
// omega at z = 0.5-2i for k = e^-t
inline const std::complex<double> omega_exp_z0p5m2i{0.97567464659641425144, -2.0498636579077735929};
// k from K = 2/z + 1/(z+3)^2 at t = 0.5
inline const double k_sum_t0_5 = 2.1115650800742149145;

}  // namespace oracle
