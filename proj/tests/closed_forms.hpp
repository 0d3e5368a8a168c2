#pragma once

// Exact radial integrals for u = 1 - r^2 in the unit ball of R^3 (p = 3, k = 1 where relevant),
// evaluated symbolically offline and frozen here.

#include <numbers>

namespace closed_forms {

inline constexpr double pi = std::numbers::pi;

inline constexpr double ball_volume_3 = 4.0 * pi / 3.0;
inline constexpr double ball_volume_4 = pi * pi / 2.0;
inline constexpr double r_squared = 4.0 * pi / 5.0;       // int r^2 dx
inline constexpr double weighted = 32.0 * pi / 15.0;      // int u^2/|x|^2 dx
inline constexpr double gradient = 16.0 * pi / 5.0;       // int |grad u|^2 dx
inline constexpr double l2 = 32.0 * pi / 105.0;           // int u^2 dx
inline constexpr double cube = 64.0 * pi / 315.0;         // int |u|^3 dx
inline constexpr double energy_J = 1448.0 * pi / 945.0;   // 8pi/5 - 64pi/945
inline constexpr double nehari_I = 944.0 * pi / 315.0;    // 16pi/5 - 64pi/315
inline constexpr double lyapunov_L = 8.0 * pi / 3.0;
inline constexpr double energy_offset = 4.0 * pi / 9.0;   // k_inf int 1/p
inline constexpr double nehari_lambda = 15.75;
inline constexpr double well_depth = 1323.0 * pi / 10.0;  // 415.6327...
inline constexpr double sobolev_ratio_q3 = 0.27155418827509444;
inline constexpr double gn_ratio_q3 = 0.11680501530828952;

// u0 = A (1 - r^2)
inline constexpr double upper_1_a24 = 70.0;
inline constexpr double upper_1_a27 = 70.0 / 9.0;
inline constexpr double upper_1_a30 = 70.0 / 17.0;
inline constexpr double energy_J_a30 = -2720.0 * pi / 7.0;
inline constexpr double energy_E_a22 = 50756.0 * pi / 945.0;
inline constexpr double lyapunov_L_a22 = 3872.0 * pi / 3.0;
inline constexpr double upper_2_a22 = 1219680.0 / 12721.0;  // 95.879...

}  // namespace closed_forms
