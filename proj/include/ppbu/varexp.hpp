#pragma once

// Modular and Luxemburg norm of variable-exponent Lebesgue spaces L^{s(.)},
// evaluated at a fixed time with nodal quadrature.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

#include "ppbu/radial_mesh.hpp"

namespace ppbu::varexp {

namespace detail {
inline void check_inputs(std::span<const double> weights, std::span<const double> u, std::span<const double> s) {
    if (u.size() != weights.size() || s.size() != weights.size())
        throw std::invalid_argument("varexp: length mismatch between weights, values and exponents");
    for (double e : s)
        if (!(e >= 1.0)) throw std::invalid_argument("varexp: exponent must be ≥ 1 at every node");
}

// sum_i w_i |u_i / lambda|^{s_i}
inline double scaled_modular(std::span<const double> w, std::span<const double> u, std::span<const double> s,
                             double lambda) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] == 0.0) continue;
        acc += w[i] * std::pow(std::abs(u[i]) / lambda, s[i]);
    }
    return acc;
}
}  // namespace detail

/// rho(u) = sum_i w_i |u_i|^{s_i} for an arbitrary positive measure given by `weights`.
inline double modular(std::span<const double> weights, std::span<const double> u, std::span<const double> s) {
    detail::check_inputs(weights, u, s);
    return detail::scaled_modular(weights, u, s, 1.0);
}

/// rho(u) = int_Omega |u|^{s(x)} dx on the mesh.
inline double modular(const RadialMesh& mesh, std::span<const double> u, std::span<const double> s) {
    mesh.check_length(u);
    return modular(mesh.weights(), u, s);
}

/// inf { lambda > 0 : rho(u / lambda) <= 1 }.
///
/// lambda -> rho(u / lambda) is continuous and strictly decreasing for u != 0, so the
/// root of rho(u / lambda) = 1 is bracketed by geometric expansion and then bisected.
/// Throws std::runtime_error when no bracket is found within the iteration cap.
inline double luxemburg_norm(std::span<const double> weights, std::span<const double> u, std::span<const double> s,
                             int max_iterations = 200) {
    detail::check_inputs(weights, u, s);
    const double rho = detail::scaled_modular(weights, u, s, 1.0);
    if (rho == 0.0) return 0.0;
    if (!std::isfinite(rho)) throw std::runtime_error("luxemburg_norm: modular is not finite");

    const double s_min = *std::min_element(s.begin(), s.end());
    const double s_max = *std::max_element(s.begin(), s.end());
    // rho(u/lambda) lies between lambda^{-s_min} rho and lambda^{-s_max} rho (in the right order)
    double lo = std::min(std::pow(rho, 1.0 / s_min), std::pow(rho, 1.0 / s_max));
    double hi = std::max(std::pow(rho, 1.0 / s_min), std::pow(rho, 1.0 / s_max));
    const auto f = [&](double lambda) { return detail::scaled_modular(weights, u, s, lambda) - 1.0; };

    int it = 0;
    while (f(lo) <= 0.0) {
        lo *= 0.5;
        if (++it > max_iterations || lo == 0.0) throw std::runtime_error("luxemburg_norm: failed to bracket");
    }
    while (f(hi) > 0.0) {
        hi *= 2.0;
        if (++it > max_iterations || !std::isfinite(hi)) throw std::runtime_error("luxemburg_norm: failed to bracket");
    }
    for (int k = 0; k < max_iterations; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    // pick the end point with the smaller residual
    return std::abs(f(lo)) < std::abs(f(hi)) ? lo : hi;
}

inline double luxemburg_norm(const RadialMesh& mesh, std::span<const double> u, std::span<const double> s) {
    mesh.check_length(u);
    return luxemburg_norm(mesh.weights(), u, s);
}

}  // namespace ppbu::varexp
