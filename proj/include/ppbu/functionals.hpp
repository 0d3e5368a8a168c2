#pragma once

// Energy-type functionals of a radial state at a fixed time t:
//
//   J_delta(u,t) = delta/2 ||grad u||^2 - k(t) int |u|^p / p
//   I_delta(u,t) = delta   ||grad u||^2 - k(t) int |u|^p
//   E_delta(u,t) = J_delta(u,t) + k_inf int 1/p
//   L(u)         = 1/2 (||u/|x|||^2 + ||grad u||^2),   K = -E,   M = L + C1 K
//   P(t)         = int p_t/p^2 (p ln|u| - 1) |u|^p
//
// Gradient and 1/|x|^2 terms use the exact piecewise-linear forms of the mesh,
// the nonlinear terms its element Gauss points.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "ppbu/model.hpp"
#include "ppbu/profiles.hpp"
#include "ppbu/radial_mesh.hpp"

namespace ppbu {

/// Hardy constant 4/(n-2)^2.
inline double hardy_constant(int n) { return 4.0 / ((n - 2.0) * (n - 2.0)); }

/// C1 = p^- H_n / (p^- - 2).
inline double c1_constant(int n, double p_minus) {
    if (!(p_minus > 2.0)) throw std::invalid_argument("C1 requires p⁻ > 2");
    return p_minus * hardy_constant(n) / (p_minus - 2.0);
}

/// Integrals of the source at one time, gathered in a single pass.
struct SourceIntegrals {
    double power = 0.0;          // int |u|^p
    double power_over_p = 0.0;   // int |u|^p / p
    double inverse_p = 0.0;      // int 1/p
    double p_term = 0.0;         // int p_t/p^2 (p ln|u| - 1)|u|^p
    double p_rate_bound = 0.0;   // int p_t/p^2
};

inline SourceIntegrals source_integrals(const RadialMesh& mesh, const ExponentField& exponent,
                                        std::span<const double> u, double t) {
    mesh.check_length(u);
    SourceIntegrals s;
    const bool moving = !exponent.time_independent;
    for (const auto& q : mesh.quadrature()) {
        const double w = q.weight;
        const double p = exponent.p(q.r, t);
        s.inverse_p += w / p;
        const double pt = moving ? exponent.p_t(q.r, t) : 0.0;
        s.p_rate_bound += w * pt / (p * p);
        const double a = std::abs(mesh.value_at(q, u));
        if (a == 0.0) {
            // |u|^p ln|u| -> 0 as u -> 0
            continue;
        }
        const double ap = std::pow(a, p);
        s.power += w * ap;
        s.power_over_p += w * ap / p;
        if (pt != 0.0) s.p_term += w * pt / (p * p) * (p * std::log(a) - 1.0) * ap;
    }
    return s;
}

inline double energy_J(const RadialMesh& mesh, const Model& model, std::span<const double> u, double t,
                       double delta = 1.0) {
    const double grad = grad_l2_sq(mesh, u);
    const auto src = source_integrals(mesh, model.exponent, u, t);
    return 0.5 * delta * grad - model.modulation.k(t) * src.power_over_p;
}

inline double nehari_I(const RadialMesh& mesh, const Model& model, std::span<const double> u, double t,
                       double delta = 1.0) {
    const double grad = grad_l2_sq(mesh, u);
    const auto src = source_integrals(mesh, model.exponent, u, t);
    return delta * grad - model.modulation.k(t) * src.power;
}

inline double modified_energy_E(const RadialMesh& mesh, const Model& model, std::span<const double> u, double t,
                                double delta = 1.0) {
    const double grad = grad_l2_sq(mesh, u);
    const auto src = source_integrals(mesh, model.exponent, u, t);
    return 0.5 * delta * grad - model.modulation.k(t) * src.power_over_p + model.modulation.k_inf * src.inverse_p;
}

inline double lyapunov_L(const RadialMesh& mesh, std::span<const double> u) {
    return 0.5 * (weighted_l2_sq(mesh, u) + grad_l2_sq(mesh, u));
}

inline double p_term(const RadialMesh& mesh, const Model& model, std::span<const double> u, double t) {
    return source_integrals(mesh, model.exponent, u, t).p_term;
}

/// All functionals of one state; K = -E and M = L + C1 K hold by construction.
struct FunctionalSnapshot {
    double t = 0.0;
    double J = 0.0;
    double I = 0.0;
    double E = 0.0;
    double L = 0.0;
    double K = 0.0;
    double M = 0.0;
    double P_term = 0.0;

    // ingredients, kept for identity checks
    double grad_sq = 0.0;
    double weighted_sq = 0.0;
    double power_over_p = 0.0;
    double k = 0.0;
    double k_prime = 0.0;
};

inline FunctionalSnapshot snapshot(const RadialMesh& mesh, const Model& model, std::span<const double> u, double t,
                                   double delta = 1.0) {
    FunctionalSnapshot s;
    s.t = t;
    s.grad_sq = grad_l2_sq(mesh, u);
    s.weighted_sq = weighted_l2_sq(mesh, u);
    const auto src = source_integrals(mesh, model.exponent, u, t);
    s.k = model.modulation.k(t);
    s.k_prime = model.modulation.k_prime(t);
    s.power_over_p = src.power_over_p;
    s.J = 0.5 * delta * s.grad_sq - s.k * src.power_over_p;
    s.I = delta * s.grad_sq - s.k * src.power;
    s.E = s.J + model.modulation.k_inf * src.inverse_p;
    s.L = 0.5 * (s.weighted_sq + s.grad_sq);
    s.K = -s.E;
    s.M = s.L + c1_constant(mesh.dimension(), model.exponent.p_minus) * s.K;
    s.P_term = src.p_term;
    return s;
}

/// The unique lambda_0 > 0 with I_delta(lambda_0 u, t) = 0.
///
/// Solves ln(k sum_i w_i lambda^{p_i-2} |u_i|^{p_i}) = ln(delta ||grad u||^2) for mu = ln lambda.
/// The left side is convex and strictly increasing in mu (slope between p_min-2 and p_max-2),
/// so Newton's method converges from any start; log-sum-exp keeps large scalings finite.
inline double nehari_scaling(const RadialMesh& mesh, const Model& model, std::span<const double> u, double t,
                             double delta = 1.0) {
    mesh.check_length(u);
    const double k = model.modulation.k(t);
    if (!(k > 0.0)) throw std::invalid_argument("nehari_scaling requires k(t) > 0");
    if (!(delta > 0.0)) throw std::invalid_argument("nehari_scaling requires delta > 0");
    const double grad = grad_l2_sq(mesh, u);
    if (!(grad > 0.0)) throw std::invalid_argument("nehari_scaling requires u ≠ 0");

    std::vector<double> exps, logs;  // exponent p_q - 2 and log(w_q |u_q|^{p_q}) per Gauss point
    exps.reserve(mesh.quadrature().size());
    logs.reserve(mesh.quadrature().size());
    for (const auto& q : mesh.quadrature()) {
        const double a = std::abs(mesh.value_at(q, u));
        if (a == 0.0) continue;
        const double p = model.exponent.p(q.r, t);
        exps.push_back(p - 2.0);
        logs.push_back(std::log(q.weight) + p * std::log(a));
    }
    const double target = std::log(delta * grad) - std::log(k);

    // phi(mu) = logsumexp(mu * e_i + l_i) - target, phi'(mu) = softmax-weighted mean of e_i
    const auto eval = [&](double mu, double& slope) {
        double peak = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < exps.size(); ++i) peak = std::max(peak, mu * exps[i] + logs[i]);
        double sum = 0.0, dsum = 0.0;
        for (std::size_t i = 0; i < exps.size(); ++i) {
            const double e = std::exp(mu * exps[i] + logs[i] - peak);
            sum += e;
            dsum += e * exps[i];
        }
        slope = dsum / sum;
        return peak + std::log(sum) - target;
    };

    const double e_mean = [&] {
        double s = 0.0;
        for (double e : exps) s += e;
        return s / static_cast<double>(exps.size());
    }();
    double slope = 0.0;
    double mu = -eval(0.0, slope) / e_mean;
    for (int it = 0; it < 200; ++it) {
        const double phi = eval(mu, slope);
        const double step = phi / slope;
        mu -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(mu))) break;
    }
    return std::exp(mu);
}

/// min over the dictionary of J_delta(lambda_0(u) u, t): an upper estimate of the well depth d_delta(t).
inline double well_depth_estimate(const RadialMesh& mesh, const Model& model, const ProfileDictionary& dictionary,
                                  double t, double delta = 1.0) {
    if (dictionary.empty()) throw std::invalid_argument("well_depth_estimate: empty dictionary");
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> v;
    for (const auto& profile : dictionary) {
        const double lambda = nehari_scaling(mesh, model, profile.values, t, delta);
        v.assign(profile.values.begin(), profile.values.end());
        for (double& x : v) x *= lambda;
        best = std::min(best, energy_J(mesh, model, v, t, delta));
    }
    return best;
}

/// d_{delta,*} estimated as the minimum of well_depth_estimate over a time grid.
inline double well_depth_star(const RadialMesh& mesh, const Model& model, const ProfileDictionary& dictionary,
                              std::span<const double> t_grid, double delta = 1.0) {
    if (t_grid.empty()) throw std::invalid_argument("well_depth_star: empty time grid");
    double best = std::numeric_limits<double>::infinity();
    for (double t : t_grid) best = std::min(best, well_depth_estimate(mesh, model, dictionary, t, delta));
    return best;
}

/// Membership in the stable set: J_delta(u,t) < d_star and I_delta(u,t) > 0, where I must
/// exceed rounding level (1e-12 delta ||grad u||^2) so that states on the Nehari manifold are excluded.
inline bool stable_set_member(const RadialMesh& mesh, const Model& model, std::span<const double> u, double t,
                              double delta, double d_star) {
    const double floor = 1e-12 * delta * grad_l2_sq(mesh, u);
    return energy_J(mesh, model, u, t, delta) < d_star && nehari_I(mesh, model, u, t, delta) > floor;
}

}  // namespace ppbu
