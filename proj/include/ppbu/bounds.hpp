#pragma once

// Blow-up time bounds and the constants entering them.
//
//   upper, E(u0,0) < 0:            (||u0/|x|||^2 + ||grad u0||^2) / (p^-(2-p^-) J(u0,0))
//   upper, 0 <= C1 E(u0,0) < L(0): 4 p^+ C1 L(0) / ((p^+-2)^2 p^+ M(0)),  M(0) = L(0) - C1 E(u0,0)
//   lower:                          t0 + (1/C*) int_{L(t0)}^inf ds / (s^{g+} + s^{g-})
//
// The lower bound uses Gagliardo-Nirenberg exponents with r = 2 and q = p^+- :
//   alpha = (1/2 - 1/q) / (1/2 + 1/n - 1/2),   gamma = (1 - alpha) q / (2 - alpha q),
// and C* = max over q = p^+- of (2 - alpha q)/2 (2/(k_inf N_q alpha q))^{-alpha q/(2 - alpha q)} diam^{4 gamma}.
// The constants N_q are not known in closed form; they are estimated from below by a
// profile search and then inflated, which can only lower the certified T.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppbu/functionals.hpp"
#include "ppbu/model.hpp"
#include "ppbu/profiles.hpp"
#include "ppbu/radial_mesh.hpp"
#include "ppbu/solver.hpp"

namespace ppbu {

inline constexpr double kBallDiameter = 2.0;

// ---- Gagliardo-Nirenberg bookkeeping --------------------------------------------

/// Sobolev conjugate 2n/(n-2).
inline double critical_exponent(int n) { return 2.0 * n / (n - 2.0); }

/// Interpolation exponent alpha for gradient exponent r = 2.
inline double gn_alpha(int n, double q) {
    if (!(q > 2.0 && q < critical_exponent(n)))
        throw std::domain_error("Gagliardo–Nirenberg exponent requires 2 < q < 2n/(n−2)");
    return (0.5 - 1.0 / q) / (0.5 + 1.0 / n - 0.5);
}

/// gamma = (1 - alpha) q / (2 - alpha q). Requires alpha q < 2, in which case gamma > 1 for q > 2.
inline double growth_exponent(double alpha, double q) {
    const double denom = 2.0 - alpha * q;
    if (!(denom > 0.0))
        throw std::domain_error("lower-bound exponent undefined: alpha·q = " + std::to_string(alpha * q) +
                                " ≥ 2 (q = " + std::to_string(q) + ")");
    const double gamma = (1.0 - alpha) * q / denom;
    if (!(gamma > 1.0)) throw std::domain_error("lower-bound exponent gamma must exceed 1");
    return gamma;
}

/// ||u||_q^q / (||grad u||^{alpha q} ||u||_2^{(1-alpha) q}).
inline double gn_ratio(const RadialMesh& mesh, std::span<const double> u, double q, double alpha) {
    const double lq = lq_power(mesh, u, q);
    const double grad = std::sqrt(grad_l2_sq(mesh, u));
    const double l2 = std::sqrt(l2_sq(mesh, u));
    if (!(grad > 0.0) || !(l2 > 0.0)) return 0.0;
    return lq / (std::pow(grad, alpha * q) * std::pow(l2, (1.0 - alpha) * q));
}

/// ||u||_q / ||grad u||_2.
inline double sobolev_ratio(const RadialMesh& mesh, std::span<const double> u, double q) {
    const double lq = lq_power(mesh, u, q);
    const double grad = std::sqrt(grad_l2_sq(mesh, u));
    if (!(grad > 0.0)) return 0.0;
    return std::pow(lq, 1.0 / q) / grad;
}

struct ConstantSearchOptions {
    std::uint64_t seed = 0;
    int sweeps = 10;
    int random_directions = 12;
    double inflation = 2.0;
};

struct ConstantEstimate {
    double value = 0.0;      // inflated estimate used downstream
    double best_ratio = 0.0; // largest ratio actually observed
    std::string best_profile;
};

namespace detail {

// Perturbation directions shared by every dictionary entry: localized bumps plus seeded random
// smooth combinations. They do not depend on the dictionary, so enlarging the dictionary can
// only increase the maximum.
inline std::vector<std::vector<double>> perturbation_directions(const RadialMesh& mesh,
                                                                const ConstantSearchOptions& opt) {
    std::vector<std::vector<double>> dirs;
    for (int c = 0; c < 10; ++c) {
        const double centre = 0.1 * c;
        dirs.push_back(mesh.sample([centre](double r) {
            return (1.0 - r * r) * std::exp(-(r - centre) * (r - centre) / 0.005);
        }));
    }
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int d = 0; d < opt.random_directions; ++d) {
        double coeff[6];
        for (double& x : coeff) x = normal(rng);
        dirs.push_back(mesh.sample([&coeff](double r) {
            double s = 0.0, pw = 1.0;
            for (double x : coeff) {
                s += x * pw;
                pw *= r * r;
            }
            return (1.0 - r * r) * s;
        }));
    }
    for (auto& d : dirs) {
        const double norm = std::sqrt(l2_sq(mesh, d));
        if (norm > 0.0)
            for (double& x : d) x /= norm;
    }
    return dirs;
}

inline ConstantEstimate maximize_ratio(const RadialMesh& mesh, const ProfileDictionary& dictionary,
                                       const std::function<double(std::span<const double>)>& ratio,
                                       const ConstantSearchOptions& opt) {
    if (dictionary.empty()) throw std::invalid_argument("constant estimate: empty dictionary");
    const auto dirs = perturbation_directions(mesh, opt);
    ConstantEstimate out;
    std::vector<double> v, cand;
    for (const auto& profile : dictionary) {
        mesh.check_length(profile.values);
        const double norm = std::sqrt(l2_sq(mesh, profile.values));
        if (!(norm > 0.0)) continue;
        v = profile.values;
        for (double& x : v) x /= norm;
        double best = ratio(v);
        double step = 0.5;
        for (int sweep = 0; sweep < opt.sweeps; ++sweep) {
            for (const auto& d : dirs) {
                for (double sign : {1.0, -1.0}) {
                    cand = v;
                    for (std::size_t i = 0; i < v.size(); ++i) cand[i] += sign * step * d[i];
                    const double value = ratio(cand);
                    if (std::isfinite(value) && value > best) {
                        best = value;
                        v.swap(cand);
                    }
                }
            }
            step *= 0.6;
        }
        if (best > out.best_ratio) {
            out.best_ratio = best;
            out.best_profile = profile.name;
        }
    }
    out.value = opt.inflation * out.best_ratio;
    return out;
}

}  // namespace detail

/// Inflated empirical Gagliardo-Nirenberg constant N_q (r = 2).
inline ConstantEstimate gn_constant_estimate(const RadialMesh& mesh, double q, const ProfileDictionary& dictionary,
                                             const ConstantSearchOptions& opt = {}) {
    const double alpha = gn_alpha(mesh.dimension(), q);
    return detail::maximize_ratio(
        mesh, dictionary, [&](std::span<const double> u) { return gn_ratio(mesh, u, q, alpha); }, opt);
}

/// Inflated empirical Sobolev constant S_q.
inline ConstantEstimate sobolev_constant_estimate(const RadialMesh& mesh, double q,
                                                  const ProfileDictionary& dictionary,
                                                  const ConstantSearchOptions& opt = {}) {
    if (!(q > 2.0 && q < critical_exponent(mesh.dimension())))
        throw std::domain_error("Sobolev embedding requires 2 < q < 2n/(n−2)");
    return detail::maximize_ratio(
        mesh, dictionary, [&](std::span<const double> u) { return sobolev_ratio(mesh, u, q); }, opt);
}

// ---- Hardy -------------------------------------------------------------------------

struct HardyResult {
    double worst_ratio = 0.0;
    double hardy_constant = 0.0;
    int trials = 0;
};

/// Max of ||u/|x|||^2 / ||grad u||^2 over seeded random Dirichlet nodal functions: white noise,
/// random smooth polynomials, and cut-off singular powers r^{-a} near the extremal rate.
inline HardyResult hardy_check(const RadialMesh& mesh, int trials, std::uint64_t seed = 0) {
    if (trials < 1) throw std::invalid_argument("hardy_check: need at least one trial");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double a_ext = 0.5 * (mesh.dimension() - 2.0);
    HardyResult res;
    res.hardy_constant = hardy_constant(mesh.dimension());
    res.trials = trials;
    std::vector<double> u(mesh.size());
    const auto r = mesh.radii();
    for (int k = 0; k < trials; ++k) {
        switch (k % 3) {
            case 0:
                for (double& x : u) x = uni(rng);
                break;
            case 1: {
                double c[8];
                for (double& x : c) x = normal(rng);
                for (std::size_t i = 0; i < u.size(); ++i) {
                    double s = 0.0, pw = 1.0;
                    for (double x : c) {
                        s += x * pw;
                        pw *= r[i];
                    }
                    u[i] = (1.0 - r[i]) * s;
                }
                break;
            }
            default: {
                // (r^2 + eps^2)^{-a/2} - (1 + eps^2)^{-a/2}, a up to the extremal (n-2)/2
                const double a = a_ext * (0.5 + 0.5 * std::abs(uni(rng)));
                const double eps = std::pow(10.0, -4.0 * std::abs(uni(rng)));
                const double edge = std::pow(1.0 + eps * eps, -0.5 * a);
                for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::pow(r[i] * r[i] + eps * eps, -0.5 * a) - edge;
                break;
            }
        }
        const double g = grad_l2_sq(mesh, u);
        if (!(g > 0.0)) continue;
        res.worst_ratio = std::max(res.worst_ratio, weighted_l2_sq(mesh, u) / g);
    }
    return res;
}

// ---- concavity check --------------------------------------------------------------

namespace detail {
/// Fornberg finite-difference weights at x0 for derivatives 0..2 on nodes xs.
inline std::array<std::vector<double>, 3> fd_weights(double x0, std::span<const double> xs) {
    const std::size_t n = xs.size();
    std::array<std::vector<double>, 3> c;
    for (auto& row : c) row.assign(n, 0.0);
    double c1 = 1.0, c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t mn = std::min<std::size_t>(i, 2);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (std::size_t k = mn; k >= 1; --k) c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (std::size_t k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}
}  // namespace detail

struct ConcavityResult {
    bool hypothesis_holds = false;
    double worst_relative_margin = 0.0;  // min over interior samples of the normalized left side
    double psi0 = 0.0;
    double dpsi0 = 0.0;
    double bound = 0.0;  // psi(0) / (theta psi'(0))
};

/// Discrete check of psi'' psi - (1 + theta) psi'^2 >= 0 with five-point derivative stencils.
/// A sample passes when the left side is >= -rel_tol ((1+theta) psi'^2 + |psi psi''|).
inline ConcavityResult concavity_check(std::span<const double> t, std::span<const double> psi, double theta,
                                       double rel_tol = 1e-6) {
    if (t.size() != psi.size()) throw std::invalid_argument("concavity_check: length mismatch");
    if (t.size() < 5) throw std::invalid_argument("concavity_check: need at least 5 samples");
    if (!(theta > 0.0)) throw std::invalid_argument("concavity_check: theta must be positive");
    ConcavityResult res;
    const auto w0 = detail::fd_weights(t[0], t.subspan(0, 5));
    res.psi0 = psi[0];
    for (std::size_t j = 0; j < 5; ++j) res.dpsi0 += w0[1][j] * psi[j];
    if (!(res.psi0 > 0.0) || !(res.dpsi0 > 0.0))
        throw std::invalid_argument("concavity_check: requires psi(0) > 0 and psi'(0) > 0");
    res.bound = res.psi0 / (theta * res.dpsi0);

    res.hypothesis_holds = true;
    res.worst_relative_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 2; i + 2 < t.size(); ++i) {
        const auto w = detail::fd_weights(t[i], t.subspan(i - 2, 5));
        double d1 = 0.0, d2 = 0.0;
        for (std::size_t j = 0; j < 5; ++j) {
            d1 += w[1][j] * psi[i - 2 + j];
            d2 += w[2][j] * psi[i - 2 + j];
        }
        const double lhs = psi[i] * d2 - (1.0 + theta) * d1 * d1;
        const double scale = (1.0 + theta) * d1 * d1 + std::abs(psi[i] * d2);
        const double margin = scale > 0.0 ? lhs / scale : 0.0;
        res.worst_relative_margin = std::min(res.worst_relative_margin, margin);
        if (margin < -rel_tol) res.hypothesis_holds = false;
    }
    return res;
}

// ---- improper integral of the lower bound ------------------------------------------

namespace detail {
template <class F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

struct TailIntegral {
    double value = 0.0;   // certified lower value
    double numeric = 0.0; // part on [lower, upper]
    double tail = 0.0;    // analytic under-estimate beyond upper
    double upper = 0.0;
};

/// int_lower^inf ds / (s^{g+} + s^{g-}) as Simpson on [lower, 1e6 max(1, lower)] in log s plus
/// the lower tail estimate S^{1-g_max} / (2 (g_max - 1)).
inline TailIntegral lower_bound_integral(double lower, double gamma_plus, double gamma_minus) {
    if (!(lower > 0.0)) throw std::invalid_argument("lower-bound integral requires L(t0) > 0");
    if (!(gamma_plus > 1.0) || !(gamma_minus > 1.0))
        throw std::domain_error("lower-bound integral requires gamma± > 1");
    TailIntegral out;
    out.upper = 1e6 * std::max(1.0, lower);
    const auto f = [&](double v) {
        return 1.0 / (std::exp((gamma_plus - 1.0) * v) + std::exp((gamma_minus - 1.0) * v));
    };
    const double a = std::log(lower), b = std::log(out.upper);
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double tol = 1e-14 * std::max(std::abs(whole), std::numeric_limits<double>::min());
    out.numeric = detail::adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 50);
    const double g_max = std::max(gamma_plus, gamma_minus);
    out.tail = std::pow(out.upper, 1.0 - g_max) / (2.0 * (g_max - 1.0));
    out.value = out.numeric + out.tail;
    return out;
}

// ---- constants ----------------------------------------------------------------------

struct BoundConstants {
    double h_n = 0.0;
    double c1 = 0.0;
    double alpha_plus = 0.0, alpha_minus = 0.0;
    double gamma_plus = 0.0, gamma_minus = 0.0;
    double n_plus = 0.0, n_minus = 0.0;
    double c_star = 0.0;
    double diameter = kBallDiameter;
};

/// One entry of the C* maximum.
inline double c_star_term(double alpha, double q, double k_inf, double gn_constant, double gamma,
                          double diameter = kBallDiameter) {
    const double aq = alpha * q;
    return 0.5 * (2.0 - aq) * std::pow(2.0 / (k_inf * gn_constant * aq), -aq / (2.0 - aq)) *
           std::pow(diameter, 4.0 * gamma);
}

/// H_n and C1 always; the lower-bound constants throw std::domain_error when alpha p >= 2.
inline BoundConstants compute_constants(const RadialMesh& mesh, const Model& model,
                                        const ProfileDictionary& dictionary, const ConstantSearchOptions& opt = {}) {
    const int n = mesh.dimension();
    const double pm = model.exponent.p_minus, pp = model.exponent.p_plus;
    BoundConstants c;
    c.h_n = hardy_constant(n);
    c.c1 = c1_constant(n, pm);
    c.alpha_plus = gn_alpha(n, pp);
    c.alpha_minus = gn_alpha(n, pm);
    c.gamma_plus = growth_exponent(c.alpha_plus, pp);
    c.gamma_minus = growth_exponent(c.alpha_minus, pm);
    c.n_plus = gn_constant_estimate(mesh, pp, dictionary, opt).value;
    c.n_minus = pp == pm ? c.n_plus : gn_constant_estimate(mesh, pm, dictionary, opt).value;
    const double k_inf = model.modulation.k_inf;
    c.c_star = std::max(c_star_term(c.alpha_plus, pp, k_inf, c.n_plus, c.gamma_plus, c.diameter),
                        c_star_term(c.alpha_minus, pm, k_inf, c.n_minus, c.gamma_minus, c.diameter));
    return c;
}

// ---- the three bounds -----------------------------------------------------------------

struct BoundResult {
    bool applicable = false;
    double value = std::numeric_limits<double>::quiet_NaN();
    std::string reason;
    // precondition evidence
    double energy_E0 = 0.0;
    double energy_J0 = 0.0;
    double lyapunov_L0 = 0.0;
    double c1_E0 = 0.0;
};

inline BoundResult upper_bound_negative_energy(const RadialMesh& mesh, const Model& model,
                                               std::span<const double> u0) {
    const auto s = snapshot(mesh, model, u0, 0.0);
    BoundResult b;
    b.energy_E0 = s.E;
    b.energy_J0 = s.J;
    b.lyapunov_L0 = s.L;
    b.c1_E0 = c1_constant(mesh.dimension(), model.exponent.p_minus) * s.E;
    if (!(s.E < 0.0)) {
        b.reason = "requires E(u0,0) < 0, got " + format_double(s.E);
        return b;
    }
    const double pm = model.exponent.p_minus;
    b.applicable = true;
    b.value = (s.weighted_sq + s.grad_sq) / (pm * (2.0 - pm) * s.J);
    b.reason = "E(u0,0) < 0";
    return b;
}

inline BoundResult upper_bound_positive_energy(const RadialMesh& mesh, const Model& model,
                                               std::span<const double> u0) {
    const auto s = snapshot(mesh, model, u0, 0.0);
    const double c1 = c1_constant(mesh.dimension(), model.exponent.p_minus);
    BoundResult b;
    b.energy_E0 = s.E;
    b.energy_J0 = s.J;
    b.lyapunov_L0 = s.L;
    b.c1_E0 = c1 * s.E;
    if (!(b.c1_E0 >= 0.0)) {
        b.reason = "requires C1 E(u0,0) ≥ 0, got " + format_double(b.c1_E0);
        return b;
    }
    if (!(b.c1_E0 < s.L)) {
        b.reason = "requires C1 E(u0,0) < L(0), got C1 E = " + format_double(b.c1_E0) + ", L(0) = " + format_double(s.L);
        return b;
    }
    const double pp = model.exponent.p_plus;
    const double m0 = s.L - b.c1_E0;
    b.applicable = true;
    b.value = 4.0 * pp * c1 * s.L / ((pp - 2.0) * (pp - 2.0) * pp * m0);
    b.reason = "0 ≤ C1 E(u0,0) < L(0)";
    return b;
}

struct LowerBoundResult {
    double value = 0.0;
    double t0 = 0.0;
    double L_t0 = 0.0;
    TailIntegral integral;
};

/// t0 + (1/C*) int_{L(t0)}^inf ds / (s^{g+} + s^{g-}).
inline LowerBoundResult lower_bound(double t0, double L_t0, const BoundConstants& c) {
    LowerBoundResult out;
    out.t0 = t0;
    out.L_t0 = L_t0;
    out.integral = lower_bound_integral(L_t0, c.gamma_plus, c.gamma_minus);
    out.value = t0 + out.integral.value / c.c_star;
    return out;
}

/// Lower bound anchored at the last record time not after t0.
inline LowerBoundResult lower_bound(const TrajectoryRecord& record, const BoundConstants& c, double t0) {
    if (record.empty()) throw std::invalid_argument("lower_bound: empty record");
    const auto& steps = record.steps;
    if (t0 < steps.front().snap.t) throw std::invalid_argument("lower_bound: t0 precedes the record");
    std::size_t idx = 0;
    while (idx + 1 < steps.size() && steps[idx + 1].snap.t <= t0) ++idx;
    return lower_bound(steps[idx].snap.t, steps[idx].snap.L, c);
}

}  // namespace ppbu
