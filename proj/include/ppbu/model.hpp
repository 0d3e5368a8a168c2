#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ppbu/radial_mesh.hpp"

namespace ppbu {

/// Exponent p(r, t) of the source |u|^{p-2} u together with its declared range.
struct ExponentField {
    std::string name;
    std::function<double(double r, double t)> p;
    std::function<double(double r, double t)> p_t;
    double p_minus = 0.0;
    double p_plus = 0.0;
    bool time_independent = false;

    [[nodiscard]] std::vector<double> nodal(const RadialMesh& mesh, double t) const {
        const auto r = mesh.radii();
        std::vector<double> out(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) out[i] = p(r[i], t);
        return out;
    }
    [[nodiscard]] std::vector<double> nodal_rate(const RadialMesh& mesh, double t) const {
        const auto r = mesh.radii();
        std::vector<double> out(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) out[i] = p_t(r[i], t);
        return out;
    }
};

/// Modulation k(t) of the source, nondecreasing towards k_inf.
struct SourceModulation {
    std::string name;
    std::function<double(double t)> k;
    std::function<double(double t)> k_prime;
    double k_inf = 0.0;
};

/// Exponent and modulation of one problem instance.
struct Model {
    ExponentField exponent;
    SourceModulation modulation;
};

/// Upper limit 2(n-1)/(n-2) for p^+.
inline double exponent_ceiling(int n) { return 2.0 * (n - 1.0) / (n - 2.0); }

// ---- built-in model library -------------------------------------------------

inline ExponentField constant_exponent(double value) {
    ExponentField f;
    f.name = "constant";
    f.p = [value](double, double) { return value; };
    f.p_t = [](double, double) { return 0.0; };
    f.p_minus = value;
    f.p_plus = value;
    f.time_independent = true;
    return f;
}

/// p(r, t) = a + b r + c t / (1 + t) on r in [0, 1], t >= 0.
inline ExponentField separable_exponent(double a, double b, double c) {
    ExponentField f;
    f.name = "separable";
    f.p = [a, b, c](double r, double t) { return a + b * r + c * t / (1.0 + t); };
    f.p_t = [c](double, double t) { return c / ((1.0 + t) * (1.0 + t)); };
    // range over the closed cylinder [0,1] x [0, inf)
    f.p_minus = a + std::min(b, 0.0) + std::min(c, 0.0);
    f.p_plus = a + std::max(b, 0.0) + std::max(c, 0.0);
    f.time_independent = (c == 0.0);
    return f;
}

inline SourceModulation constant_modulation(double value) {
    SourceModulation m;
    m.name = "constant";
    m.k = [value](double) { return value; };
    m.k_prime = [](double) { return 0.0; };
    m.k_inf = value;
    return m;
}

/// k(t) = k_inf - (k_inf - k0) e^{-t}.
inline SourceModulation relaxing_modulation(double k0, double k_inf) {
    SourceModulation m;
    m.name = "relaxing";
    m.k = [k0, k_inf](double t) { return k_inf - (k_inf - k0) * std::exp(-t); };
    m.k_prime = [k0, k_inf](double t) { return (k_inf - k0) * std::exp(-t); };
    m.k_inf = k_inf;
    return m;
}

// ---- initial data -----------------------------------------------------------

/// Nodal initial profile u_0; the boundary value u_0(1) = 0 is implicit in the mesh.
struct InitialDatum {
    std::string family;
    std::vector<double> values;
};

/// u_0 = A (1 - r^2).
inline InitialDatum parabolic_datum(const RadialMesh& mesh, double amplitude) {
    return {"parabolic", mesh.sample([amplitude](double r) { return amplitude * (1.0 - r * r); })};
}

/// u_0 = A (e^{-r^2/w^2} - e^{-1/w^2}).
inline InitialDatum gaussian_datum(const RadialMesh& mesh, double amplitude, double width) {
    if (!(width > 0.0)) throw std::invalid_argument("gaussian width must be positive");
    const double edge = std::exp(-1.0 / (width * width));
    return {"gaussian", mesh.sample([=](double r) { return amplitude * (std::exp(-r * r / (width * width)) - edge); })};
}

/// u_0 = A cos(pi r / 2).
inline InitialDatum cosine_datum(const RadialMesh& mesh, double amplitude) {
    return {"cosine", mesh.sample([amplitude](double r) { return amplitude * std::cos(0.5 * std::numbers::pi * r); })};
}

inline void validate_datum(const RadialMesh& mesh, const InitialDatum& datum) {
    mesh.check_length(datum.values);
    bool nonzero = false;
    for (double v : datum.values) {
        if (!std::isfinite(v)) throw std::invalid_argument("initial datum has non-finite entries");
        nonzero = nonzero || v != 0.0;
    }
    if (!nonzero) throw std::invalid_argument("initial datum must not vanish identically");
}

// ---- validation -------------------------------------------------------------

struct Violation {
    std::string constraint;
    double r = std::nan("");
    double t = std::nan("");
    double value = std::nan("");
};

struct ValidationReport {
    std::string subject;
    std::vector<Violation> violations;

    [[nodiscard]] bool passed() const noexcept { return violations.empty(); }
    void add(std::string what, double r, double t, double value) {
        violations.push_back({std::move(what), r, t, value});
    }
    [[nodiscard]] bool mentions(const std::string& needle) const {
        return std::any_of(violations.begin(), violations.end(),
                           [&](const Violation& v) { return v.constraint.find(needle) != std::string::npos; });
    }
};

namespace detail {
inline void require_time_grid(std::span<const double> t_grid) {
    if (t_grid.empty()) throw std::invalid_argument("time grid must be nonempty");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1])) throw std::invalid_argument("time grid must be increasing");
}
}  // namespace detail

/// Samples p and p_t on mesh radii x t_grid and records each violated condition once per kind,
/// at its first offending sample. The declared bounds themselves are checked against (2, 2(n-1)/(n-2)).
inline ValidationReport validate_exponent(const ExponentField& field, const RadialMesh& mesh,
                                          std::span<const double> t_grid) {
    detail::require_time_grid(t_grid);
    ValidationReport report{"exponent:" + field.name, {}};
    const double ceiling = exponent_ceiling(mesh.dimension());
    const double nan = std::nan("");
    if (!(field.p_minus > 2.0)) report.add("p⁻ must exceed 2", nan, nan, field.p_minus);
    if (!(field.p_plus < ceiling))
        report.add("p⁺ must be below 2(n−1)/(n−2) = " + std::to_string(ceiling), nan, nan, field.p_plus);
    if (field.p_minus > field.p_plus) report.add("p⁻ must not exceed p⁺", nan, nan, field.p_minus);

    bool below = false, above = false, decreasing = false, nonfinite = false;
    const auto r = mesh.radii();
    for (double t : t_grid) {
        for (double ri : r) {
            const double p = field.p(ri, t);
            const double pt = field.p_t(ri, t);
            if (!std::isfinite(p) || !std::isfinite(pt)) {
                if (!nonfinite) report.add("p must be finite", ri, t, p);
                nonfinite = true;
                continue;
            }
            if (!below && p < field.p_minus) {
                report.add("p below declared p⁻", ri, t, p);
                below = true;
            }
            if (!below && !(p > 2.0) && !report.mentions("p⁻ must exceed 2")) {
                report.add("p⁻ must exceed 2", ri, t, p);
                below = true;
            }
            if (!above && (p > field.p_plus || !(p < ceiling))) {
                report.add("p above declared p⁺ or 2(n−1)/(n−2)", ri, t, p);
                above = true;
            }
            if (!decreasing && pt < 0.0) {
                report.add("p_t ≥ 0 violated", ri, t, pt);
                decreasing = true;
            }
        }
    }
    return report;
}

/// Checks k(0) > 0, k' >= 0, k <= k_inf on t_grid, and k(horizon) >= k_inf - tol.
inline ValidationReport validate_modulation(const SourceModulation& mod, std::span<const double> t_grid,
                                            double horizon = 50.0, double tol = 1e-3) {
    detail::require_time_grid(t_grid);
    ValidationReport report{"modulation:" + mod.name, {}};
    const double nan = std::nan("");
    const double k0 = mod.k(0.0);
    if (!(k0 > 0.0)) report.add("k(0) > 0 violated", nan, 0.0, k0);
    if (!std::isfinite(mod.k_inf)) report.add("k_inf must be finite", nan, nan, mod.k_inf);
    bool slope = false, over = false;
    for (double t : t_grid) {
        const double kp = mod.k_prime(t);
        const double k = mod.k(t);
        if (!slope && !(kp >= 0.0)) {
            report.add("k' ≥ 0 violated", nan, t, kp);
            slope = true;
        }
        if (!over && k > mod.k_inf + tol * std::max(1.0, std::abs(mod.k_inf))) {
            report.add("k ≤ k_inf violated", nan, t, k);
            over = true;
        }
    }
    const double k_far = mod.k(horizon);
    if (k_far < mod.k_inf - tol * std::max(1.0, std::abs(mod.k_inf)))
        report.add("k(horizon) has not approached k_inf", nan, horizon, k_far);
    return report;
}

/// Empirical sup over sample pairs of |p(xi) - p(eta)| log(e + 1/|xi - eta|), xi = (r, t).
/// At most `max_radii` radial samples are used (evenly strided over the mesh).
inline double log_holder_constant(const ExponentField& field, const RadialMesh& mesh,
                                  std::span<const double> t_grid, std::size_t max_radii = 128) {
    const auto radii = mesh.radii();
    const std::size_t stride = std::max<std::size_t>(1, (radii.size() + max_radii - 1) / max_radii);
    struct Sample {
        double r, t, p;
    };
    std::vector<Sample> samples;
    for (double t : t_grid)
        for (std::size_t i = 0; i < radii.size(); i += stride) samples.push_back({radii[i], t, field.p(radii[i], t)});

    double best = 0.0;
    for (std::size_t a = 0; a < samples.size(); ++a) {
        for (std::size_t b = a + 1; b < samples.size(); ++b) {
            const double dp = std::abs(samples[a].p - samples[b].p);
            if (dp == 0.0) continue;
            const double dist = std::hypot(samples[a].r - samples[b].r, samples[a].t - samples[b].t);
            best = std::max(best, dp * std::log(std::numbers::e + 1.0 / dist));
        }
    }
    return best;
}

/// Uniform time grid on [0, t_max] with `count` samples.
inline std::vector<double> uniform_time_grid(double t_max, std::size_t count) {
    if (count == 0) throw std::invalid_argument("time grid needs at least one sample");
    std::vector<double> t(count);
    for (std::size_t i = 0; i < count; ++i) t[i] = count == 1 ? 0.0 : t_max * static_cast<double>(i) / (count - 1);
    return t;
}

}  // namespace ppbu
