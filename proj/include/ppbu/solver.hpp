#pragma once

// Time stepping of
//
//   (W + A) u_t + A u = k(t) F(u, t),    F_i(u,t) = w_i |u_i|^{p(r_i,t)-2} u_i,
//
// the Galerkin form of u_t/|x|^2 - Delta u_t - Delta u = k(t)|u|^{p-2}u on the radial
// mesh. W is the 1/|x|^2 mass matrix, A the stiffness matrix. One step is
//
//   (W + A)(u^{m+1} - u^m) + tau A u^{m+1} = tau k(t_m) F(u^m, t_m),
//
// a single SPD tridiagonal solve. Testing with u^{m+1} - u^m and using the convexity
// of |s|^p/p shows E(u^{m+1}, t_{m+1}) <= E(u^m, t_m) for p_t >= 0, k' >= 0, k <= k_inf.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppbu/functionals.hpp"
#include "ppbu/model.hpp"
#include "ppbu/radial_mesh.hpp"
#include "ppbu/tridiagonal.hpp"

namespace ppbu {

struct State {
    double t = 0.0;
    std::vector<double> u;
};

struct SolverConfig {
    double tau0 = 1e-2;
    double tau_min = 1e-12;
    double growth_cap = 1.5;        // max accepted L(t+tau)/L(t)
    double blowup_factor = 1e8;     // default threshold is blowup_factor * L(0)
    std::optional<double> blowup_threshold;
    double t_end = 10.0;

    void validate() const {
        if (!(tau_min > 0.0)) throw std::invalid_argument("solver: tau_min must be positive");
        if (!(tau0 >= tau_min)) throw std::invalid_argument("solver: tau0 must be ≥ tau_min");
        if (!(growth_cap > 1.0)) throw std::invalid_argument("solver: growth_cap must exceed 1");
        if (blowup_threshold && !(*blowup_threshold > 0.0))
            throw std::invalid_argument("solver: blow-up threshold must be positive");
        if (!(blowup_factor > 0.0)) throw std::invalid_argument("solver: blowup_factor must be positive");
        if (!(t_end > 0.0)) throw std::invalid_argument("solver: t_end must be positive");
    }
};

enum class Termination { horizon, blowup, step_underflow };

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::horizon: return "horizon";
        case Termination::blowup: return "blowup";
        case Termination::step_underflow: return "step_underflow";
    }
    return "unknown";
}

inline Termination termination_from_string(const std::string& s) {
    if (s == "horizon") return Termination::horizon;
    if (s == "blowup") return Termination::blowup;
    if (s == "step_underflow") return Termination::step_underflow;
    throw std::invalid_argument("unknown termination reason '" + s + "'");
}

struct TrajectoryStep {
    FunctionalSnapshot snap;
    double tau = 0.0;          // step that produced this snapshot (0 for the initial one)
    double dissipation = 0.0;  // (du)^T (W + A) du / tau, i.e. tau (||u_t/|x|||^2 + ||grad u_t||^2)
};

struct TrajectoryRecord {
    std::vector<TrajectoryStep> steps;
    Termination termination = Termination::horizon;
    std::size_t rejected_steps = 0;
    double blowup_threshold = 0.0;
    std::vector<double> final_state;

    [[nodiscard]] bool empty() const noexcept { return steps.empty(); }
    [[nodiscard]] std::vector<double> times() const {
        std::vector<double> t;
        for (const auto& s : steps) t.push_back(s.snap.t);
        return t;
    }
    [[nodiscard]] std::vector<double> lyapunov() const {
        std::vector<double> l;
        for (const auto& s : steps) l.push_back(s.snap.L);
        return l;
    }
};

class NonFiniteState : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Operators {
    SymmetricTridiagonal weighted_mass;  // W
    SymmetricTridiagonal stiffness;      // A
    SymmetricTridiagonal metric;         // W + A
};

inline Operators assemble_operators(const RadialMesh& mesh) {
    Operators ops{mesh.weighted_mass(), mesh.stiffness(), {}};
    ops.metric = ops.weighted_mass.combine(1.0, ops.stiffness, 1.0);
    return ops;
}

/// Load F_i(u, t) = int |u|^{p-2} u phi_i dx, the gradient of int |u|^p / p in the nodal values.
inline std::vector<double> source_load(const RadialMesh& mesh, const ExponentField& exponent,
                                       std::span<const double> u, double t) {
    std::vector<double> f(u.size(), 0.0);
    for (const auto& q : mesh.quadrature()) {
        const double v = mesh.value_at(q, u);
        if (v == 0.0) continue;
        const double g = q.weight * std::pow(std::abs(v), exponent.p(q.r, t) - 2.0) * v;
        f[q.left] += g * q.phi_left;
        if (q.left + 1 < f.size()) f[q.left + 1] += g * q.phi_right;
    }
    return f;
}

/// One semi-implicit step of size tau. Throws NonFiniteState if the result overflows.
inline State step(const RadialMesh& mesh, const Model& model, const Operators& ops, const State& state, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("step: tau must be positive");
    mesh.check_length(state.u);
    const double k = model.modulation.k(state.t);
    auto rhs = ops.metric.apply(state.u);
    const auto load = source_load(mesh, model.exponent, state.u, state.t);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += tau * k * load[i];
    const auto system = ops.metric.combine(1.0, ops.stiffness, tau);
    State next{state.t + tau, system.solve(rhs)};
    for (double v : next.u)
        if (!std::isfinite(v)) throw NonFiniteState("step produced non-finite values; reduce tau");
    return next;
}

/// Adaptive run from u0 until t_end, L > threshold (blow-up) or tau < tau_min.
inline TrajectoryRecord run(const RadialMesh& mesh, const Model& model, std::span<const double> u0,
                            const SolverConfig& config) {
    config.validate();
    mesh.check_length(u0);
    if (std::all_of(u0.begin(), u0.end(), [](double v) { return v == 0.0; }))
        throw std::invalid_argument("run: initial datum must not vanish identically");

    const Operators ops = assemble_operators(mesh);
    TrajectoryRecord record;
    State state{0.0, std::vector<double>(u0.begin(), u0.end())};
    record.steps.push_back({snapshot(mesh, model, state.u, state.t), 0.0, 0.0});
    const double threshold = config.blowup_threshold.value_or(config.blowup_factor * record.steps.front().snap.L);
    record.blowup_threshold = threshold;

    const double calm = 1.0 + 0.5 * (config.growth_cap - 1.0);
    double tau = config.tau0;
    double current_L = record.steps.front().snap.L;
    std::vector<double> du(u0.size());

    while (true) {
        const double remaining = config.t_end - state.t;
        if (remaining <= 1e-12 * std::max(1.0, config.t_end)) {
            record.termination = Termination::horizon;
            break;
        }
        // absorb a rounding-level sliver into the last step so that t_end is hit exactly
        const double h = tau >= remaining - 1e-9 * std::max(1.0, config.t_end) ? remaining : tau;

        std::optional<State> next;
        try {
            next = step(mesh, model, ops, state, h);
        } catch (const NonFiniteState&) {
            next.reset();
        }
        const double next_L = next ? lyapunov_L(mesh, next->u) : std::numeric_limits<double>::infinity();
        if (!std::isfinite(next_L) || next_L > config.growth_cap * current_L) {
            ++record.rejected_steps;
            tau *= 0.5;
            if (tau < config.tau_min) {
                record.termination = Termination::step_underflow;
                break;
            }
            continue;
        }

        for (std::size_t i = 0; i < du.size(); ++i) du[i] = next->u[i] - state.u[i];
        const double dissipation = ops.metric.quadratic_form(du) / h;
        if (h == remaining) next->t = config.t_end;
        state = std::move(*next);
        record.steps.push_back({snapshot(mesh, model, state.u, state.t), h, dissipation});
        const double previous_L = current_L;
        current_L = next_L;

        if (current_L > threshold) {
            record.termination = Termination::blowup;
            break;
        }
        if (current_L <= calm * previous_L) tau = std::min(1.2 * tau, config.tau0);
    }
    record.final_state = state.u;
    return record;
}

// ---- blow-up time ------------------------------------------------------------

struct BlowupEstimate {
    double t_num = 0.0;
    double t_last = 0.0;      // bracket is [t_last, t_num]
    double growth_exponent = 0.0;  // fitted gamma in L' ~ L^gamma
    std::size_t tail_samples = 0;
};

namespace detail {
// least squares y = a + b x
inline std::pair<double, double> linear_fit(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double b = sxy / sxx;
    return {my - b * mx, b};
}
}  // namespace detail

/// Extrapolated blow-up time from the last decade of growth of L.
///
/// On the tail (samples with L >= L_last / 10, at least 4) the growth law L' ~ L^gamma is fitted
/// on secant slopes in log-log form; then L^{-(gamma - 1)}, which is affine in t for an exact
/// power law L ~ (T - t)^{-1/(gamma-1)}, is fitted linearly and its root is returned, never
/// earlier than the last sample.
inline BlowupEstimate detect_blowup_time(std::span<const double> t, std::span<const double> L,
                                         Termination termination) {
    if (termination == Termination::horizon) throw std::invalid_argument("no blow-up: run terminated at the horizon");
    if (t.size() != L.size()) throw std::invalid_argument("detect_blowup_time: length mismatch");
    if (t.size() < 4) throw std::invalid_argument("no blow-up: too few samples to extrapolate");

    const double L_last = L.back();
    std::size_t first = t.size() - 1;
    while (first > 0 && L[first - 1] >= 0.1 * L_last) --first;
    first = std::min(first, t.size() - 4);

    std::vector<double> logL, logRate;
    for (std::size_t i = first; i + 1 < t.size(); ++i) {
        const double dt = t[i + 1] - t[i];
        const double dL = L[i + 1] - L[i];
        if (!(dt > 0.0) || !(dL > 0.0) || !(L[i] > 0.0)) continue;
        logL.push_back(0.5 * (std::log(L[i]) + std::log(L[i + 1])));
        logRate.push_back(std::log(dL / dt));
    }
    if (logL.size() < 2) throw std::invalid_argument("no blow-up: L is not growing on the tail");

    double gamma = detail::linear_fit(logL, logRate).second;
    // exponential or slower growth has no finite-time singularity; keep the fit defined
    gamma = std::max(gamma, 1.0 + 1e-3);

    std::vector<double> tt, yy;
    for (std::size_t i = first; i < t.size(); ++i) {
        tt.push_back(t[i]);
        yy.push_back(std::pow(L[i], -(gamma - 1.0)));
    }
    const auto [a, b] = detail::linear_fit(tt, yy);
    BlowupEstimate est;
    est.t_last = t.back();
    est.growth_exponent = gamma;
    est.tail_samples = tt.size();
    est.t_num = (b < 0.0) ? std::max(-a / b, est.t_last) : est.t_last;
    return est;
}

inline BlowupEstimate detect_blowup_time(const TrajectoryRecord& record) {
    const auto t = record.times();
    const auto L = record.lyapunov();
    return detect_blowup_time(t, L, record.termination);
}

// ---- identity checks -----------------------------------------------------------

struct IdentityOptions {
    bool drop_p_term = false;  // mutation hook: omit k P from the source rate
};

/// Residual of J(u(t0),t0) + int_0^{t0} (||u_t/|x|||^2 + ||grad u_t||^2 + k' int|u|^p/p + k P) ds - J(u0,0)
/// at every recorded t0 > 0, with backward difference quotients for u_t and the left-point rule
/// for the source rate.
inline std::vector<double> verify_energy_identity(const TrajectoryRecord& record, IdentityOptions options = {}) {
    std::vector<double> residuals;
    if (record.steps.size() < 2) return residuals;
    const double J0 = record.steps.front().snap.J;
    double accumulated = 0.0;
    for (std::size_t m = 1; m < record.steps.size(); ++m) {
        const auto& prev = record.steps[m - 1].snap;
        const auto& cur = record.steps[m];
        double rate = prev.k_prime * prev.power_over_p;
        if (!options.drop_p_term) rate += prev.k * prev.P_term;
        accumulated += cur.dissipation + cur.tau * rate;
        residuals.push_back(cur.snap.J + accumulated - J0);
    }
    return residuals;
}

/// |(L_{m+1} - L_{m-1}) / (t_{m+1} - t_{m-1}) + I_m| at interior records.
inline std::vector<double> verify_L_derivative(const TrajectoryRecord& record) {
    std::vector<double> residuals;
    const auto& s = record.steps;
    for (std::size_t m = 1; m + 1 < s.size(); ++m) {
        const double dLdt = (s[m + 1].snap.L - s[m - 1].snap.L) / (s[m + 1].snap.t - s[m - 1].snap.t);
        residuals.push_back(std::abs(dLdt + s[m].snap.I));
    }
    return residuals;
}

/// Largest relative per-step decrease (K_m - K_{m+1}) / (1 + |K_m|); <= 0 when K never decreases.
inline double worst_k_decrease(const TrajectoryRecord& record) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m + 1 < record.steps.size(); ++m) {
        const double Km = record.steps[m].snap.K;
        worst = std::max(worst, (Km - record.steps[m + 1].snap.K) / (1.0 + std::abs(Km)));
    }
    return record.steps.size() < 2 ? 0.0 : worst;
}

// ---- CSV export ----------------------------------------------------------------

inline constexpr const char* kTrajectoryHeader = "t,tau,J,I,E,L,K,M,P_term,energy_residual";

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& record) {
    const auto residuals = verify_energy_identity(record);
    out << kTrajectoryHeader << '\n';
    for (std::size_t m = 0; m < record.steps.size(); ++m) {
        const auto& st = record.steps[m];
        const auto& s = st.snap;
        const double res = m == 0 ? 0.0 : residuals[m - 1];
        for (double v : {s.t, st.tau, s.J, s.I, s.E, s.L, s.K, s.M, s.P_term}) out << format_double(v) << ',';
        out << format_double(res) << '\n';
    }
}

/// Reads a trajectory CSV written by write_trajectory_csv. Only the columns of the CSV are
/// restored; the termination reason must be supplied separately.
inline TrajectoryRecord read_trajectory_csv(std::istream& in, Termination termination) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("trajectory CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTrajectoryHeader) throw std::runtime_error("trajectory CSV header mismatch: '" + line + "'");
    TrajectoryRecord record;
    record.termination = termination;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                v.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw std::runtime_error("trajectory CSV line " + std::to_string(lineno) + ": bad number '" + cell + "'");
            }
        }
        if (v.size() != 10)
            throw std::runtime_error("trajectory CSV line " + std::to_string(lineno) + ": expected 10 columns");
        TrajectoryStep st;
        st.snap.t = v[0];
        st.tau = v[1];
        st.snap.J = v[2];
        st.snap.I = v[3];
        st.snap.E = v[4];
        st.snap.L = v[5];
        st.snap.K = v[6];
        st.snap.M = v[7];
        st.snap.P_term = v[8];
        record.steps.push_back(st);
    }
    return record;
}

}  // namespace ppbu
