#pragma once

// BlowupReport: numerical blow-up time, the three bounds and their verdicts, as JSON.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppbu/bounds.hpp"
#include "ppbu/solver.hpp"

namespace ppbu {

inline constexpr double kUpperBoundSlack = 1.05;

struct Verdict {
    std::string bound;   // "t_upper_1", "t_upper_2", "t_lower"
    std::string status;  // satisfied | violated | not-applicable | unchecked | error
    std::string reason;
    nlohmann::json evidence = nlohmann::json::object();
};

struct BlowupReport {
    std::optional<BlowupEstimate> t_num;
    std::string termination;  // empty when no trajectory was supplied
    BoundResult upper_1;
    BoundResult upper_2;
    std::optional<LowerBoundResult> lower;
    std::string lower_error;
    BoundConstants constants;
    std::vector<Verdict> verdicts;
    std::vector<std::string> assumptions;

    [[nodiscard]] bool any_upper_applicable() const { return upper_1.applicable || upper_2.applicable; }
};

struct ReportOptions {
    double t0 = 0.0;
    ConstantSearchOptions search;
};

namespace detail {
inline nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

inline nlohmann::json bound_evidence(const BoundResult& b) {
    return {{"E0", b.energy_E0}, {"J0", b.energy_J0}, {"L0", b.lyapunov_L0}, {"C1_E0", b.c1_E0}};
}

inline Verdict upper_verdict(const std::string& name, const BoundResult& b, const std::optional<BlowupEstimate>& est,
                             const std::string& termination) {
    Verdict v{name, "", b.reason, bound_evidence(b)};
    if (!b.applicable) {
        v.status = "not-applicable";
    } else if (!est) {
        v.status = "unchecked";
        v.reason = termination.empty() ? "no trajectory supplied" : "no blow-up detected (" + termination + ")";
    } else {
        // the earliest time compatible with the data is the lower end of the bracket
        const bool ok = est->t_last <= kUpperBoundSlack * b.value;
        v.status = ok ? "satisfied" : "violated";
        v.reason = "T_num bracket low end " + format_double(est->t_last) + (ok ? " ≤ " : " > ") + "1.05 × bound";
    }
    return v;
}
}  // namespace detail

/// Evaluates every bound for u0; `record` (may be null) supplies T_num and L(t0).
inline BlowupReport make_report(const RadialMesh& mesh, const Model& model, std::span<const double> u0,
                                const ProfileDictionary& dictionary, const ReportOptions& options,
                                const TrajectoryRecord* record) {
    BlowupReport rep;
    rep.assumptions = {"C2 = 0 in the positive-energy bound (denominator M(0) = L(0) - C1 E(u0,0))",
                       "m- = 2 in the lower-bound exponents gamma±",
                       "alpha+ uses q = p+, alpha- uses q = p-",
                       "Gagliardo–Nirenberg constants are empirical maxima inflated x" +
                           format_double(options.search.inflation)};

    if (record) {
        rep.termination = to_string(record->termination);
        if (record->termination != Termination::horizon) {
            try {
                rep.t_num = detect_blowup_time(*record);
            } catch (const std::invalid_argument&) {
                rep.t_num.reset();
            }
        }
    }
    rep.upper_1 = upper_bound_negative_energy(mesh, model, u0);
    rep.upper_2 = upper_bound_positive_energy(mesh, model, u0);

    const int n = mesh.dimension();
    const double nan = std::nan("");
    rep.constants = {hardy_constant(n), c1_constant(n, model.exponent.p_minus), nan, nan, nan, nan, nan, nan, nan,
                     kBallDiameter};
    try {
        rep.constants = compute_constants(mesh, model, dictionary, options.search);
        if (record && !record->empty()) {
            rep.lower = lower_bound(*record, rep.constants, options.t0);
        } else {
            if (options.t0 != 0.0) throw std::invalid_argument("t0 > 0 requires a trajectory");
            rep.lower = lower_bound(0.0, lyapunov_L(mesh, u0), rep.constants);
        }
    } catch (const std::exception& e) {
        rep.lower_error = e.what();
    }

    rep.verdicts.push_back(detail::upper_verdict("t_upper_1", rep.upper_1, rep.t_num, rep.termination));
    rep.verdicts.push_back(detail::upper_verdict("t_upper_2", rep.upper_2, rep.t_num, rep.termination));

    Verdict low{"t_lower", "", "", nlohmann::json::object()};
    if (!rep.lower) {
        low.status = "error";
        low.reason = rep.lower_error;
    } else {
        low.evidence = {{"t0", rep.lower->t0},
                        {"L_t0", rep.lower->L_t0},
                        {"integral", rep.lower->integral.value},
                        {"integral_upper_limit", rep.lower->integral.upper}};
        if (!rep.t_num) {
            low.status = "unchecked";
            low.reason = rep.termination.empty() ? "no trajectory supplied"
                                                 : "no blow-up detected (" + rep.termination + ")";
        } else {
            const bool ok = rep.lower->value <= rep.t_num->t_num && rep.lower->value > rep.lower->t0;
            low.status = ok ? "satisfied" : "violated";
            low.reason = "lower bound " + format_double(rep.lower->value) + (ok ? " ≤ " : " > ") + "T_num " +
                         format_double(rep.t_num->t_num);
        }
    }
    rep.verdicts.push_back(std::move(low));
    return rep;
}

inline nlohmann::json to_json(const BlowupReport& rep) {
    using nlohmann::json;
    json j;
    if (rep.t_num) {
        j["t_num"] = rep.t_num->t_num;
        j["t_num_bracket"] = json::array({rep.t_num->t_last, rep.t_num->t_num});
    } else {
        j["t_num"] = nullptr;
        j["t_num_bracket"] = nullptr;
    }
    j["t_upper_1"] = rep.upper_1.applicable ? json(rep.upper_1.value) : json("not-applicable");
    j["t_upper_2"] = rep.upper_2.applicable ? json(rep.upper_2.value) : json("not-applicable");
    j["t_lower"] = rep.lower ? json(rep.lower->value) : json("not-applicable");
    const auto& c = rep.constants;
    j["constants"] = {{"h_n", detail::number_or_null(c.h_n)},
                      {"c1", detail::number_or_null(c.c1)},
                      {"alpha_plus", detail::number_or_null(c.alpha_plus)},
                      {"alpha_minus", detail::number_or_null(c.alpha_minus)},
                      {"gamma_plus", detail::number_or_null(c.gamma_plus)},
                      {"gamma_minus", detail::number_or_null(c.gamma_minus)},
                      {"n_plus", detail::number_or_null(c.n_plus)},
                      {"n_minus", detail::number_or_null(c.n_minus)},
                      {"c_star", detail::number_or_null(c.c_star)}};
    j["verdicts"] = json::array();
    for (const auto& v : rep.verdicts)
        j["verdicts"].push_back({{"bound", v.bound}, {"status", v.status}, {"reason", v.reason}, {"evidence", v.evidence}});
    if (!rep.termination.empty()) j["termination"] = rep.termination;
    j["assumptions"] = rep.assumptions;
    return j;
}

}  // namespace ppbu
