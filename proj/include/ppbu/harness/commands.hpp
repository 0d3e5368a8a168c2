#pragma once

// Subcommands of the command-line front end. Each returns the process exit code:
// 0 success, 1 validation or run failure, 2 usage or configuration error.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ppbu/bounds.hpp"
#include "ppbu/functionals.hpp"
#include "ppbu/harness/config.hpp"
#include "ppbu/report.hpp"
#include "ppbu/solver.hpp"

namespace ppbu::harness {

using nlohmann::json;

struct CommandOptions {
    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::string> trajectory;
    std::optional<std::uint64_t> seed;
    bool drop_p_term = false;  // verify only: omit k P from the energy identity
};

inline std::string summary_path(const std::string& trajectory_path) { return trajectory_path + ".summary.json"; }

// ---- validation ------------------------------------------------------------------

struct ValidationOutcome {
    bool valid = true;
    json report;
    std::vector<std::string> lines;
};

namespace detail {
inline json violations_json(const ValidationReport& r) {
    json arr = json::array();
    for (const auto& v : r.violations) {
        json e{{"constraint", v.constraint}};
        for (auto [key, val] : {std::pair{"r", v.r}, std::pair{"t", v.t}, std::pair{"value", v.value}})
            e[key] = std::isfinite(val) ? json(val) : json();
        arr.push_back(std::move(e));
    }
    return arr;
}
}  // namespace detail

inline ValidationOutcome validate_config(const ExperimentConfig& cfg) {
    ValidationOutcome out;
    out.report["checks"] = json::array();
    out.report["warnings"] = json::array();
    auto record = [&](const ValidationReport& r) {
        out.report["checks"].push_back(
            {{"subject", r.subject}, {"passed", r.passed()}, {"violations", detail::violations_json(r)}});
        out.valid = out.valid && r.passed();
        if (r.passed()) out.lines.push_back(r.subject + ": ok");
        for (const auto& v : r.violations) out.lines.push_back(r.subject + ": FAIL " + v.constraint);
    };
    auto failure = [](const std::string& subject, const std::string& what) {
        ValidationReport r{subject, {}};
        r.add(what, std::nan(""), std::nan(""), std::nan(""));
        return r;
    };

    std::optional<RadialMesh> mesh;
    try {
        mesh.emplace(make_mesh(cfg));
        record({"mesh", {}});
    } catch (const std::exception& e) {
        record(failure("mesh", e.what()));
    }
    const Model model = make_model(cfg);
    std::vector<double> grid;
    try {
        grid = uniform_time_grid(cfg.validation_t_max, cfg.validation_samples);
        ppbu::detail::require_time_grid(grid);
    } catch (const std::exception& e) {
        record(failure("validation", e.what()));
        grid.clear();
    }
    if (mesh && !grid.empty()) record(validate_exponent(model.exponent, *mesh, grid));
    if (!grid.empty())
        record(validate_modulation(model.modulation, grid, cfg.validation_horizon, cfg.validation_tolerance));
    if (mesh) {
        try {
            validate_datum(*mesh, make_datum(cfg, *mesh));
            record({"initial:" + cfg.initial_family, {}});
        } catch (const std::exception& e) {
            record(failure("initial:" + cfg.initial_family, e.what()));
        }
    }
    try {
        cfg.solver.validate();
        record({"solver", {}});
    } catch (const std::exception& e) {
        record(failure("solver", e.what()));
    }
    if (mesh && model.exponent.p_minus > 2.0) {
        for (double q : {model.exponent.p_minus, model.exponent.p_plus}) {
            try {
                growth_exponent(gn_alpha(mesh->dimension(), q), q);
            } catch (const std::exception& e) {
                out.report["warnings"].push_back(std::string("lower bound unavailable: ") + e.what());
                out.lines.push_back(std::string("warning: lower bound unavailable: ") + e.what());
            }
        }
    }
    out.report["valid"] = out.valid;
    return out;
}

// ---- shared plumbing -------------------------------------------------------------------

namespace detail {

inline ExperimentConfig load(const CommandOptions& opt) {
    auto cfg = load_config(opt.config_path);
    if (opt.seed) cfg.seed = *opt.seed;
    return cfg;
}

inline ConstantSearchOptions search_options(const ExperimentConfig& cfg) {
    ConstantSearchOptions s;
    s.seed = cfg.seed;
    return s;
}

inline bool write_text(const std::string& path, const std::string& text, std::ostream& err) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        err << "error: cannot write " << path << '\n';
        return false;
    }
    f << text;
    return static_cast<bool>(f);
}

inline json summary_json(const TrajectoryRecord& rec) {
    json j{{"termination", to_string(rec.termination)},
           {"steps", rec.steps.size()},
           {"rejected_steps", rec.rejected_steps},
           {"t_final", rec.steps.back().snap.t},
           {"L_final", rec.steps.back().snap.L},
           {"blowup_threshold", rec.blowup_threshold},
           {"t_num", nullptr},
           {"t_num_bracket", nullptr},
           {"growth_exponent", nullptr}};
    if (rec.termination != Termination::horizon) {
        try {
            const auto est = detect_blowup_time(rec);
            j["t_num"] = est.t_num;
            j["t_num_bracket"] = json::array({est.t_last, est.t_num});
            j["growth_exponent"] = est.growth_exponent;
        } catch (const std::invalid_argument& e) {
            j["t_num_error"] = e.what();
        }
    }
    return j;
}

template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace detail

// ---- validate ----------------------------------------------------------------------

inline int cmd_validate(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto cfg = detail::load(opt);
        const auto v = validate_config(cfg);
        for (const auto& line : v.lines) err << line << '\n';
        out << v.report.dump(2) << '\n';
        if (opt.out && !detail::write_text(*opt.out, v.report.dump(2) + "\n", err)) return 1;
        return v.valid ? 0 : 1;
    });
}

// ---- simulate ------------------------------------------------------------------------

inline int cmd_simulate(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    if (!opt.out) {
        err << "error: simulate requires --out <path>\n";
        return 2;
    }
    return detail::guarded(err, [&] {
        const auto cfg = detail::load(opt);
        const auto v = validate_config(cfg);
        if (!v.valid) {
            for (const auto& line : v.lines) err << line << '\n';
            return 1;
        }
        const auto mesh = make_mesh(cfg);
        const auto model = make_model(cfg);
        const auto u0 = make_datum(cfg, mesh);
        const auto rec = run(mesh, model, u0.values, cfg.solver);

        std::ostringstream csv;
        write_trajectory_csv(csv, rec);
        const auto summary = detail::summary_json(rec).dump(2) + "\n";
        if (!detail::write_text(*opt.out, csv.str(), err)) return 1;
        if (!detail::write_text(summary_path(*opt.out), summary, err)) return 1;
        out << summary;
        return 0;
    });
}

// ---- bounds ------------------------------------------------------------------------

inline TrajectoryRecord load_trajectory(const std::string& path, const ExperimentConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read trajectory " + path);
    // termination comes from the simulate summary; without it, stopping before t_end means blow-up
    std::optional<Termination> termination;
    if (std::ifstream s(summary_path(path)); s) {
        try {
            termination = termination_from_string(json::parse(s).at("termination").get<std::string>());
        } catch (const std::exception& e) {
            throw ConfigError("bad trajectory summary " + summary_path(path) + ": " + e.what());
        }
    }
    auto rec = read_trajectory_csv(in, termination.value_or(Termination::horizon));
    if (rec.empty()) throw ConfigError("trajectory " + path + " has no rows");
    if (!termination) {
        const double t_final = rec.steps.back().snap.t;
        rec.termination = t_final < cfg.solver.t_end * (1.0 - 1e-9) ? Termination::blowup : Termination::horizon;
    }
    return rec;
}

inline int cmd_bounds(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto cfg = detail::load(opt);
        const auto v = validate_config(cfg);
        if (!v.valid) {
            for (const auto& line : v.lines) err << line << '\n';
            return 1;
        }
        std::optional<TrajectoryRecord> rec;
        if (opt.trajectory) rec = load_trajectory(*opt.trajectory, cfg);

        const auto mesh = make_mesh(cfg);
        const auto model = make_model(cfg);
        const auto u0 = make_datum(cfg, mesh);
        const auto dict = make_dictionary(cfg, mesh);
        ReportOptions ro;
        ro.t0 = cfg.t0;
        ro.search = detail::search_options(cfg);
        const auto report = make_report(mesh, model, u0.values, dict, ro, rec ? &*rec : nullptr);
        const auto text = to_json(report).dump(2) + "\n";
        out << text;
        if (opt.out && !detail::write_text(*opt.out, text, err)) return 1;
        if (!report.any_upper_applicable()) {
            err << "no upper bound applies: " << report.upper_1.reason << "; " << report.upper_2.reason << '\n';
            return 1;
        }
        return 0;
    });
}

// ---- verify ------------------------------------------------------------------------

struct RefinementRun {
    std::size_t nodes = 0;
    double tau = 0.0;
    double J0 = 0.0;
    double energy_residual = 0.0;  // max |residual|
    double l_residual = 0.0;       // max central-difference residual of dL/dt + I
    double max_abs_I = 0.0;
    double k_decrease = 0.0;       // worst relative per-step decrease of K
    std::string termination;
};

inline RefinementRun refinement_run(const ExperimentConfig& cfg, std::size_t nodes, double tau, double t_end,
                                    IdentityOptions identity) {
    const auto mesh = build_mesh(cfg.dimension, nodes, cfg.grading);
    const auto model = make_model(cfg);
    const auto u0 = make_datum(cfg, mesh);
    SolverConfig sc = cfg.solver;
    sc.tau0 = tau;
    sc.tau_min = std::min(sc.tau_min, 0.5 * tau);
    sc.growth_cap = std::numeric_limits<double>::max();
    sc.t_end = t_end;
    const auto rec = run(mesh, model, u0.values, sc);

    RefinementRun r;
    r.nodes = nodes;
    r.tau = tau;
    r.J0 = rec.steps.front().snap.J;
    r.termination = to_string(rec.termination);
    for (double x : verify_energy_identity(rec, identity)) r.energy_residual = std::max(r.energy_residual, std::abs(x));
    for (double x : verify_L_derivative(rec)) r.l_residual = std::max(r.l_residual, x);
    for (const auto& s : rec.steps) r.max_abs_I = std::max(r.max_abs_I, std::abs(s.snap.I));
    r.k_decrease = worst_k_decrease(rec);
    return r;
}

struct VerifyOutcome {
    bool passed = true;
    json report;
};

inline VerifyOutcome verify_suites(const ExperimentConfig& cfg, bool drop_p_term) {
    const std::size_t fine = cfg.nodes;
    const std::size_t coarse = cfg.verify_coarse_nodes.value_or(cfg.nodes / 2);
    const double tau = cfg.verify_tau.value_or(cfg.solver.tau0);
    const double t_end = cfg.verify_t_end.value_or(std::min(cfg.solver.t_end, 1.0));
    const IdentityOptions identity{drop_p_term};

    VerifyOutcome out;
    json suites = json::array();
    auto add = [&](const std::string& name, bool ok, json detail) {
        out.passed = out.passed && ok;
        suites.push_back({{"suite", name}, {"passed", ok}, {"detail", std::move(detail)}});
    };

    std::vector<std::pair<RefinementRun, RefinementRun>> pairs;
    for (std::size_t nodes : {coarse, fine})
        pairs.emplace_back(refinement_run(cfg, nodes, tau, t_end, identity),
                           refinement_run(cfg, nodes, 0.5 * tau, t_end, identity));

    bool blown = false;
    for (const auto& [a, b] : pairs) blown = blown || a.termination != "horizon" || b.termination != "horizon";
    if (blown) add("sub-blow-up horizon", false, {{"message", "a verification run did not reach t_end"}});

    {
        bool ok = true;
        json d = json::array();
        for (const auto& [a, b] : pairs) {
            const double ratio = a.energy_residual / b.energy_residual;
            const bool ratio_ok = ratio >= 1.7 && ratio <= 2.3;
            const bool size_ok = b.energy_residual <= 1e-3 * std::abs(b.J0);
            ok = ok && ratio_ok && (b.nodes != fine || size_ok);
            d.push_back({{"nodes", a.nodes},
                         {"residual_tau", a.energy_residual},
                         {"residual_tau_half", b.energy_residual},
                         {"ratio", ratio},
                         {"relative_to_J0", b.energy_residual / std::abs(b.J0)}});
        }
        add("energy identity", ok, d);
    }
    {
        bool ok = true;
        json d = json::array();
        for (const auto& [a, b] : pairs) {
            const bool bounded = a.l_residual <= 1e-2 * a.max_abs_I && b.l_residual <= 1e-2 * b.max_abs_I;
            const bool improving = b.l_residual < a.l_residual;
            ok = ok && bounded && improving;
            d.push_back({{"nodes", a.nodes},
                         {"residual_tau", a.l_residual},
                         {"residual_tau_half", b.l_residual},
                         {"max_abs_I", std::max(a.max_abs_I, b.max_abs_I)}});
        }
        add("dL/dt = -I", ok, d);
    }
    {
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& [a, b] : pairs) worst = std::max({worst, a.k_decrease, b.k_decrease});
        add("K monotone", worst <= 1e-8, {{"worst_relative_decrease", worst}});
    }
    {
        bool ok = true;
        json d = json::array();
        for (std::size_t nodes : {coarse, fine}) {
            const auto mesh = build_mesh(cfg.dimension, nodes, cfg.grading);
            const auto h = hardy_check(mesh, cfg.hardy_trials, cfg.seed);
            ok = ok && h.worst_ratio <= 1.01 * h.hardy_constant;
            d.push_back({{"nodes", nodes}, {"worst_ratio", h.worst_ratio}, {"h_n", h.hardy_constant}});
        }
        add("Hardy", ok, d);
    }
    out.report = {{"passed", out.passed},
                  {"tau", tau},
                  {"t_end", t_end},
                  {"drop_p_term", drop_p_term},
                  {"suites", std::move(suites)}};
    return out;
}

inline int cmd_verify(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto cfg = detail::load(opt);
        const auto v = validate_config(cfg);
        if (!v.valid) {
            for (const auto& line : v.lines) err << line << '\n';
            return 1;
        }
        const auto res = verify_suites(cfg, opt.drop_p_term);
        for (const auto& s : res.report["suites"])
            err << (s["passed"].get<bool>() ? "PASS " : "FAIL ") << s["suite"].get<std::string>() << '\n';
        const auto text = res.report.dump(2) + "\n";
        out << text;
        if (opt.out && !detail::write_text(*opt.out, text, err)) return 1;
        return res.passed ? 0 : 1;
    });
}

// ---- sweep ---------------------------------------------------------------------------

inline constexpr const char* kSweepHeader =
    "parameter,value,status,termination,t_num,t_upper_1,t_upper_2,t_lower,message";

struct SweepRow {
    std::string parameter, value;
    std::string status;  // ok | flagged | failed
    std::string termination;
    std::optional<double> t_num, t_upper_1, t_upper_2, t_lower;
    std::string message;
};

inline SweepRow sweep_point(const ExperimentConfig& base, const std::string& parameter, const std::string& value) {
    SweepRow row{parameter, value, "failed", "", {}, {}, {}, {}, ""};
    try {
        const auto cfg = with_override(base, parameter, value);
        const auto v = validate_config(cfg);
        if (!v.valid) {
            row.message = "invalid configuration";
            for (const auto& line : v.lines)
                if (line.find("FAIL") != std::string::npos) row.message += "; " + line;
            return row;
        }
        const auto mesh = make_mesh(cfg);
        const auto model = make_model(cfg);
        const auto u0 = make_datum(cfg, mesh);
        const auto rec = run(mesh, model, u0.values, cfg.solver);
        ReportOptions ro;
        ro.t0 = cfg.t0;
        ro.search = detail::search_options(cfg);
        const auto rep = make_report(mesh, model, u0.values, make_dictionary(cfg, mesh), ro, &rec);
        row.termination = to_string(rec.termination);
        if (rep.t_num) row.t_num = rep.t_num->t_num;
        if (rep.upper_1.applicable) row.t_upper_1 = rep.upper_1.value;
        if (rep.upper_2.applicable) row.t_upper_2 = rep.upper_2.value;
        if (rep.lower) row.t_lower = rep.lower->value;
        if (rec.termination == Termination::step_underflow) {
            row.status = "flagged";
            row.message = "time step underflow after " + std::to_string(rec.rejected_steps) + " rejected steps";
        } else {
            row.status = "ok";
        }
    } catch (const std::exception& e) {
        row.status = "failed";
        row.message = e.what();
    }
    return row;
}

inline std::string format_sweep_row(const SweepRow& r) {
    auto num = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    std::string msg = r.message;
    std::replace(msg.begin(), msg.end(), '"', '\'');
    return r.parameter + ',' + r.value + ',' + r.status + ',' + r.termination + ',' + num(r.t_num) + ',' +
           num(r.t_upper_1) + ',' + num(r.t_upper_2) + ',' + num(r.t_lower) + ",\"" + msg + '"';
}

/// Runs every sweep point, concurrently in batches, and returns rows in input order.
inline std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
    const std::size_t batch = std::max(1u, std::thread::hardware_concurrency());
    std::vector<SweepRow> rows;
    for (std::size_t start = 0; start < cfg.sweep_values.size(); start += batch) {
        std::vector<std::future<SweepRow>> jobs;
        const std::size_t stop = std::min(cfg.sweep_values.size(), start + batch);
        for (std::size_t i = start; i < stop; ++i)
            jobs.push_back(std::async(std::launch::async, sweep_point, std::cref(cfg), std::cref(cfg.sweep_parameter),
                                      std::cref(cfg.sweep_values[i])));
        for (auto& j : jobs) rows.push_back(j.get());
    }
    return rows;
}

inline int cmd_sweep(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto cfg = detail::load(opt);
        if (cfg.sweep_parameter.empty()) throw ConfigError("sweep requires [sweep] parameter");
        if (cfg.sweep_values.empty()) throw ConfigError("sweep requires a nonempty [sweep] values list");
        with_override(cfg, cfg.sweep_parameter, cfg.sweep_values.front());

        const auto rows = run_sweep(cfg);
        std::string text = std::string(kSweepHeader) + "\n";
        for (const auto& r : rows) text += format_sweep_row(r) + "\n";
        if (opt.out) {
            if (!detail::write_text(*opt.out, text, err)) return 1;
        } else {
            out << text;
        }
        const bool all_bad = std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.status != "ok"; });
        for (const auto& r : rows)
            if (r.status != "ok") err << r.parameter << '=' << r.value << ": " << r.status << ' ' << r.message << '\n';
        return all_bad ? 1 : 0;
    });
}

// ---- constants ---------------------------------------------------------------------

inline int cmd_constants(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const auto cfg = detail::load(opt);
        const auto v = validate_config(cfg);
        if (!v.valid) {
            for (const auto& line : v.lines) err << line << '\n';
            return 1;
        }
        const auto mesh = make_mesh(cfg);
        const auto model = make_model(cfg);
        const auto dict = make_dictionary(cfg, mesh);
        const auto search = detail::search_options(cfg);
        const double pm = model.exponent.p_minus, pp = model.exponent.p_plus;
        const auto grid = uniform_time_grid(cfg.validation_t_max, cfg.validation_samples);

        json j;
        j["h_n"] = hardy_constant(cfg.dimension);
        j["c1"] = c1_constant(cfg.dimension, pm);
        j["s_minus"] = sobolev_constant_estimate(mesh, pm, dict, search).value;
        j["s_plus"] = sobolev_constant_estimate(mesh, pp, dict, search).value;
        const auto hardy = hardy_check(mesh, cfg.hardy_trials, cfg.seed);
        j["hardy_worst_ratio"] = hardy.worst_ratio;
        j["hardy_trials"] = hardy.trials;
        j["well_depth_star"] = well_depth_star(mesh, model, dict, grid, cfg.delta);
        j["log_holder"] = log_holder_constant(model.exponent, mesh, grid);
        int code = 0;
        try {
            const auto c = compute_constants(mesh, model, dict, search);
            j["alpha_plus"] = c.alpha_plus;
            j["alpha_minus"] = c.alpha_minus;
            j["gamma_plus"] = c.gamma_plus;
            j["gamma_minus"] = c.gamma_minus;
            j["n_plus"] = c.n_plus;
            j["n_minus"] = c.n_minus;
            j["c_star"] = c.c_star;
        } catch (const std::domain_error& e) {
            j["lower_bound_error"] = e.what();
            err << "error: " << e.what() << '\n';
            code = 1;
        }
        const auto text = j.dump(2) + "\n";
        out << text;
        if (opt.out && !detail::write_text(*opt.out, text, err)) return 1;
        return code;
    });
}

}  // namespace ppbu::harness
