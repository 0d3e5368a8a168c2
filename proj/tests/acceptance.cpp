// Acceptance driver: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "closed_forms.hpp"
#include "ppbu/bounds.hpp"
#include "ppbu/harness/commands.hpp"
#include "ppbu/report.hpp"
#include "ppbu/varexp.hpp"

using namespace ppbu;
using namespace ppbu::harness;
namespace cf = closed_forms;
namespace fs = std::filesystem;

namespace {

const std::string config_dir = PPBU_CONFIG_DIR;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool passed = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            passed = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void criterion(int id, const char* name, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.passed = false;
        o.detail << " [exception: " << e.what() << "]";
    }
    if (!o.passed) ++failures;
    std::printf("%s %2d %s (%.2fs)%s\n", o.passed ? "PASS" : "FAIL", id, name, seconds_since(t0), o.detail.str().c_str());
    std::fflush(stdout);
}

Model cubic() { return {constant_exponent(3.0), constant_modulation(1.0)}; }

std::vector<double> scaled(std::vector<double> u, double a) {
    for (auto& x : u) x *= a;
    return u;
}

// parabolic-family blow-up runs shared by criteria 6-9
struct BlowupCase {
    double amplitude = 0.0;
    TrajectoryRecord record;
    BlowupReport report;
};

BlowupCase blowup_case(const std::string& file, double amplitude) {
    auto cfg = with_override(load_config(config_dir + "/" + file), "initial.amplitude", std::to_string(amplitude));
    const auto mesh = make_mesh(cfg);
    const auto model = make_model(cfg);
    const auto u0 = make_datum(cfg, mesh).values;
    BlowupCase c;
    c.amplitude = amplitude;
    c.record = run(mesh, model, u0, cfg.solver);
    ReportOptions ro;
    ro.search.seed = cfg.seed;
    c.report = make_report(mesh, model, u0, make_dictionary(cfg, mesh), ro, &c.record);
    return c;
}

std::vector<BlowupCase>& blowup_cases() {
    static std::vector<BlowupCase> cases = [] {
        std::vector<BlowupCase> v;
        for (double a : {24.0, 27.0, 30.0}) v.push_back(blowup_case("negative_energy.ini", a));
        v.push_back(blowup_case("positive_energy.ini", 22.0));
        return v;
    }();
    return cases;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main() {
    criterion(1, "Hardy ratio on random Dirichlet functions, n = 3, 4, 5", [](Outcome& o) {
        const auto t0 = Clock::now();
        for (int n : {3, 4, 5}) {
            const auto h = hardy_check(build_mesh(n, 2048), 1000, 0);
            o.detail << " n=" << n << ":" << h.worst_ratio << "/" << h.hardy_constant;
            o.require(h.worst_ratio <= 1.01 * h.hardy_constant, "ratio above 1.01 H_n");
        }
        o.require(seconds_since(t0) < 10.0, "runtime over 10 s");
    });

    criterion(2, "Nehari scaling: closed form and variable-exponent residual", [](Outcome& o) {
        const auto t0 = Clock::now();
        const auto mesh = build_mesh(3, 256);
        std::mt19937_64 rng(0);
        std::uniform_real_distribution<double> unit(-1.0, 1.0), logscale(-2.0, 2.0);
        std::vector<double> u(mesh.size());
        const auto random_state = [&] {
            const double amp = std::pow(10.0, logscale(rng));
            for (std::size_t i = 0; i < u.size(); ++i) {
                const double r = mesh.radii()[i];
                u[i] = amp * (0.5 * unit(rng) + (1.0 - r * r) * (1.0 + unit(rng)));
            }
        };
        const double ps[] = {2.5, 3.0, 3.5};
        double worst_const = 0.0, worst_var = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            random_state();
            const double p = ps[trial % 3];
            const double k = std::pow(10.0, 0.5 * logscale(rng));
            const double delta = std::pow(10.0, 0.5 * logscale(rng));
            const Model m{constant_exponent(p), constant_modulation(k)};
            const double power = source_integrals(mesh, m.exponent, u, 0.0).power;
            const double exact = std::pow(delta * grad_l2_sq(mesh, u) / (k * power), 1.0 / (p - 2.0));
            worst_const = std::max(worst_const, rel(nehari_scaling(mesh, m, u, 0.0, delta), exact));
        }
        const Model moving{separable_exponent(2.5, 0.3, 0.4), relaxing_modulation(1.0, 2.0)};
        for (int trial = 0; trial < 1000; ++trial) {
            random_state();
            const double t = 5.0 * (1.0 + unit(rng));
            const double delta = std::pow(10.0, 0.5 * logscale(rng));
            const double lambda = nehari_scaling(mesh, moving, u, t, delta);
            const double scale = delta * lambda * lambda * grad_l2_sq(mesh, u);
            worst_var = std::max(worst_var, std::abs(nehari_I(mesh, moving, scaled(u, lambda), t, delta)) / scale);
        }
        o.detail << " const rel err " << worst_const << ", variable residual " << worst_var;
        o.require(worst_const <= 1e-8, "constant-exponent mismatch");
        o.require(worst_var <= 1e-10, "variable-exponent residual");
        o.require(seconds_since(t0) < 10.0, "runtime over 10 s");
    });

    criterion(3, "Closed-form radial integrals at M = 4096", [](Outcome& o) {
        const auto mesh = build_mesh(3, 4096);
        const auto u = parabolic_datum(mesh, 1.0).values;
        const auto m = cubic();
        const auto u30 = parabolic_datum(mesh, 30.0).values;
        const auto u22 = parabolic_datum(mesh, 22.0).values;
        const auto b1 = upper_bound_negative_energy(mesh, m, u30);
        const auto b2 = upper_bound_positive_energy(mesh, m, u22);
        const std::vector<std::tuple<const char*, double, double>> checks{
            {"weighted", weighted_l2_sq(mesh, u), cf::weighted},
            {"gradient", grad_l2_sq(mesh, u), cf::gradient},
            {"cube", source_integrals(mesh, m.exponent, u, 0.0).power, cf::cube},
            {"hardy ratio", weighted_l2_sq(mesh, u) / grad_l2_sq(mesh, u), 2.0 / 3.0},
            {"J", energy_J(mesh, m, u, 0.0), cf::energy_J},
            {"I", nehari_I(mesh, m, u, 0.0), cf::nehari_I},
            {"L", lyapunov_L(mesh, u), cf::lyapunov_L},
            {"lambda0", nehari_scaling(mesh, m, u, 0.0), cf::nehari_lambda},
            {"well depth", well_depth_estimate(mesh, m, parabolic_dictionary(mesh), 0.0), cf::well_depth},
            {"sobolev ratio", sobolev_ratio(mesh, u, 3.0), cf::sobolev_ratio_q3},
            {"gn ratio", gn_ratio(mesh, u, 3.0, 0.5), cf::gn_ratio_q3},
            {"J(30)", energy_J(mesh, m, u30, 0.0), cf::energy_J_a30},
            {"E(30)", b1.energy_E0, cf::energy_J_a30 + cf::energy_offset},
            {"upper 1 (30)", b1.value, cf::upper_1_a30},
            {"E(22)", b2.energy_E0, cf::energy_E_a22},
            {"L(22)", b2.lyapunov_L0, cf::lyapunov_L_a22},
            {"upper 2 (22)", b2.value, cf::upper_2_a22},
        };
        double worst = 0.0;
        for (const auto& [name, got, want] : checks) {
            const double e = rel(got, want);
            worst = std::max(worst, e);
            o.require(e <= 1e-6, name);
        }
        o.detail << " " << checks.size() << " integrals, worst rel err " << worst;
    });

    // identity suites on the variable-exponent configuration (p_t > 0, k' > 0)
    const auto var_cfg = load_config(config_dir + "/variable_exponent.ini");
    const double var_tau = var_cfg.verify_tau.value_or(var_cfg.solver.tau0);
    const double var_t_end = var_cfg.verify_t_end.value_or(1.0);
    std::vector<RefinementRun> var_runs;
    const auto t_identity = Clock::now();
    for (double tau : {var_tau, 0.5 * var_tau}) var_runs.push_back(refinement_run(var_cfg, 1024, tau, var_t_end, {}));
    const double identity_seconds = seconds_since(t_identity);

    criterion(4, "Energy identity under time-step halving at M = 1024", [&](Outcome& o) {
        const auto& a = var_runs[0];
        const auto& b = var_runs[1];
        const double ratio = a.energy_residual / b.energy_residual;
        o.detail << " residuals " << a.energy_residual << " -> " << b.energy_residual << ", ratio " << ratio
                 << ", |J0| " << std::abs(b.J0) << ", runs took " << identity_seconds << "s";
        o.require(a.termination == "horizon" && b.termination == "horizon", "run did not stay below blow-up");
        o.require(ratio >= 1.7 && ratio <= 2.3, "refinement ratio outside [1.7, 2.3]");
        o.require(b.energy_residual <= 1e-3 * std::abs(b.J0), "finest residual above 1e-3 |J0|");
        o.require(identity_seconds < 60.0, "runtime over 60 s");
    });

    criterion(5, "dL/dt = -I central-difference residual", [&](Outcome& o) {
        const auto& a = var_runs[0];
        const auto& b = var_runs[1];
        o.detail << " residuals " << a.l_residual << " -> " << b.l_residual << " (max |I| " << b.max_abs_I << ")";
        for (const auto& r : var_runs) o.require(r.l_residual <= 1e-2 * r.max_abs_I, "residual above 1e-2 max|I|");
        o.require(b.l_residual < a.l_residual, "no improvement under refinement");
    });

    criterion(6, "K nondecreasing along every suite trajectory", [&](Outcome& o) {
        double worst = 0.0;
        for (const auto& r : var_runs) worst = std::max(worst, r.k_decrease);
        for (const auto& c : blowup_cases()) worst = std::max(worst, worst_k_decrease(c.record));
        o.detail << " worst relative decrease " << worst << " over " << var_runs.size() + blowup_cases().size()
                 << " trajectories";
        o.require(worst <= 1e-8, "K decreased");
    });

    criterion(7, "Negative-energy family: lower <= T_num <= 1.05 upper", [](Outcome& o) {
        for (const auto& c : blowup_cases()) {
            if (c.amplitude == 22.0) continue;
            const auto& rep = c.report;
            o.require(c.record.termination == Termination::blowup, "no blow-up detected");
            o.require(rep.upper_1.applicable && rep.t_num && rep.lower, "missing bound or T_num");
            if (!(rep.upper_1.applicable && rep.t_num && rep.lower)) continue;
            const double t_num = rep.t_num->t_num;
            o.detail << " A=" << c.amplitude << ": " << rep.lower->value << " <= " << t_num << " <= " << rep.upper_1.value;
            o.require(rep.lower->value <= t_num, "lower bound exceeds T_num");
            o.require(t_num <= 1.05 * rep.upper_1.value, "T_num exceeds 1.05 upper");
            if (c.amplitude == 30.0) o.require(rel(rep.upper_1.value, cf::upper_1_a30) <= 1e-4, "upper(30) off");
        }
    });

    criterion(8, "Positive-energy case A = 22: gate and T_num <= upper", [](Outcome& o) {
        const auto& c = blowup_cases().back();
        const auto& b = c.report.upper_2;
        o.detail << " C1 E0 = " << b.c1_E0 << ", L0 = " << b.lyapunov_L0;
        o.require(b.applicable && b.c1_E0 >= 0.0 && b.c1_E0 < b.lyapunov_L0, "gate does not hold");
        o.require(c.record.termination == Termination::blowup && c.report.t_num.has_value(), "no blow-up detected");
        if (!(b.applicable && c.report.t_num)) return;
        o.detail << ", T_num " << c.report.t_num->t_num << " <= " << b.value;
        o.require(c.report.t_num->t_num <= b.value, "T_num exceeds upper");
        o.require(rel(b.value, cf::upper_2_a22) <= 1e-4, "upper value off");
    });

    criterion(9, "Lower-bound machinery", [](Outcome& o) {
        const auto mesh = build_mesh(3, 512);
        const auto k = compute_constants(mesh, cubic(), standard_dictionary(mesh));
        const double tail = lower_bound_integral(2.0, 3.0, 3.0).value;
        o.detail << " alpha " << k.alpha_plus << ", gamma " << k.gamma_plus << ", tail " << tail;
        o.require(std::abs(k.alpha_plus - 0.5) <= 1e-12, "alpha");
        o.require(std::abs(k.gamma_plus - 3.0) <= 1e-12, "gamma");
        o.require(rel(tail, 0.0625) <= 1e-8, "tail integral");
        int checked = 0;
        for (const auto& c : blowup_cases()) {
            const auto& rec = c.record;
            const double t_num = detect_blowup_time(rec).t_num;
            const auto& lb0 = c.report.constants;
            for (double t0 : {0.0, 0.5 * rec.steps.back().snap.t, 0.9 * rec.steps.back().snap.t}) {
                const auto lb = lower_bound(rec, lb0, t0);
                o.require(lb.value > lb.t0, "lower bound not above t0");
                o.require(lb.value <= t_num, "lower bound above T_num");
                ++checked;
            }
        }
        o.detail << ", " << checked << " anchors checked";
    });

    criterion(10, "Concavity checker", [](Outcome& o) {
        std::vector<double> t, psi, ex;
        for (int i = 0; i <= 900; ++i) {
            t.push_back(i * 1e-3);
            psi.push_back(1.0 / (1.0 - t.back()));
            ex.push_back(std::exp(t.back()));
        }
        const auto a = concavity_check(t, psi, 1.0);
        const auto b = concavity_check(t, ex, 1.0);
        o.detail << " (1-t)^-1 bound " << a.bound << ", e^t holds=" << b.hypothesis_holds;
        o.require(a.hypothesis_holds, "(1-t)^-1 rejected");
        o.require(std::abs(a.bound - 1.0) <= 1e-8, "bound not 1");
        o.require(!b.hypothesis_holds, "e^t accepted");
    });

    criterion(11, "Luxemburg norm", [](Outcome& o) {
        const std::vector<double> w{0.5, 0.5}, u{2.0, 2.0}, s{2.0, 4.0};
        const double two = varexp::luxemburg_norm(w, u, s);
        o.require(std::abs(two - 2.0) <= 1e-10, "two-region value");
        const auto mesh = build_mesh(3, 256);
        std::mt19937_64 rng(0);
        std::uniform_real_distribution<double> d(-1.0, 1.0), e(1.1, 6.0), mag(-3.0, 3.0);
        double worst = 0.0;
        std::vector<double> v(mesh.size());
        for (int trial = 0; trial < 100; ++trial) {
            const double p = e(rng), amp = std::pow(10.0, mag(rng));
            for (auto& x : v) x = amp * d(rng);
            const std::vector<double> sp(mesh.size(), p);
            const double exact = std::pow(varexp::modular(mesh, v, sp), 1.0 / p);
            worst = std::max(worst, rel(varexp::luxemburg_norm(mesh, v, sp), exact));
        }
        o.detail << " two-region " << two << ", constant-exponent worst rel err " << worst;
        o.require(worst <= 1e-8, "constant-exponent reduction");
    });

    criterion(12, "Determinism of simulate + bounds", [](Outcome& o) {
        const auto dir = fs::temp_directory_path() / "ppbu_acceptance";
        fs::create_directories(dir);
        std::vector<std::string> csv, summary, report, stdout_text;
        for (const char* tag : {"a", "b"}) {
            CommandOptions opt;
            opt.config_path = config_dir + "/negative_energy.ini";
            opt.seed = 7;
            opt.out = (dir / (std::string(tag) + ".csv")).string();
            std::ostringstream out, err;
            o.require(cmd_simulate(opt, out, err) == 0, "simulate failed");
            stdout_text.push_back(out.str());
            csv.push_back(slurp(*opt.out));
            summary.push_back(slurp(summary_path(*opt.out)));
            CommandOptions b = opt;
            b.trajectory = opt.out;
            b.out = (dir / (std::string(tag) + ".json")).string();
            std::ostringstream bout, berr;
            o.require(cmd_bounds(b, bout, berr) == 0, "bounds failed");
            report.push_back(slurp(*b.out));
            stdout_text.push_back(bout.str());
        }
        o.detail << " csv " << csv[0].size() << " bytes, report " << report[0].size() << " bytes";
        o.require(!csv[0].empty() && csv[0] == csv[1], "CSV differs");
        o.require(summary[0] == summary[1], "summary differs");
        o.require(!report[0].empty() && report[0] == report[1], "report differs");
        o.require(stdout_text[0] == stdout_text[2] && stdout_text[1] == stdout_text[3], "stdout differs");
    });

    std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "OK", failures);
    return failures ? 1 : 0;
}
