#pragma once

// Experiment configuration: an INI file with named sections.
//
//   seed = 0
//   [mesh]       dimension, nodes, grading
//   [exponent]   model = constant | separable; value | a, b, c   (p = a + b r + c t/(1+t))
//   [modulation] model = constant | relaxing; value | k0, k_inf  (k = k_inf - (k_inf - k0) e^{-t})
//   [initial]    family = parabolic | gaussian | cosine; amplitude, width
//   [solver]     tau0, tau_min, growth_cap, blowup_factor, blowup_threshold, t_end
//   [bounds]     t0, dictionary = standard | parabolic, delta
//   [validation] t_samples, t_max, horizon, tolerance
//   [verify]     t_end, coarse_nodes, tau, hardy_trials
//   [sweep]      parameter = <section>.<key>, values = v1, v2, ...

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ppbu/model.hpp"
#include "ppbu/profiles.hpp"
#include "ppbu/radial_mesh.hpp"
#include "ppbu/solver.hpp"

namespace ppbu::harness {

namespace pt = boost::property_tree;

/// Malformed or inconsistent configuration text (exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::uint64_t seed = 0;

    int dimension = 3;
    std::size_t nodes = 512;
    double grading = 1.0;

    std::string exponent_model = "constant";
    double p_value = 3.0;
    double p_a = 3.0, p_b = 0.0, p_c = 0.0;

    std::string modulation_model = "constant";
    double k_value = 1.0;
    double k0 = 1.0, k_inf = 1.0;

    std::string initial_family = "parabolic";
    double amplitude = 1.0;
    double width = 0.3;

    SolverConfig solver;

    double t0 = 0.0;
    std::string dictionary = "standard";
    double delta = 1.0;

    std::size_t validation_samples = 21;
    double validation_t_max = 10.0;
    double validation_horizon = 50.0;
    double validation_tolerance = 1e-3;

    std::optional<double> verify_t_end;
    std::optional<std::size_t> verify_coarse_nodes;
    std::optional<double> verify_tau;
    int hardy_trials = 200;

    std::string sweep_parameter;
    std::vector<std::string> sweep_values;

    pt::ptree tree;  // source text, kept for sweep overrides
};

namespace detail {

inline const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s{
        {"mesh", {"dimension", "nodes", "grading"}},
        {"exponent", {"model", "value", "a", "b", "c"}},
        {"modulation", {"model", "value", "k0", "k_inf"}},
        {"initial", {"family", "amplitude", "width"}},
        {"solver", {"tau0", "tau_min", "growth_cap", "blowup_factor", "blowup_threshold", "t_end"}},
        {"bounds", {"t0", "dictionary", "delta"}},
        {"validation", {"t_samples", "t_max", "horizon", "tolerance"}},
        {"verify", {"t_end", "coarse_nodes", "tau", "hardy_trials"}},
        {"sweep", {"parameter", "values"}},
    };
    return s;
}

template <class T>
T get(const pt::ptree& tree, const std::string& path, T fallback) {
    const auto node = tree.get_child_optional(path);
    if (!node) return fallback;
    const std::string text = node->get_value<std::string>();
    std::istringstream in(text);
    T value{};
    in >> value;
    if (in.fail() || !(in >> std::ws).eof()) throw ConfigError("config: bad value '" + text + "' for " + path);
    return value;
}

template <>
inline std::string get<std::string>(const pt::ptree& tree, const std::string& path, std::string fallback) {
    const auto node = tree.get_child_optional(path);
    return node ? node->get_value<std::string>() : fallback;
}

template <class T>
std::optional<T> get_optional(const pt::ptree& tree, const std::string& path) {
    if (!tree.get_child_optional(path)) return std::nullopt;
    return get<T>(tree, path, T{});
}

inline std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

}  // namespace detail

/// Builds a config from a parsed tree, rejecting unknown sections and keys.
inline ExperimentConfig parse_config(const pt::ptree& tree) {
    using detail::get;
    const auto& schema = detail::schema();
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            if (section == "seed" || schema.contains(section)) continue;
            throw ConfigError("config: unknown top-level key '" + section + "'");
        }
        const auto it = schema.find(section);
        if (it == schema.end()) throw ConfigError("config: unknown section [" + section + "]");
        for (const auto& [key, value] : body)
            if (!it->second.contains(key)) throw ConfigError("config: unknown key '" + key + "' in [" + section + "]");
    }

    ExperimentConfig c;
    c.tree = tree;
    c.seed = get<std::uint64_t>(tree, "seed", c.seed);
    c.dimension = get<int>(tree, "mesh.dimension", c.dimension);
    c.nodes = get<std::size_t>(tree, "mesh.nodes", c.nodes);
    c.grading = get<double>(tree, "mesh.grading", c.grading);

    c.exponent_model = get<std::string>(tree, "exponent.model", c.exponent_model);
    c.p_value = get<double>(tree, "exponent.value", c.p_value);
    c.p_a = get<double>(tree, "exponent.a", c.p_a);
    c.p_b = get<double>(tree, "exponent.b", c.p_b);
    c.p_c = get<double>(tree, "exponent.c", c.p_c);
    if (c.exponent_model != "constant" && c.exponent_model != "separable")
        throw ConfigError("config: unknown exponent model '" + c.exponent_model + "'");

    c.modulation_model = get<std::string>(tree, "modulation.model", c.modulation_model);
    c.k_value = get<double>(tree, "modulation.value", c.k_value);
    c.k0 = get<double>(tree, "modulation.k0", c.k0);
    c.k_inf = get<double>(tree, "modulation.k_inf", c.k_inf);
    if (c.modulation_model != "constant" && c.modulation_model != "relaxing")
        throw ConfigError("config: unknown modulation model '" + c.modulation_model + "'");

    c.initial_family = get<std::string>(tree, "initial.family", c.initial_family);
    c.amplitude = get<double>(tree, "initial.amplitude", c.amplitude);
    c.width = get<double>(tree, "initial.width", c.width);
    if (c.initial_family != "parabolic" && c.initial_family != "gaussian" && c.initial_family != "cosine")
        throw ConfigError("config: unknown initial family '" + c.initial_family + "'");

    auto& s = c.solver;
    s.tau0 = get<double>(tree, "solver.tau0", s.tau0);
    s.tau_min = get<double>(tree, "solver.tau_min", s.tau_min);
    s.growth_cap = get<double>(tree, "solver.growth_cap", s.growth_cap);
    s.blowup_factor = get<double>(tree, "solver.blowup_factor", s.blowup_factor);
    s.blowup_threshold = detail::get_optional<double>(tree, "solver.blowup_threshold");
    s.t_end = get<double>(tree, "solver.t_end", s.t_end);

    c.t0 = get<double>(tree, "bounds.t0", c.t0);
    c.dictionary = get<std::string>(tree, "bounds.dictionary", c.dictionary);
    c.delta = get<double>(tree, "bounds.delta", c.delta);
    if (c.dictionary != "standard" && c.dictionary != "parabolic")
        throw ConfigError("config: unknown dictionary '" + c.dictionary + "'");

    c.validation_samples = get<std::size_t>(tree, "validation.t_samples", c.validation_samples);
    c.validation_t_max = get<double>(tree, "validation.t_max", c.validation_t_max);
    c.validation_horizon = get<double>(tree, "validation.horizon", c.validation_horizon);
    c.validation_tolerance = get<double>(tree, "validation.tolerance", c.validation_tolerance);

    c.verify_t_end = detail::get_optional<double>(tree, "verify.t_end");
    c.verify_coarse_nodes = detail::get_optional<std::size_t>(tree, "verify.coarse_nodes");
    c.verify_tau = detail::get_optional<double>(tree, "verify.tau");
    c.hardy_trials = get<int>(tree, "verify.hardy_trials", c.hardy_trials);

    c.sweep_parameter = get<std::string>(tree, "sweep.parameter", "");
    c.sweep_values = detail::split_list(get<std::string>(tree, "sweep.values", ""));
    return c;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return parse_config(tree);
}

inline ExperimentConfig load_config(const std::string& path) {
    pt::ptree tree;
    try {
        pt::read_ini(path, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return parse_config(tree);
}

/// Copy of `base` with one "<section>.<key>" entry replaced.
inline ExperimentConfig with_override(const ExperimentConfig& base, const std::string& path, const std::string& value) {
    const auto dot = path.find('.');
    if (dot == std::string::npos || !detail::schema().contains(path.substr(0, dot)))
        throw ConfigError("config: sweep parameter must be <section>.<key>, got '" + path + "'");
    pt::ptree tree = base.tree;
    tree.put(path, value);
    return parse_config(tree);
}

// ---- construction ----------------------------------------------------------------

inline RadialMesh make_mesh(const ExperimentConfig& c) { return build_mesh(c.dimension, c.nodes, c.grading); }

inline Model make_model(const ExperimentConfig& c) {
    Model m;
    m.exponent = c.exponent_model == "constant" ? constant_exponent(c.p_value) : separable_exponent(c.p_a, c.p_b, c.p_c);
    m.modulation = c.modulation_model == "constant" ? constant_modulation(c.k_value) : relaxing_modulation(c.k0, c.k_inf);
    return m;
}

inline InitialDatum make_datum(const ExperimentConfig& c, const RadialMesh& mesh) {
    if (c.initial_family == "gaussian") return gaussian_datum(mesh, c.amplitude, c.width);
    if (c.initial_family == "cosine") return cosine_datum(mesh, c.amplitude);
    return parabolic_datum(mesh, c.amplitude);
}

inline ProfileDictionary make_dictionary(const ExperimentConfig& c, const RadialMesh& mesh) {
    return c.dictionary == "parabolic" ? parabolic_dictionary(mesh) : standard_dictionary(mesh);
}

}  // namespace ppbu::harness
