/**
 * @file run_config.hpp
 * @brief Run configuration for the command-line tool: INI-style file
 *        (key = value, [sections]) plus flag overrides.
 *
 *     [problem]       preset, mesh, scheme, kr_mode
 *     [vgm]           theta_r, theta_s, alpha, n
 *     [unconfined]    phi, alpha_phi, alpha_theta
 *     [solver]        method, nit_pic, eps_rel, eps_abs, nit_max, eps_div,
 *                     line_search, ls_alpha, ls_gamma, ls_max_backtracks,
 *                     ls_enabled_after, nit_nls, omega_fixed,
 *                     linear_tol, linear_maxit
 *     [continuation]  kind, initial_step, decrease, increase, min_step, max_steps
 *     [sweep]         schemes, solvers, kinds (comma-separated), timing
 *     [output]        dir
 */

#pragma once

#include "richards/richards.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace richards::cli {

/// Unreadable or syntactically broken config file.
class ConfigParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Well-formed input with an unknown key or an out-of-range value.
class ConfigValueError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline const std::vector<std::string> presets = {"dam-unconfined", "dam-vgm", "layered-slab", "verify-linear"};

struct RunConfig {
    std::string preset = "dam-unconfined";
    /// empty: preset default
    std::string mesh;
    Scheme scheme = Scheme::TPFA;
    FaceKrMode kr_mode = FaceKrMode::Central;
    VgmParams vgm;
    UnconfinedParams unconfined;
    SolverConfig solver;
    ContinuationConfig continuation;
    std::vector<Scheme> sweep_schemes = {Scheme::TPFA, Scheme::MPFA_O};
    std::vector<SolverMethod> sweep_solvers = {SolverMethod::Newton, SolverMethod::Picard, SolverMethod::Mixed};
    std::vector<ContinuationKind> sweep_kinds = {ContinuationKind::Linear, ContinuationKind::Power};
    bool sweep_timing = true;
    std::string out_dir = "out";
};

inline Scheme parse_scheme(const std::string& s)
{
    if (s == "tpfa") return Scheme::TPFA;
    if (s == "mpfa" || s == "mpfa-o") return Scheme::MPFA_O;
    throw ConfigValueError("unsupported scheme '" + s + "' (supported: tpfa, mpfa)");
}

inline SolverMethod parse_solver(const std::string& s)
{
    if (s == "newton") return SolverMethod::Newton;
    if (s == "picard") return SolverMethod::Picard;
    if (s == "mixed") return SolverMethod::Mixed;
    throw ConfigValueError("unsupported solver '" + s + "' (supported: newton, picard, mixed)");
}

inline ContinuationKind parse_kind(const std::string& s)
{
    if (s == "linear") return ContinuationKind::Linear;
    if (s == "power") return ContinuationKind::Power;
    throw ConfigValueError("unsupported continuation '" + s + "' (supported: linear, power)");
}

inline FaceKrMode parse_kr_mode(const std::string& s)
{
    if (s == "central") return FaceKrMode::Central;
    if (s == "upwind") return FaceKrMode::Upwind;
    throw ConfigValueError("unsupported kr_mode '" + s + "' (supported: central, upwind)");
}

inline void check_preset(const std::string& s)
{
    for (const auto& p : presets)
        if (p == s) return;
    throw ConfigValueError("unknown preset '" + s +
                           "' (supported: dam-unconfined, dam-vgm, layered-slab, verify-linear)");
}

/// Comma-separated list; empty items are dropped, so "" is an empty list.
template <class Parse>
auto parse_list(const std::string& s, Parse parse)
{
    std::vector<decltype(parse(std::string{}))> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t next = std::min(s.find(',', pos), s.size());
        std::string item = s.substr(pos, next - pos);
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(parse(item));
        pos = next + 1;
    }
    return out;
}

namespace detail {

inline bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigValueError("key '" + key + "': expected a boolean, got '" + v + "'");
}

template <class T>
T number(const std::string& key, const std::string& v)
{
    std::size_t used = 0;
    try {
        if constexpr (std::is_same_v<T, std::size_t>) {
            if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
            const unsigned long long x = std::stoull(v, &used);
            if (used == v.size()) return static_cast<T>(x);
        } else {
            const double x = std::stod(v, &used);
            if (used == v.size()) return x;
        }
    } catch (const std::exception&) {
    }
    throw ConfigValueError("key '" + key + "': expected a number, got '" + v + "'");
}

} // namespace detail

inline void apply_key(RunConfig& c, const std::string& section, const std::string& key, const std::string& v)
{
    using detail::number;
    const std::string k = section + "." + key;
    SolverConfig& s = c.solver;
    ContinuationConfig& cc = c.continuation;

    if (k == "problem.preset") check_preset(v), c.preset = v;
    else if (k == "problem.mesh") c.mesh = v;
    else if (k == "problem.scheme") c.scheme = parse_scheme(v);
    else if (k == "problem.kr_mode") c.kr_mode = parse_kr_mode(v);
    else if (k == "vgm.theta_r") c.vgm.theta_r = number<double>(k, v);
    else if (k == "vgm.theta_s") c.vgm.theta_s = number<double>(k, v);
    else if (k == "vgm.alpha") c.vgm.alpha = number<double>(k, v);
    else if (k == "vgm.n") c.vgm.n = number<double>(k, v);
    else if (k == "unconfined.phi") c.unconfined.phi = number<double>(k, v);
    else if (k == "unconfined.alpha_phi") c.unconfined.alpha_phi = number<double>(k, v);
    else if (k == "unconfined.alpha_theta") c.unconfined.alpha_theta = number<double>(k, v);
    else if (k == "solver.method") s.method = parse_solver(v);
    else if (k == "solver.nit_pic") s.nit_pic = number<std::size_t>(k, v);
    else if (k == "solver.eps_rel") s.eps_rel = number<double>(k, v);
    else if (k == "solver.eps_abs") s.eps_abs = number<double>(k, v);
    else if (k == "solver.nit_max") s.nit_max = number<std::size_t>(k, v);
    else if (k == "solver.eps_div") s.eps_div = number<double>(k, v);
    else if (k == "solver.line_search") s.line_search.enabled = detail::parse_bool(k, v);
    else if (k == "solver.ls_alpha") s.line_search.alpha = number<double>(k, v);
    else if (k == "solver.ls_gamma") s.line_search.gamma = number<double>(k, v);
    else if (k == "solver.ls_max_backtracks") s.line_search.max_backtracks = number<std::size_t>(k, v);
    else if (k == "solver.ls_enabled_after") s.line_search.enabled_after = number<std::size_t>(k, v);
    else if (k == "solver.nit_nls") s.warmup.nit_nls = number<std::size_t>(k, v);
    else if (k == "solver.omega_fixed") s.warmup.omega_fixed = number<double>(k, v);
    else if (k == "solver.linear_tol") s.linear.tol = number<double>(k, v);
    else if (k == "solver.linear_maxit") s.linear.maxit = number<std::size_t>(k, v);
    else if (k == "continuation.kind") cc.kind = parse_kind(v);
    else if (k == "continuation.initial_step") cc.initial_step = number<double>(k, v);
    else if (k == "continuation.decrease") cc.decrease = number<double>(k, v);
    else if (k == "continuation.increase") cc.increase = number<double>(k, v);
    else if (k == "continuation.min_step") cc.min_step = number<double>(k, v);
    else if (k == "continuation.max_steps") cc.max_steps = number<std::size_t>(k, v);
    else if (k == "sweep.schemes") c.sweep_schemes = parse_list(v, parse_scheme);
    else if (k == "sweep.solvers") c.sweep_solvers = parse_list(v, parse_solver);
    else if (k == "sweep.kinds") c.sweep_kinds = parse_list(v, parse_kind);
    else if (k == "sweep.timing") c.sweep_timing = detail::parse_bool(k, v);
    else if (k == "output.dir") c.out_dir = v;
    else throw ConfigValueError("unknown configuration key '" + k + "'");
}

/// Reads `path` on top of `c`. Keys outside a section are rejected.
inline void load_config(RunConfig& c, const std::string& path)
{
    if (!std::filesystem::exists(path)) throw ConfigParseError("config file '" + path + "' does not exist");
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigParseError("cannot parse config file '" + path + "': " + e.message() + " (line " +
                               std::to_string(e.line()) + ")");
    }
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigValueError("key '" + section + "' in '" + path + "' is outside any section");
        for (const auto& [key, value] : body) apply_key(c, section, key, value.get_value<std::string>());
    }
}

/// Checks everything that can be checked before any compute.
inline void validate(const RunConfig& c)
{
    check_preset(c.preset);
    c.solver.validate();
    c.continuation.validate();
    c.vgm.validate();
    c.unconfined.validate();
}

inline std::string default_mesh(const std::string& preset)
{
    if (preset == "layered-slab") return "cartesian:50x20";
    return "cartesian:20x20";
}

/// Builds the problem for `c.preset` on `c.mesh` (or the preset default).
inline ProblemSpec build_problem(const RunConfig& c)
{
    const std::string choice = dam_mesh_choice(c.mesh.empty() ? default_mesh(c.preset) : c.mesh);
    ProblemSpec p;
    if (c.preset == "dam-unconfined" || c.preset == "dam-vgm") {
        auto mesh = std::make_shared<const Mesh2D>(make_mesh(choice, dam_size, dam_size));
        p = build_dam(c.preset == "dam-vgm" ? DamModel::Vgm : DamModel::Unconfined, mesh, c.vgm, c.unconfined);
    } else if (c.preset == "layered-slab") {
        auto mesh = std::make_shared<const Mesh2D>(make_mesh(choice, 100.0, 20.0));
        p = build_layered_slab(mesh, DamModel::Unconfined, c.vgm, c.unconfined);
    } else {
        auto mesh = std::make_shared<const Mesh2D>(make_mesh(choice, dam_size, dam_size));
        p = build_verification_linear(mesh, dam_conductivity(), 0.3, -0.2, 20.0);
    }
    p.kr_mode = c.kr_mode;
    return p;
}

} // namespace richards::cli
