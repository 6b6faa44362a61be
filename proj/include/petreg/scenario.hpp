#pragma once

// Scenario description: everything a closed-loop run needs, loadable from a
// JSON document (see scenarios/scenario.schema.json) or built in code.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "petreg/controller.hpp"
#include "petreg/exosystem.hpp"
#include "petreg/graph.hpp"
#include "petreg/internal_model.hpp"
#include "petreg/observer.hpp"
#include "petreg/plant.hpp"

#include "json.hpp"

namespace petreg {

/// Scenario-level misconfiguration (bad grids, missing keys, ...).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AgentConfig {
    SamplingGrid observer_grid;    // T^i
    SamplingGrid controller_grid;  // calligraphic T^i
    LorenzParams lorenz;           // resolved per-agent parameters
    std::optional<ColVec> z0;      // explicit initial conditions
    std::optional<ColVec> x0;
    std::optional<StrictFeedbackPlant> custom_plant;  // library-only injection
};

struct EngineConfig {
    Real t_end = 30.0;
    Real h_int = 1e-3;
    int log_decimation = 10;
    unsigned rng_seed = 1;
};

struct Scenario {
    std::string name = "scenario";

    Matrix exo_a;
    ColVec exo_nu0;
    ColVec exo_c0;  // linear output row

    CommGraph graph;

    ObserverParams observer;
    int observer_case = 1;       // 1: A known; 2: A estimated
    bool a_hat0_exact = false;   // case 2: start A_hat at the true A

    ControllerParams controller;
    bool petm_c_enabled = false;

    std::vector<Real> im_poly;    // ascending coefficients of the M polynomial
    std::vector<Real> psi_poly;   // ascending coefficients of the steady-state modes
    std::optional<ColVec> im_phi; // explicit Phi row (overrides psi_poly)

    std::string plant_model = "lorenz";
    Real init_range = 0.5;        // seeded uniform [-range, range] plant ICs

    std::vector<AgentConfig> agents;
    EngineConfig engine;

    [[nodiscard]] Index n_agents() const { return static_cast<Index>(agents.size()); }

    [[nodiscard]] Exosystem make_exosystem() const { return {exo_a, exo_nu0, exo_c0}; }

    [[nodiscard]] InternalModel make_internal_model() const {
        auto [m, n] = companion_from_poly(im_poly);
        if (im_phi) return {m, n, *im_phi};
        if (psi_poly.empty())
            throw ConfigError("internal_model: need either psi_poly or an explicit phi");
        auto [psi, psi_n] = companion_from_poly(psi_poly);
        (void)psi_n;
        return {m, n, psi};
    }

    [[nodiscard]] StrictFeedbackPlant make_plant(Index agent) const {
        const auto& cfg = agents[static_cast<std::size_t>(agent)];
        if (cfg.custom_plant) return *cfg.custom_plant;
        if (plant_model != "lorenz")
            throw ConfigError("plant model '" + plant_model +
                              "' is not loadable from configuration; inject a custom plant "
                              "through the library interface");
        return make_lorenz_plant(cfg.lorenz);
    }
};

/// The bundled benchmark: four Lorenz agents on a leader -> 1 -> 2 -> 3 -> 4
/// chain with the asynchronous grids 0.01/0.015/0.02/0.025 s.
inline Scenario default_lorenz4() {
    Scenario s;
    s.name = "lorenz4";
    s.exo_a = Matrix{{0, 1}, {-1, 0}};
    s.exo_nu0 = ColVec{1, 0};
    s.exo_c0 = ColVec{1, 0};
    s.graph = chain_graph(4);

    s.observer = ObserverParams{};  // mu = 2, iota = 0.01, gamma = 0.2
    s.observer_case = 1;

    s.controller.gamma_hgo = 40.0;
    s.controller.d = {5.0, 10.0};
    s.controller.b_hat = 1.0;
    s.controller.q = {2.0};
    s.controller.k = 30.0;
    s.controller.sat_level = 30.0;
    s.controller.iota_e = 0.1;
    s.controller.iota_omega = 0.0;

    s.im_poly = {10, 18, 15, 6};     // s^4 + 6s^3 + 15s^2 + 18s + 10
    s.psi_poly = {9, 0, 10, 0};      // (s^2 + 1)(s^2 + 9)

    const Real periods[4] = {0.01, 0.015, 0.02, 0.025};
    for (int i = 0; i < 4; ++i) {
        AgentConfig a;
        a.observer_grid.period = periods[i];
        a.controller_grid.period = periods[i];
        s.agents.push_back(std::move(a));
    }
    return s;
}

// ---------------------------------------------------------------------------
// JSON loading

namespace detail {

inline Matrix matrix_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw ConfigError(where + ": expected an array of rows");
    const Index rows = static_cast<Index>(j.size());
    const Index cols = static_cast<Index>(j[0].size());
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        if (static_cast<Index>(j[static_cast<std::size_t>(i)].size()) != cols)
            throw ConfigError(where + ": ragged rows");
        for (Index k = 0; k < cols; ++k)
            m(i, k) = j[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].get<Real>();
    }
    return m;
}

inline ColVec vec_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected an array");
    ColVec v(static_cast<Index>(j.size()));
    for (Index i = 0; i < v.dim(); ++i) v(i) = j[static_cast<std::size_t>(i)].get<Real>();
    return v;
}

inline std::vector<Real> reals_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected an array");
    std::vector<Real> v;
    v.reserve(j.size());
    for (const auto& x : j) v.push_back(x.get<Real>());
    return v;
}

inline const nlohmann::json& require(const nlohmann::json& j, const std::string& key,
                                     const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(where + ": missing required key '" + key + "'");
    return *it;
}

inline void apply_lorenz_overrides(LorenzParams& p, const nlohmann::json& j) {
    if (j.contains("g1")) p.g1 = j["g1"].get<Real>();
    if (j.contains("g2")) p.g2 = j["g2"].get<Real>();
    if (j.contains("g3")) p.g3 = j["g3"].get<Real>();
    if (j.contains("g4")) p.g4 = j["g4"].get<Real>();
    if (j.contains("g5")) p.g5 = j["g5"].get<Real>();
    if (j.contains("g6")) p.g6 = j["g6"].get<Real>();
    if (j.contains("g7")) p.g7 = j["g7"].get<Real>();
}

}  // namespace detail

inline Scenario scenario_from_json(const nlohmann::json& doc) {
    using detail::matrix_from_json;
    using detail::reals_from_json;
    using detail::require;
    using detail::vec_from_json;

    Scenario s;
    s.name = doc.value("name", "scenario");

    const auto& exo = require(doc, "exosystem", "scenario");
    s.exo_a = matrix_from_json(require(exo, "A", "exosystem"), "exosystem.A");
    s.exo_nu0 = vec_from_json(require(exo, "nu0", "exosystem"), "exosystem.nu0");
    s.exo_c0 = vec_from_json(require(exo, "q0", "exosystem"), "exosystem.q0");

    const auto& gr = require(doc, "graph", "scenario");
    Matrix adj = matrix_from_json(require(gr, "adjacency", "graph"), "graph.adjacency");
    ColVec pin = vec_from_json(require(gr, "pinning", "graph"), "graph.pinning");
    std::vector<int> pinning(static_cast<std::size_t>(pin.dim()));
    for (Index i = 0; i < pin.dim(); ++i) {
        if (pin(i) != 0.0 && pin(i) != 1.0)
            throw ConfigError("graph.pinning: entries must be 0 or 1");
        pinning[static_cast<std::size_t>(i)] = static_cast<int>(pin(i));
    }
    try {
        s.graph = CommGraph(adj.rows(), adj, pinning);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("graph: ") + e.what());
    }

    const auto& obs = require(doc, "observer", "scenario");
    s.observer_case = obs.value("case", 1);
    if (s.observer_case != 1 && s.observer_case != 2)
        throw ConfigError("observer.case must be 1 or 2");
    s.observer.mu1 = obs.value("mu1", s.observer.mu1);
    s.observer.mu2 = obs.value("mu2", s.observer.mu2);
    s.observer.iota_nu = obs.value("iota_nu", s.observer.iota_nu);
    s.observer.gamma_nu = obs.value("gamma_nu", s.observer.gamma_nu);
    s.observer.iota_a = obs.value("iota_A", s.observer.iota_a);
    s.observer.gamma_a = obs.value("gamma_A", s.observer.gamma_a);
    const std::string a0 = obs.value("a_hat0", "zero");
    if (a0 == "exact")
        s.a_hat0_exact = true;
    else if (a0 != "zero")
        throw ConfigError("observer.a_hat0 must be 'zero' or 'exact'");

    const auto& ctl = require(doc, "controller", "scenario");
    s.controller.gamma_hgo = ctl.value("gamma_hgo", s.controller.gamma_hgo);
    s.controller.d = reals_from_json(require(ctl, "d", "controller"), "controller.d");
    s.controller.b_hat = ctl.value("b_hat", s.controller.b_hat);
    s.controller.q = reals_from_json(require(ctl, "Q", "controller"), "controller.Q");
    s.controller.k = ctl.value("K", s.controller.k);
    s.controller.sat_level = ctl.value("sat_R", s.controller.sat_level);
    s.controller.iota_e = ctl.value("iota_e", s.controller.iota_e);
    s.controller.iota_omega = ctl.value("iota_omega", s.controller.iota_omega);
    if (ctl.contains("petm_c")) s.petm_c_enabled = ctl["petm_c"].value("enabled", false);

    const auto& im = require(doc, "internal_model", "scenario");
    s.im_poly = reals_from_json(require(im, "poly", "internal_model"), "internal_model.poly");
    if (im.contains("psi_poly"))
        s.psi_poly = reals_from_json(im["psi_poly"], "internal_model.psi_poly");
    if (im.contains("phi")) s.im_phi = vec_from_json(im["phi"], "internal_model.phi");

    LorenzParams base_lorenz;
    const auto& plant = require(doc, "plant", "scenario");
    s.plant_model = plant.value("model", "lorenz");
    if (plant.contains("g")) detail::apply_lorenz_overrides(base_lorenz, plant["g"]);
    s.init_range = plant.value("init_range", s.init_range);

    const auto& agents = require(doc, "agents", "scenario");
    if (!agents.is_array() || agents.empty())
        throw ConfigError("agents: expected a non-empty array");
    for (const auto& aj : agents) {
        AgentConfig a;
        a.lorenz = base_lorenz;
        a.observer_grid.period = require(aj, "observer_period", "agents[]").get<Real>();
        a.observer_grid.phase = aj.value("observer_phase", 0.0);
        a.controller_grid.period = require(aj, "controller_period", "agents[]").get<Real>();
        a.controller_grid.phase = aj.value("controller_phase", 0.0);
        if (aj.contains("g")) detail::apply_lorenz_overrides(a.lorenz, aj["g"]);
        if (aj.contains("z0")) a.z0 = vec_from_json(aj["z0"], "agents[].z0");
        if (aj.contains("x0")) a.x0 = vec_from_json(aj["x0"], "agents[].x0");
        s.agents.push_back(std::move(a));
    }
    if (s.n_agents() != s.graph.n_followers)
        throw ConfigError("agents: length must match the graph size");

    const auto& eng = require(doc, "engine", "scenario");
    s.engine.t_end = eng.value("t_end", s.engine.t_end);
    s.engine.h_int = eng.value("h_int", s.engine.h_int);
    s.engine.log_decimation = eng.value("log_decimation", s.engine.log_decimation);
    s.engine.rng_seed = eng.value("rng_seed", s.engine.rng_seed);
    return s;
}

/// Dotted-path override ("controller.iota_e=0.2", "agents.0.observer_period=0.01").
/// The path must already exist in the document; the value is parsed as JSON
/// when possible and kept as a string otherwise.
inline void apply_override(nlohmann::json& doc, const std::string& key,
                           const std::string& value) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : key) {
        if (c == '.') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);

    nlohmann::json* node = &doc;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const std::string& p = parts[i];
        if (node->is_array()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(p);
            } catch (...) {
                throw ConfigError("override '" + key + "': '" + p + "' is not an array index");
            }
            if (idx >= node->size())
                throw ConfigError("override '" + key + "': index " + p + " out of range");
            node = &(*node)[idx];
        } else if (node->is_object()) {
            if (!node->contains(p))
                throw ConfigError("override '" + key + "': no such key '" + p + "'");
            node = &(*node)[p];
        } else {
            throw ConfigError("override '" + key + "': path descends into a scalar");
        }
    }
    nlohmann::json parsed = nlohmann::json::parse(value, nullptr, false);
    *node = parsed.is_discarded() ? nlohmann::json(value) : parsed;
}

// ---------------------------------------------------------------------------
// Structural validation

struct ValidationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// How many integration steps long is this interval? Throws unless the
/// interval is an exact multiple of h (within 1e-9 absolute).
inline long steps_of(Real interval, Real h, const std::string& what) {
    const long k = std::lround(interval / h);
    if (k < 0 || std::abs(static_cast<Real>(k) * h - interval) > 1e-9)
        throw ConfigError(what + " (" + std::to_string(interval) +
                          ") is not an integer multiple of h_int");
    return k;
}

/// Every structural validator in one sweep. Used by `validate`; `run` enforces
/// the blocking subset (graph, grids, dimensions) and refuses on failure.
inline std::vector<ValidationCheck> validate_scenario(const Scenario& s) {
    std::vector<ValidationCheck> checks;
    auto add = [&checks](const std::string& name, bool ok, std::string detail = "") {
        checks.push_back({name, ok, std::move(detail)});
    };

    try {
        const Exosystem exo = s.make_exosystem();
        (void)exo;
        add("exosystem_skew_symmetric", true);
    } catch (const std::exception& e) {
        add("exosystem_skew_symmetric", false, e.what());
    }

    const auto missing = unreachable_followers(s.graph);
    if (missing.empty()) {
        add("leader_spanning_tree", true);
    } else {
        std::string who;
        for (Index i : missing) who += (who.empty() ? "" : ", ") + std::to_string(i + 1);
        add("leader_spanning_tree", false, "unreachable follower(s): " + who);
    }
    add("neg_h_hurwitz", is_hurwitz(h_matrix(s.graph) * -1.0));

    try {
        s.observer.validate();
        add("observer_params_positive", true);
    } catch (const std::exception& e) {
        add("observer_params_positive", false, e.what());
    }

    try {
        s.controller.validate();
        add("controller_d_hurwitz", true);
    } catch (const std::exception& e) {
        add("controller_d_hurwitz", false, e.what());
    }

    try {
        const InternalModel im = s.make_internal_model();
        (void)im;
        add("internal_model_hurwitz_controllable", true);
    } catch (const std::exception& e) {
        add("internal_model_hurwitz_controllable", false, e.what());
    }

    bool grids_ok = true;
    std::string grid_detail;
    try {
        if (!(s.engine.h_int > 0)) throw ConfigError("engine.h_int must be positive");
        if (!(s.engine.t_end > 0)) throw ConfigError("engine.t_end must be positive");
        if (s.engine.log_decimation < 1)
            throw ConfigError("engine.log_decimation must be >= 1");
        for (Index i = 0; i < s.n_agents(); ++i) {
            const auto& a = s.agents[static_cast<std::size_t>(i)];
            a.observer_grid.validate();
            a.controller_grid.validate();
            const std::string tag = "agent " + std::to_string(i + 1);
            if (steps_of(a.observer_grid.period, s.engine.h_int, tag + " observer period") < 1)
                throw ConfigError(tag + " observer period must be >= h_int");
            if (steps_of(a.controller_grid.period, s.engine.h_int, tag + " controller period") < 1)
                throw ConfigError(tag + " controller period must be >= h_int");
            steps_of(a.observer_grid.phase, s.engine.h_int, tag + " observer phase");
            steps_of(a.controller_grid.phase, s.engine.h_int, tag + " controller phase");
        }
    } catch (const std::exception& e) {
        grids_ok = false;
        grid_detail = e.what();
    }
    add("grids_divide_h_int", grids_ok, grid_detail);

    bool plant_ok = true;
    std::string plant_detail;
    for (Index i = 0; i < s.n_agents(); ++i) {
        try {
            const auto report = validate_plant(s.make_plant(i));
            for (const auto& probe : report.probes)
                if (!probe.passed) {
                    plant_ok = false;
                    plant_detail = "agent " + std::to_string(i + 1) + ": " + probe.name;
                }
        } catch (const std::exception& e) {
            plant_ok = false;
            plant_detail = e.what();
        }
    }
    add("plant_probes", plant_ok, plant_detail);

    return checks;
}

}  // namespace petreg
