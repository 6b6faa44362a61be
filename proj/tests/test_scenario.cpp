#include <catch2/catch_amalgamated.hpp>

#include "petreg/scenario.hpp"

#include <fstream>

using namespace petreg;
using nlohmann::json;

namespace {
json load_bundled() {
    std::ifstream in(std::string(PETREG_SCENARIO_DIR) + "/lorenz4.json");
    REQUIRE(in.good());
    return json::parse(in);
}
}  // namespace

TEST_CASE("bundled scenario matches the built-in default", "[scenario]") {
    const Scenario from_file = scenario_from_json(load_bundled());
    const Scenario built_in = default_lorenz4();

    CHECK(from_file.name == built_in.name);
    CHECK(from_file.exo_a(0, 1) == built_in.exo_a(0, 1));
    CHECK(from_file.graph.n_followers == built_in.graph.n_followers);
    CHECK(from_file.observer.mu2 == built_in.observer.mu2);
    CHECK(from_file.observer.iota_nu == built_in.observer.iota_nu);
    CHECK(from_file.observer.gamma_nu == built_in.observer.gamma_nu);
    CHECK(from_file.controller.k == built_in.controller.k);
    CHECK(from_file.controller.sat_level == built_in.controller.sat_level);
    CHECK(from_file.controller.iota_e == built_in.controller.iota_e);
    CHECK(from_file.im_poly == built_in.im_poly);
    CHECK(from_file.psi_poly == built_in.psi_poly);
    REQUIRE(from_file.n_agents() == built_in.n_agents());
    for (Index i = 0; i < 4; ++i) {
        CHECK(from_file.agents[static_cast<std::size_t>(i)].observer_grid.period ==
              built_in.agents[static_cast<std::size_t>(i)].observer_grid.period);
        CHECK(from_file.agents[static_cast<std::size_t>(i)].controller_grid.period ==
              built_in.agents[static_cast<std::size_t>(i)].controller_grid.period);
    }
    CHECK(from_file.engine.t_end == built_in.engine.t_end);
    CHECK(from_file.engine.h_int == built_in.engine.h_int);
    CHECK(from_file.engine.rng_seed == built_in.engine.rng_seed);
}

TEST_CASE("bundled scenario passes every validator", "[scenario]") {
    const Scenario s = scenario_from_json(load_bundled());
    for (const auto& check : validate_scenario(s)) {
        INFO(check.name << ": " << check.detail);
        CHECK(check.passed);
    }
}

TEST_CASE("missing keys are reported by name", "[scenario]") {
    json doc = load_bundled();
    doc.erase("graph");
    try {
        scenario_from_json(doc);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("graph") != std::string::npos);
    }
}

TEST_CASE("validators flag a non-skew leader matrix", "[scenario]") {
    json doc = load_bundled();
    doc["exosystem"]["A"] = {{0.0, 1.0}, {0.0, 0.0}};
    const Scenario s = scenario_from_json(doc);
    bool skew_failed = false;
    for (const auto& check : validate_scenario(s))
        if (check.name == "exosystem_skew_symmetric" && !check.passed) skew_failed = true;
    CHECK(skew_failed);
}

TEST_CASE("validators flag a non-Hurwitz d polynomial", "[scenario]") {
    json doc = load_bundled();
    doc["controller"]["d"] = {-1.0, 1.0};
    const Scenario s = scenario_from_json(doc);
    bool failed = false;
    for (const auto& check : validate_scenario(s))
        if (check.name == "controller_d_hurwitz" && !check.passed) failed = true;
    CHECK(failed);
}

TEST_CASE("validators name the unreachable follower", "[scenario]") {
    json doc = load_bundled();
    // cut the 2 -> 3 link: followers 3 and 4 become unreachable
    doc["graph"]["adjacency"][2] = {0, 0, 0, 0};
    const Scenario s = scenario_from_json(doc);
    for (const auto& check : validate_scenario(s))
        if (check.name == "leader_spanning_tree") {
            CHECK_FALSE(check.passed);
            CHECK(check.detail.find("3") != std::string::npos);
            CHECK(check.detail.find("4") != std::string::npos);
        }
}

TEST_CASE("validators flag grid periods that do not divide h_int", "[scenario]") {
    json doc = load_bundled();
    doc["agents"][1]["observer_period"] = 0.0157;
    const Scenario s = scenario_from_json(doc);
    bool failed = false;
    for (const auto& check : validate_scenario(s))
        if (check.name == "grids_divide_h_int" && !check.passed) failed = true;
    CHECK(failed);
}

TEST_CASE("override replaces an existing scalar", "[scenario]") {
    json doc = load_bundled();
    apply_override(doc, "controller.iota_e", "0.2");
    CHECK(doc["controller"]["iota_e"].get<double>() == 0.2);
    const Scenario s = scenario_from_json(doc);
    CHECK(s.controller.iota_e == 0.2);
}

TEST_CASE("override reaches into arrays", "[scenario]") {
    json doc = load_bundled();
    apply_override(doc, "agents.2.observer_period", "0.01");
    CHECK(doc["agents"][2]["observer_period"].get<double>() == 0.01);
}

TEST_CASE("override of a missing key is rejected", "[scenario]") {
    json doc = load_bundled();
    CHECK_THROWS_AS(apply_override(doc, "controller.iotae", "0.2"), ConfigError);
    CHECK_THROWS_AS(apply_override(doc, "agents.9.observer_period", "0.01"), ConfigError);
}

TEST_CASE("custom plant model names are rejected at build time", "[scenario]") {
    json doc = load_bundled();
    doc["plant"]["model"] = "custom";
    const Scenario s = scenario_from_json(doc);
    CHECK_THROWS_AS(s.make_plant(0), ConfigError);
}
