#include <catch2/catch_amalgamated.hpp>

#include "petreg/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace petreg;
namespace fs = std::filesystem;

namespace {

const std::string kScenario = std::string(PETREG_SCENARIO_DIR) + "/lorenz4.json";

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("petreg_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunManifest short_manifest(const TempDir& dir, const std::string& sub) {
    RunManifest m;
    m.scenario_path = kScenario;
    m.out_dir = (dir.path / sub).string();
    m.overrides = {{"engine.t_end", "2.0"}};
    return m;
}

}  // namespace

TEST_CASE("cmd_run writes the three log files plus the effective config", "[runner]") {
    TempDir dir;
    RunManifest m = short_manifest(dir, "run1");
    std::ostringstream out, err;
    REQUIRE(cmd_run(m, out, err) == exit_code::ok);
    CHECK(fs::exists(dir.path / "run1" / "timeseries.csv"));
    CHECK(fs::exists(dir.path / "run1" / "events.csv"));
    CHECK(fs::exists(dir.path / "run1" / "summary.json"));
    CHECK(fs::exists(dir.path / "run1" / "effective_config.json"));
}

TEST_CASE("cmd_run on a missing file has its own exit code", "[runner]") {
    std::ostringstream out, err;
    RunManifest m;
    m.scenario_path = "/no/such/file.json";
    m.out_dir = "/tmp/petreg_never";
    CHECK(cmd_run(m, out, err) == exit_code::missing_file);
}

TEST_CASE("cmd_run names the unreachable agent and exits distinctly", "[runner]") {
    TempDir dir;
    RunManifest m = short_manifest(dir, "iso");
    m.overrides.push_back({"graph.adjacency.3", "[0,0,0,0]"});  // cut follower 4 off
    std::ostringstream out, err;
    CHECK(cmd_run(m, out, err) == exit_code::no_spanning_tree);
    CHECK(err.str().find("4") != std::string::npos);
}

TEST_CASE("override value appears verbatim in the effective config", "[runner]") {
    TempDir dir;
    RunManifest m = short_manifest(dir, "ovr");
    m.overrides.push_back({"controller.iota_e", "0.2"});
    std::ostringstream out, err;
    REQUIRE(cmd_run(m, out, err) == exit_code::ok);
    const auto doc = nlohmann::json::parse(slurp(dir.path / "ovr" / "effective_config.json"));
    CHECK(doc["controller"]["iota_e"].get<double>() == 0.2);
}

TEST_CASE("larger iota_e produces fewer PETM-B events", "[runner]") {
    TempDir dir;
    std::ostringstream out, err;
    RunManifest base = short_manifest(dir, "e1");
    REQUIRE(cmd_run(base, out, err) == exit_code::ok);
    RunManifest looser = short_manifest(dir, "e2");
    looser.overrides.push_back({"controller.iota_e", "0.2"});
    REQUIRE(cmd_run(looser, out, err) == exit_code::ok);
    const auto s1 = nlohmann::json::parse(slurp(dir.path / "e1" / "summary.json"));
    const auto s2 = nlohmann::json::parse(slurp(dir.path / "e2" / "summary.json"));
    CHECK(s2["events"]["petm_b"]["total"].get<long>() <
          s1["events"]["petm_b"]["total"].get<long>());
}

TEST_CASE("cmd_sweep writes a combined table shaped like the event-count table", "[runner]") {
    TempDir dir;
    RunManifest m = short_manifest(dir, "sw");
    m.sweep_key = "controller.iota_e";
    m.sweep_values = {"0.05", "0.1", "0.2"};
    m.jobs = 3;
    std::ostringstream out, err;
    REQUIRE(cmd_sweep(m, out, err) == exit_code::ok);

    const std::string table = slurp(dir.path / "sw" / "sweep_table.csv");
    CHECK(table.rfind("controller.iota_e,0.05,0.1,0.2\n", 0) == 0);
    CHECK(table.find("\nsampled_data,") != std::string::npos);
    CHECK(table.find("\npet,") != std::string::npos);

    // one result directory per swept value
    for (const std::string v : {"0.05", "0.1", "0.2"})
        CHECK(fs::exists(dir.path / "sw" / ("controller.iota_e=" + v) / "summary.json"));

    // counts strictly decreasing across columns
    std::istringstream lines(table);
    std::string header, sampled, pet;
    std::getline(lines, header);
    std::getline(lines, sampled);
    std::getline(lines, pet);
    long a = 0, b = 0, c = 0;
    REQUIRE(std::sscanf(pet.c_str(), "pet,%ld,%ld,%ld", &a, &b, &c) == 3);
    CHECK(a > b);
    CHECK(b > c);
}

TEST_CASE("single-value sweep degenerates to one column", "[runner]") {
    TempDir dir;
    RunManifest m = short_manifest(dir, "sw1");
    m.sweep_key = "controller.iota_e";
    m.sweep_values = {"0.1"};
    std::ostringstream out, err;
    REQUIRE(cmd_sweep(m, out, err) == exit_code::ok);
    const std::string table = slurp(dir.path / "sw1" / "sweep_table.csv");
    CHECK(table.rfind("controller.iota_e,0.1\n", 0) == 0);
}

TEST_CASE("cmd_bound prints the scalar fixture value", "[runner]") {
    // single pinned follower => H = [1]; mu2 = 1, gamma_nu = 0.1
    TempDir dir;
    const fs::path scen = dir.path / "scalar.json";
    nlohmann::json doc = nlohmann::json::parse(slurp(kScenario));
    doc["graph"]["adjacency"] = {{0}};
    doc["graph"]["pinning"] = {1};
    doc["agents"] = {{{"observer_period", 0.01}, {"controller_period", 0.01}}};
    doc["observer"]["mu2"] = 1.0;
    doc["observer"]["gamma_nu"] = 0.1;
    std::ofstream(scen) << doc.dump(2);

    RunManifest m;
    m.scenario_path = scen.string();
    std::ostringstream out, err;
    REQUIRE(cmd_bound(m, out, err) == exit_code::ok);
    CHECK(out.str().find("0.133333") != std::string::npos);
    CHECK(out.str().find("feasible: yes") != std::string::npos);
    CHECK(out.str().find("within bound") != std::string::npos);
}

TEST_CASE("cmd_bound reports infeasible parameters informationally", "[runner]") {
    // the first bound term goes negative once gamma ||P|| > mu/2
    TempDir dir;
    RunManifest m;
    m.scenario_path = kScenario;
    m.overrides = {{"observer.gamma_nu", "10.0"}};
    std::ostringstream out, err;
    CHECK(cmd_bound(m, out, err) == exit_code::ok);
    CHECK(out.str().find("feasible: no") != std::string::npos);
}

TEST_CASE("cmd_bound shrinks toward zero for huge coupling gains", "[runner]") {
    RunManifest m;
    m.scenario_path = kScenario;
    m.overrides = {{"observer.mu2", "500.0"}};
    std::ostringstream out, err;
    CHECK(cmd_bound(m, out, err) == exit_code::ok);
    CHECK(out.str().find("outside bound") != std::string::npos);
}

TEST_CASE("cmd_validate passes the bundled scenario", "[runner]") {
    RunManifest m;
    m.scenario_path = kScenario;
    std::ostringstream out, err;
    CHECK(cmd_validate(m, out, err) == exit_code::ok);
    CHECK(out.str().find("FAIL") == std::string::npos);
}

TEST_CASE("cmd_validate fails on a broken scenario and keeps running checks", "[runner]") {
    RunManifest m;
    m.scenario_path = kScenario;
    m.overrides = {{"exosystem.A", "[[0,1],[0,0]]"}};
    std::ostringstream out, err;
    CHECK(cmd_validate(m, out, err) == exit_code::failure);
    CHECK(out.str().find("FAIL  exosystem_skew_symmetric") != std::string::npos);
    CHECK(out.str().find("PASS  leader_spanning_tree") != std::string::npos);
}

TEST_CASE("validated scenarios run without config errors", "[runner]") {
    // property promised by the interface: validate-pass implies run accepts it
    TempDir dir;
    RunManifest m = short_manifest(dir, "vr");
    m.overrides.push_back({"engine.t_end", "0.5"});
    std::ostringstream out, err;
    REQUIRE(cmd_validate(m, out, err) == exit_code::ok);
    CHECK(cmd_run(m, out, err) == exit_code::ok);
}
