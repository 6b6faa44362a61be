// petreg: periodic event-triggered cooperative output regulation simulator.

#include <string>
#include <vector>

#include "CLI11.hpp"
#include "petreg/runner.hpp"

namespace {

std::vector<std::pair<std::string, std::string>> parse_overrides(
    const std::vector<std::string>& raw) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const std::string& kv : raw) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw CLI::ValidationError("--set expects key=value, got '" + kv + "'");
        out.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return out;
}

std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Periodic event-triggered cooperative output regulation simulator"};
    app.require_subcommand(1);

    petreg::RunManifest manifest;
    std::vector<std::string> raw_sets;
    std::string values_csv;

    auto add_common = [&](CLI::App* cmd, bool with_out) {
        cmd->add_option("--scenario", manifest.scenario_path, "scenario JSON file")->required();
        cmd->add_option("--set", raw_sets, "override a config key (dotted.path=value)");
        if (with_out)
            cmd->add_option("--out", manifest.out_dir,
                            "output directory (default $PETREG_OUT_ROOT/<name>)");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "simulate a scenario and write CSV logs");
    add_common(run_cmd, true);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a scenario across parameter values");
    add_common(sweep_cmd, true);
    sweep_cmd->add_option("--key", manifest.sweep_key, "dotted config key to sweep")->required();
    sweep_cmd->add_option("--values", values_csv, "comma-separated values")->required();
    sweep_cmd->add_option("--jobs", manifest.jobs, "concurrent runs")->default_val(1);

    CLI::App* bound_cmd =
        app.add_subcommand("bound", "print the observer sampling-period bound");
    add_common(bound_cmd, false);

    CLI::App* validate_cmd =
        app.add_subcommand("validate", "check scenario structure and assumptions");
    add_common(validate_cmd, false);

    CLI11_PARSE(app, argc, argv);

    try {
        manifest.overrides = parse_overrides(raw_sets);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return petreg::exit_code::bad_config;
    }
    manifest.sweep_values = split_csv(values_csv);

    if (run_cmd->parsed()) {
        manifest.subcommand = "run";
        return petreg::cmd_run(manifest);
    }
    if (sweep_cmd->parsed()) {
        manifest.subcommand = "sweep";
        return petreg::cmd_sweep(manifest);
    }
    if (bound_cmd->parsed()) {
        manifest.subcommand = "bound";
        return petreg::cmd_bound(manifest);
    }
    manifest.subcommand = "validate";
    return petreg::cmd_validate(manifest);
}
