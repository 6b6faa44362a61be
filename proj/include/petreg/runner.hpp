#pragma once

// Command implementations behind the CLI: run, sweep, bound, validate.
// Each returns a process exit status; distinct failure classes get distinct
// codes so scripts can tell them apart.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "petreg/engine.hpp"

namespace petreg {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int missing_file = 2;
inline constexpr int bad_config = 3;
inline constexpr int no_spanning_tree = 4;
inline constexpr int diverged = 5;
}  // namespace exit_code

struct RunManifest {
    std::string scenario_path;
    std::string out_dir;  // empty: $PETREG_OUT_ROOT/<name> or ./out/<name>
    std::vector<std::pair<std::string, std::string>> overrides;
    std::string subcommand;

    // sweep only
    std::string sweep_key;
    std::vector<std::string> sweep_values;
    int jobs = 1;
};

namespace detail {

inline nlohmann::json load_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open scenario file: " + path);
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
    return doc;
}

inline nlohmann::json effective_document(const RunManifest& m) {
    nlohmann::json doc = load_document(m.scenario_path);
    for (const auto& [key, value] : m.overrides) apply_override(doc, key, value);
    return doc;
}

inline std::string resolve_out_dir(const RunManifest& m, const std::string& scenario_name) {
    if (!m.out_dir.empty()) return m.out_dir;
    const char* root = std::getenv("PETREG_OUT_ROOT");
    const std::string base = root != nullptr ? root : "out";
    return base + "/" + scenario_name;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot write " + path.string());
    out << content;
}

/// Fitted decay rate of max_i ||nu_hat_i - nu|| with the one-sided
/// comparison against the configured gamma_nu.
inline nlohmann::json observer_rate_block(const SimLog& log, const Scenario& s) {
    nlohmann::json block;
    const Real t1 = std::min<Real>(10.0, s.engine.t_end);
    const Real t0 = 2.0;
    block["window"] = {t0, t1};
    block["gamma_nu"] = s.observer.gamma_nu;
    try {
        std::vector<Real> worst(log.t.size(), 0.0);
        for (std::size_t r = 0; r < log.t.size(); ++r)
            for (const auto& agent : log.agents)
                worst[r] = std::max(worst[r], agent.nu_err[r]);
        const Real rate = fit_exponential_rate(log.t, worst, t0, t1);
        block["fitted"] = rate;
        // exponential membership is one-sided: decay at least as fast as gamma
        block["label"] = rate <= -s.observer.gamma_nu ? "PASS" : "INFO";
    } catch (const std::exception& e) {
        block["label"] = "SKIPPED";
        block["detail"] = e.what();
    }
    return block;
}

inline nlohmann::json summary_json(const SimLog& log, const Scenario& s, Real runtime_seconds) {
    nlohmann::json j;
    j["scenario"] = s.name;
    j["t_end"] = s.engine.t_end;
    j["h_int"] = s.engine.h_int;
    j["observer_case"] = s.observer_case;
    j["petm_c_enabled"] = s.petm_c_enabled;

    const Real tail_start = std::max<Real>(0.0, s.engine.t_end - 5.0);
    nlohmann::json final_block;
    for (std::size_t i = 0; i < log.agents.size(); ++i) {
        const auto& a = log.agents[i];
        Real tail = 0;
        for (std::size_t r = 0; r < log.t.size(); ++r)
            if (log.t[r] >= tail_start) tail = std::max(tail, std::abs(a.e[r]));
        final_block["e_end"].push_back(a.e.back());
        final_block["max_abs_e_tail"].push_back(tail);
        final_block["nu_err_end"].push_back(a.nu_err.back());
        if (log.observer_case == 2) final_block["a_err_end"].push_back(a.a_err.back());
    }
    final_block["tail_window_start"] = tail_start;
    j["final"] = final_block;

    nlohmann::json events;
    long by_a = 0, by_nu = 0;
    for (const auto& ev : log.events) {
        if (ev.channel != Channel::observer) continue;
        by_a += ev.by_a ? 1 : 0;
        by_nu += ev.by_nu ? 1 : 0;
    }
    for (Channel ch : {Channel::observer, Channel::petm_b, Channel::petm_c}) {
        if (ch == Channel::petm_c && !log.petm_c_enabled) continue;
        nlohmann::json block;
        long total = 0;
        for (std::size_t i = 0; i < log.agents.size(); ++i) {
            const long n = log.count(static_cast<Index>(i), ch);
            block["per_agent"].push_back(n);
            total += n;
        }
        block["total"] = total;
        if (ch == Channel::observer) {
            block["checks"] = log.observer_checks;
            if (log.observer_case == 2) {
                block["fired_by_a"] = by_a;
                block["fired_by_nu"] = by_nu;
            }
        } else {
            block["checks"] = log.controller_checks;
        }
        events[channel_name(ch)] = block;
    }
    j["events"] = events;

    nlohmann::json stats = nlohmann::json::array();
    for (const auto& st : event_statistics(log)) {
        nlohmann::json row;
        row["agent"] = st.agent + 1;
        row["channel"] = channel_name(st.channel);
        row["events"] = st.events;
        row["checks"] = st.checks;
        row["period"] = st.period;
        row["min_gap"] = st.min_gap;
        row["mean_gap"] = st.mean_gap;
        row["max_gap"] = st.max_gap;
        row["inter_event_multiples_ok"] = st.multiples_ok;
        stats.push_back(row);
    }
    j["inter_event"] = stats;
    j["observer_rate"] = observer_rate_block(log, s);
    j["runtime_seconds"] = runtime_seconds;
    return j;
}

struct RunOutputs {
    Scenario scenario;
    SimLog log;
    nlohmann::json summary;
};

/// Shared by run and sweep: load + override + simulate + write artifacts.
inline RunOutputs execute_run(const nlohmann::json& doc, const std::string& out_dir) {
    RunOutputs out;
    out.scenario = scenario_from_json(doc);

    const auto t_start = std::chrono::steady_clock::now();
    out.log = run(out.scenario);
    const Real seconds =
        std::chrono::duration<Real>(std::chrono::steady_clock::now() - t_start).count();

    std::filesystem::create_directories(out_dir);
    write_file(std::filesystem::path(out_dir) / "timeseries.csv", timeseries_csv(out.log));
    write_file(std::filesystem::path(out_dir) / "events.csv", events_csv(out.log));
    out.summary = summary_json(out.log, out.scenario, seconds);
    write_file(std::filesystem::path(out_dir) / "summary.json", out.summary.dump(2) + "\n");
    write_file(std::filesystem::path(out_dir) / "effective_config.json", doc.dump(2) + "\n");
    return out;
}

inline int classify_and_report(const std::exception& e, std::ostream& err) {
    if (dynamic_cast<const std::ios_base::failure*>(&e) != nullptr) {
        err << "error: " << e.what() << "\n";
        return exit_code::missing_file;
    }
    if (const auto* div = dynamic_cast<const DivergenceError*>(&e)) {
        err << "error: " << div->what() << "\n";
        return exit_code::diverged;
    }
    if (dynamic_cast<const ConfigError*>(&e) != nullptr ||
        dynamic_cast<const nlohmann::json::exception*>(&e) != nullptr ||
        dynamic_cast<const InputError*>(&e) != nullptr ||
        dynamic_cast<const DimensionError*>(&e) != nullptr) {
        const std::string what = e.what();
        err << "error: " << what << "\n";
        if (what.find("spanning tree") != std::string::npos) return exit_code::no_spanning_tree;
        return exit_code::bad_config;
    }
    err << "error: " << e.what() << "\n";
    return exit_code::failure;
}

}  // namespace detail

inline int cmd_run(const RunManifest& m, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    try {
        const nlohmann::json doc = detail::effective_document(m);
        const std::string name = doc.value("name", "scenario");
        const std::string out_dir = detail::resolve_out_dir(m, name);
        const auto result = detail::execute_run(doc, out_dir);
        out << "wrote " << out_dir << "/{timeseries.csv, events.csv, summary.json, "
            << "effective_config.json}\n";
        out << "  petm_b events: " << result.summary["events"]["petm_b"]["total"]
            << "  observer events: " << result.summary["events"]["observer"]["total"] << "\n";
        return exit_code::ok;
    } catch (const std::exception& e) {
        return detail::classify_and_report(e, err);
    }
}

inline int cmd_sweep(const RunManifest& m, std::ostream& out = std::cout,
                     std::ostream& err = std::cerr) {
    if (m.sweep_key.empty() || m.sweep_values.empty()) {
        err << "error: sweep needs --key and --values\n";
        return exit_code::bad_config;
    }
    nlohmann::json base_doc;
    std::string root;
    try {
        base_doc = detail::effective_document(m);
        root = detail::resolve_out_dir(m, base_doc.value("name", "scenario"));
    } catch (const std::exception& e) {
        return detail::classify_and_report(e, err);
    }

    struct SweepResult {
        std::string value;
        bool ok = false;
        int code = exit_code::failure;
        std::string message;
        long petm_b_total = 0;
        long sampled_checks = 0;
    };
    std::vector<SweepResult> results(m.sweep_values.size());

    std::mutex next_mutex;
    std::size_t next = 0;
    auto worker = [&] {
        for (;;) {
            std::size_t idx;
            {
                std::lock_guard<std::mutex> lock(next_mutex);
                if (next >= m.sweep_values.size()) return;
                idx = next++;
            }
            SweepResult& r = results[idx];
            r.value = m.sweep_values[idx];
            try {
                nlohmann::json doc = base_doc;
                apply_override(doc, m.sweep_key, r.value);
                const std::string dir = root + "/" + m.sweep_key + "=" + r.value;
                const auto run_out = detail::execute_run(doc, dir);
                r.petm_b_total = run_out.log.total(Channel::petm_b);
                for (long c : run_out.log.controller_checks) r.sampled_checks += c;
                r.ok = true;
                r.code = exit_code::ok;
            } catch (const std::exception& e) {
                std::ostringstream msg;
                r.code = detail::classify_and_report(e, msg);
                r.message = msg.str();
            }
        }
    };
    const int n_threads = std::max(1, std::min<int>(m.jobs,
                                                    static_cast<int>(m.sweep_values.size())));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    // Combined table: one column per swept value, rows for the sampled-data
    // baseline and the PET transmission counts.
    std::string table = m.sweep_key;
    for (const auto& r : results) table += "," + r.value;
    table += "\nsampled_data";
    for (const auto& r : results) table += "," + (r.ok ? std::to_string(r.sampled_checks) : "-");
    table += "\npet";
    for (const auto& r : results) table += "," + (r.ok ? std::to_string(r.petm_b_total) : "-");
    table += "\n";
    std::filesystem::create_directories(root);
    detail::write_file(std::filesystem::path(root) / "sweep_table.csv", table);

    int status = exit_code::ok;
    for (const auto& r : results) {
        if (r.ok) {
            out << m.sweep_key << "=" << r.value << ": petm_b " << r.petm_b_total << " / "
                << r.sampled_checks << " checks\n";
        } else {
            err << m.sweep_key << "=" << r.value << " failed: " << r.message;
            if (status == exit_code::ok) status = r.code;
        }
    }
    out << "wrote " << root << "/sweep_table.csv\n";
    return status;
}

inline int cmd_bound(const RunManifest& m, std::ostream& out = std::cout,
                     std::ostream& err = std::cerr) {
    try {
        const nlohmann::json doc = detail::effective_document(m);
        const Scenario s = scenario_from_json(doc);
        const Matrix h = h_matrix(s.graph);
        const SamplingBound b = sampling_period_bound(s.observer.mu2, s.observer.gamma_nu, h);
        out << "sampling-period bound: " << b.value << " s  (state term " << b.term_state
            << ", delay term " << b.term_delay << ")\n";
        out << "feasible: " << (b.feasible ? "yes" : "no") << "\n";
        for (Index i = 0; i < s.n_agents(); ++i) {
            const Real period = s.agents[static_cast<std::size_t>(i)].observer_grid.period;
            const bool pass = b.feasible && period < b.value;
            out << "  agent " << (i + 1) << ": T = " << period << "  "
                << (pass ? "within bound" : "outside bound") << "\n";
        }
        return exit_code::ok;
    } catch (const std::exception& e) {
        return detail::classify_and_report(e, err);
    }
}

inline int cmd_validate(const RunManifest& m, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr) {
    try {
        const nlohmann::json doc = detail::effective_document(m);
        const Scenario s = scenario_from_json(doc);
        bool all_ok = true;
        for (const auto& check : validate_scenario(s)) {
            out << (check.passed ? "PASS" : "FAIL") << "  " << check.name;
            if (!check.detail.empty()) out << "  (" << check.detail << ")";
            out << "\n";
            all_ok &= check.passed;
        }
        return all_ok ? exit_code::ok : exit_code::failure;
    } catch (const std::exception& e) {
        return detail::classify_and_report(e, err);
    }
}

}  // namespace petreg
