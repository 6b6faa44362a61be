#pragma once

// Deterministic multi-rate closed-loop executor.
//
// Per global step: (1) advance all continuous states one RK4 step using the
// held discrete values, (2) evaluate observer triggers for every agent whose
// observer grid hits the new time, (3) evaluate controller triggers and
// refresh the actuator value for every agent whose controller grid hits,
// (4) log. Simultaneous hits are processed in ascending agent order,
// observers before controllers, so the total order is fixed.
//
// Continuous coupling between agents flows only through broadcast records:
// a neighbour's last event is propagated in closed form (matrix exponential)
// at every integration stage time.

#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "petreg/scenario.hpp"

namespace petreg {

enum class Channel { observer, petm_b, petm_c };

inline const char* channel_name(Channel c) {
    switch (c) {
        case Channel::observer: return "observer";
        case Channel::petm_b: return "petm_b";
        case Channel::petm_c: return "petm_c";
    }
    return "?";
}

struct EventRecord {
    Real t = 0.0;
    Index agent = 0;  // 0-based internally; reported 1-based
    Channel channel = Channel::observer;
    Real payload_norm = 0.0;
    bool by_a = false;   // case-2 observer events: which condition fired
    bool by_nu = false;
};

struct AgentSeries {
    std::vector<Real> y;
    std::vector<Real> e;
    std::vector<Real> u;
    std::vector<Real> nu_err;
    std::vector<Real> a_err;    // case 2 only
    std::vector<ColVec> xi_hat;  // high-gain observer state (not in the CSV)
};

struct SimLog {
    std::vector<Real> t;
    std::vector<Real> y0;
    std::vector<AgentSeries> agents;
    std::vector<EventRecord> events;
    std::vector<long> observer_checks;    // sampled-data baseline, per agent
    std::vector<long> controller_checks;
    std::vector<Real> observer_period;
    std::vector<Real> controller_period;
    std::vector<Real> observer_phase;
    std::vector<Real> controller_phase;
    int observer_case = 1;
    bool petm_c_enabled = false;

    [[nodiscard]] long count(Index agent, Channel c) const {
        long n = 0;
        for (const auto& ev : events)
            if (ev.agent == agent && ev.channel == c) ++n;
        return n;
    }
    [[nodiscard]] long total(Channel c) const {
        long n = 0;
        for (const auto& ev : events)
            if (ev.channel == c) ++n;
        return n;
    }
};

// ---------------------------------------------------------------------------

namespace detail {

/// Platform-stable uniform draw in [-range, range).
inline Real uniform_draw(std::mt19937& rng, Real range) {
    return (static_cast<Real>(rng()) / 4294967296.0 * 2.0 - 1.0) * range;
}

struct AgentLayout {
    Index z_off, z_dim;
    Index x_off, x_dim;
    Index nu_off, nu_dim;
    Index a_off;  // -1 when A_hat is not part of the state (case 1)
    Index eta_off, eta_dim;
    Index xi_off, xi_dim;
};

inline ColVec slice(const ColVec& x, Index off, Index dim) {
    ColVec out(dim);
    for (Index i = 0; i < dim; ++i) out(i) = x(off + i);
    return out;
}

inline Matrix slice_matrix(const ColVec& x, Index off, Index n) {
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) m(i, j) = x(off + i * n + j);
    return m;
}

}  // namespace detail

inline SimLog run(const Scenario& s) {
    // -- blocking validation ------------------------------------------------
    const auto missing = unreachable_followers(s.graph);
    if (!missing.empty()) {
        std::string who;
        for (Index i : missing) who += (who.empty() ? "" : ", ") + std::to_string(i + 1);
        throw ConfigError("graph has no leader-rooted spanning tree; unreachable follower(s): " +
                          who);
    }
    s.observer.validate();
    s.controller.validate();
    if (s.observer_case != 1 && s.observer_case != 2)
        throw ConfigError("observer case must be 1 or 2");
    const Index n_agents = s.n_agents();
    if (n_agents != s.graph.n_followers)
        throw ConfigError("agent list does not match the graph size");

    const Exosystem exo = s.make_exosystem();
    const InternalModel im = s.make_internal_model();
    const Matrix& true_a = exo.a();
    const Index nu_dim = exo.dim();
    const bool case2 = s.observer_case == 2;

    const Real h = s.engine.h_int;
    if (!(h > 0) || !(s.engine.t_end > 0) || s.engine.log_decimation < 1)
        throw ConfigError("engine block: need h_int > 0, t_end > 0, log_decimation >= 1");
    const long n_steps = std::lround(s.engine.t_end / h);

    std::vector<StrictFeedbackPlant> plants;
    std::vector<long> obs_period_steps, obs_phase_steps, ctl_period_steps, ctl_phase_steps;
    for (Index i = 0; i < n_agents; ++i) {
        const auto& a = s.agents[static_cast<std::size_t>(i)];
        const std::string tag = "agent " + std::to_string(i + 1);
        a.observer_grid.validate();
        a.controller_grid.validate();
        const long ko = steps_of(a.observer_grid.period, h, tag + " observer period");
        const long kc = steps_of(a.controller_grid.period, h, tag + " controller period");
        if (ko < 1 || kc < 1) throw ConfigError(tag + ": sampling periods must be >= h_int");
        obs_period_steps.push_back(ko);
        ctl_period_steps.push_back(kc);
        obs_phase_steps.push_back(steps_of(a.observer_grid.phase, h, tag + " observer phase"));
        ctl_phase_steps.push_back(steps_of(a.controller_grid.phase, h, tag + " controller phase"));

        StrictFeedbackPlant plant = s.make_plant(i);
        if (plant.order != s.controller.order())
            throw ConfigError(tag + ": plant order " + std::to_string(plant.order) +
                              " does not match controller order " +
                              std::to_string(s.controller.order()));
        plants.push_back(std::move(plant));
    }

    // -- state layout ---------------------------------------------------------
    std::vector<detail::AgentLayout> layout;
    Index total_dim = 0;
    for (Index i = 0; i < n_agents; ++i) {
        detail::AgentLayout l{};
        l.z_dim = plants[static_cast<std::size_t>(i)].z_dim;
        l.x_dim = plants[static_cast<std::size_t>(i)].order;
        l.nu_dim = nu_dim;
        l.eta_dim = im.dim();
        l.xi_dim = plants[static_cast<std::size_t>(i)].order;
        l.z_off = total_dim;
        l.x_off = l.z_off + l.z_dim;
        l.nu_off = l.x_off + l.x_dim;
        l.a_off = case2 ? l.nu_off + l.nu_dim : -1;
        l.eta_off = case2 ? l.a_off + nu_dim * nu_dim : l.nu_off + l.nu_dim;
        l.xi_off = l.eta_off + l.eta_dim;
        total_dim = l.xi_off + l.xi_dim;
        layout.push_back(l);
    }

    // -- initial conditions ---------------------------------------------------
    ColVec state(total_dim);
    std::mt19937 rng(s.engine.rng_seed);
    for (Index i = 0; i < n_agents; ++i) {
        const auto& l = layout[static_cast<std::size_t>(i)];
        const auto& cfg = s.agents[static_cast<std::size_t>(i)];
        // draw for every agent so explicit overrides do not shift later draws
        ColVec z_draw(l.z_dim), x_draw(l.x_dim);
        for (Index k = 0; k < l.z_dim; ++k) z_draw(k) = detail::uniform_draw(rng, s.init_range);
        for (Index k = 0; k < l.x_dim; ++k) x_draw(k) = detail::uniform_draw(rng, s.init_range);
        const ColVec& z0 = cfg.z0 ? *cfg.z0 : z_draw;
        const ColVec& x0 = cfg.x0 ? *cfg.x0 : x_draw;
        if (z0.dim() != l.z_dim || x0.dim() != l.x_dim)
            throw ConfigError("agent " + std::to_string(i + 1) +
                              ": explicit initial condition has the wrong dimension");
        for (Index k = 0; k < l.z_dim; ++k) state(l.z_off + k) = z0(k);
        for (Index k = 0; k < l.x_dim; ++k) state(l.x_off + k) = x0(k);
        if (case2 && s.a_hat0_exact)
            for (Index r = 0; r < nu_dim; ++r)
                for (Index c = 0; c < nu_dim; ++c) state(l.a_off + r * nu_dim + c) = true_a(r, c);
        // nu_hat, eta, xi_hat start at zero
    }

    // -- held records and controller state -------------------------------------
    std::vector<BroadcastRecord> records(static_cast<std::size_t>(n_agents));
    std::vector<ControllerState> ctl(static_cast<std::size_t>(n_agents));
    SimLog log;
    log.observer_case = s.observer_case;
    log.petm_c_enabled = s.petm_c_enabled;
    log.agents.resize(static_cast<std::size_t>(n_agents));
    log.observer_checks.assign(static_cast<std::size_t>(n_agents), 0);
    log.controller_checks.assign(static_cast<std::size_t>(n_agents), 0);
    for (Index i = 0; i < n_agents; ++i) {
        log.observer_period.push_back(s.agents[static_cast<std::size_t>(i)].observer_grid.period);
        log.controller_period.push_back(
            s.agents[static_cast<std::size_t>(i)].controller_grid.period);
        log.observer_phase.push_back(s.agents[static_cast<std::size_t>(i)].observer_grid.phase);
        log.controller_phase.push_back(
            s.agents[static_cast<std::size_t>(i)].controller_grid.phase);
    }

    auto observer_payload = [&](const BroadcastRecord& rec) {
        if (!case2) return rec.nu_hat.norm();
        const Real nn = rec.nu_hat.norm();
        const Real fa = rec.a_hat.frobenius_norm();
        return std::sqrt(nn * nn + fa * fa);
    };

    for (Index i = 0; i < n_agents; ++i) {
        const auto& l = layout[static_cast<std::size_t>(i)];
        BroadcastRecord rec;
        rec.event_time = 0.0;
        rec.nu_hat = detail::slice(state, l.nu_off, l.nu_dim);
        rec.a_hat = case2 ? detail::slice_matrix(state, l.a_off, nu_dim) : true_a;
        records[static_cast<std::size_t>(i)] = std::move(rec);
        log.events.push_back({0.0, i, Channel::observer,
                              observer_payload(records[static_cast<std::size_t>(i)]), false,
                              false});

        auto& c = ctl[static_cast<std::size_t>(i)];
        c.xi_hat = ColVec(l.xi_dim);
        const Real y0_meas = state(l.x_off);
        c.e_hat_held = y0_meas - exo.output(records[static_cast<std::size_t>(i)].nu_hat);
        c.e_hat_event_time = 0.0;
        const ColVec zeta = zeta_hat_cascade(detail::slice(state, l.xi_off, l.xi_dim),
                                             s.controller.q);
        c.u_actuator = control_output(zeta, im, detail::slice(state, l.eta_off, l.eta_dim),
                                      s.controller);
        c.u_event_time = 0.0;
        log.events.push_back({0.0, i, Channel::petm_b, std::abs(c.e_hat_held), false, false});
        if (s.petm_c_enabled)
            log.events.push_back({0.0, i, Channel::petm_c, std::abs(c.u_actuator), false, false});
    }

    // -- derivative of the full stacked state -----------------------------------
    // Predictions are shared by every receiver, so they are computed once per
    // stage time. The memo is keyed on the exact stage time and reset whenever
    // records change (events) or a new step begins.
    std::vector<ColVec> predictions(static_cast<std::size_t>(n_agents));
    ColVec leader_nu;
    Real memo_t = std::numeric_limits<Real>::quiet_NaN();

    auto refresh_predictions = [&](Real t) {
        if (t == memo_t) return;
        leader_nu = exo.leader_state(t);
        for (Index j = 0; j < n_agents; ++j)
            predictions[static_cast<std::size_t>(j)] =
                predict_broadcast(records[static_cast<std::size_t>(j)], t);
        memo_t = t;
    };

    auto derivative = [&](Real t, const ColVec& x) {
        refresh_predictions(t);
        ColVec dxdt(total_dim);
        for (Index i = 0; i < n_agents; ++i) {
            const auto& l = layout[static_cast<std::size_t>(i)];
            const auto& rec = records[static_cast<std::size_t>(i)];
            const Real u_act = ctl[static_cast<std::size_t>(i)].u_actuator;

            const ColVec z = detail::slice(x, l.z_off, l.z_dim);
            const ColVec xs = detail::slice(x, l.x_off, l.x_dim);
            const PlantDerivative pd = plants[static_cast<std::size_t>(i)].rhs(z, xs, leader_nu,
                                                                               u_act);
            for (Index k = 0; k < l.z_dim; ++k) dxdt(l.z_off + k) = pd.z_dot(k);
            for (Index k = 0; k < l.x_dim; ++k) dxdt(l.x_off + k) = pd.x_dot(k);

            // distributed observer: drift with the held A (the true A in case 1)
            const ColVec nu_hat = detail::slice(x, l.nu_off, l.nu_dim);
            const ColVec& own = predictions[static_cast<std::size_t>(i)];
            ColVec coupling(l.nu_dim);
            if (s.graph.pinning[static_cast<std::size_t>(i)] == 1) coupling += leader_nu - own;
            for (Index j = 0; j < n_agents; ++j)
                if (s.graph.adjacency(i, j) == 1.0)
                    coupling += predictions[static_cast<std::size_t>(j)] - own;
            const ColVec nu_dot = rec.a_hat * nu_hat + coupling * s.observer.mu2;
            for (Index k = 0; k < l.nu_dim; ++k) dxdt(l.nu_off + k) = nu_dot(k);

            if (case2) {
                Matrix a_coupling(nu_dim, nu_dim);
                if (s.graph.pinning[static_cast<std::size_t>(i)] == 1)
                    a_coupling += true_a - rec.a_hat;
                for (Index j = 0; j < n_agents; ++j)
                    if (s.graph.adjacency(i, j) == 1.0)
                        a_coupling += records[static_cast<std::size_t>(j)].a_hat - rec.a_hat;
                for (Index r = 0; r < nu_dim; ++r)
                    for (Index c = 0; c < nu_dim; ++c)
                        dxdt(l.a_off + r * nu_dim + c) = s.observer.mu1 * a_coupling(r, c);
            }

            const ColVec eta = detail::slice(x, l.eta_off, l.eta_dim);
            const ColVec eta_dot = im.rhs(eta, u_act);
            for (Index k = 0; k < l.eta_dim; ++k) dxdt(l.eta_off + k) = eta_dot(k);

            // u_bar = u - Phi eta keeps the coordinate-change identity exact
            const Real u_bar = u_act - im.readout(eta);
            const ColVec xi = detail::slice(x, l.xi_off, l.xi_dim);
            const ColVec xi_dot = hgo_rhs(xi, ctl[static_cast<std::size_t>(i)].e_hat_held, u_bar,
                                          s.controller);
            for (Index k = 0; k < l.xi_dim; ++k) dxdt(l.xi_off + k) = xi_dot(k);
        }
        return dxdt;
    };

    auto grid_hit = [](long step, long phase, long period) {
        return step >= phase && (step - phase) % period == 0;
    };

    // -- main loop ---------------------------------------------------------------
    const long decim = s.engine.log_decimation;
    log.t.reserve(static_cast<std::size_t>(n_steps / decim + 2));

    for (long step = 0; step <= n_steps; ++step) {
        const Real t = static_cast<Real>(step) * h;

        if (step > 0) {
            memo_t = std::numeric_limits<Real>::quiet_NaN();
            const Real t_prev = static_cast<Real>(step - 1) * h;
            try {
                state = rk4_step(derivative, state, t_prev, h);
            } catch (const DivergenceError& e) {
                const Real at = std::isnan(e.time) ? t : e.time;
                throw DivergenceError("simulation diverged near t = " + std::to_string(at), at);
            }
            for (Index i = 0; i < n_agents; ++i) {
                const auto& l = layout[static_cast<std::size_t>(i)];
                for (Index k = l.z_off; k < l.xi_off + l.xi_dim; ++k)
                    if (!std::isfinite(state(k)))
                        throw DivergenceError("agent " + std::to_string(i + 1) +
                                                  " diverged at t = " + std::to_string(t),
                                              t);
            }
        }

        // (2) observer grids
        for (Index i = 0; i < n_agents; ++i) {
            if (!grid_hit(step, obs_phase_steps[static_cast<std::size_t>(i)],
                          obs_period_steps[static_cast<std::size_t>(i)]))
                continue;
            ++log.observer_checks[static_cast<std::size_t>(i)];
            const auto& l = layout[static_cast<std::size_t>(i)];
            auto& rec = records[static_cast<std::size_t>(i)];
            const ColVec nu_hat = detail::slice(state, l.nu_off, l.nu_dim);
            const ColVec own_pred = predict_broadcast(rec, t);
            bool fired = false, by_a = false, by_nu = false;
            if (case2) {
                const Matrix a_hat = detail::slice_matrix(state, l.a_off, nu_dim);
                const Case2Fire f2 = petm_case2_fire(a_hat, rec.a_hat, nu_hat, own_pred, t,
                                                     s.observer);
                fired = f2.fired();
                by_a = f2.by_a;
                by_nu = f2.by_nu;
                if (fired) rec = {t, nu_hat, a_hat};
            } else {
                fired = petm_a_fire(nu_hat, own_pred, t, s.observer);
                by_nu = fired;
                if (fired) rec = {t, nu_hat, true_a};
            }
            if (fired) {
                memo_t = std::numeric_limits<Real>::quiet_NaN();
                log.events.push_back({t, i, Channel::observer, observer_payload(rec), by_a, by_nu});
            }
        }

        // (3) controller grids
        for (Index i = 0; i < n_agents; ++i) {
            if (!grid_hit(step, ctl_phase_steps[static_cast<std::size_t>(i)],
                          ctl_period_steps[static_cast<std::size_t>(i)]))
                continue;
            ++log.controller_checks[static_cast<std::size_t>(i)];
            const auto& l = layout[static_cast<std::size_t>(i)];
            auto& c = ctl[static_cast<std::size_t>(i)];
            const ColVec nu_hat = detail::slice(state, l.nu_off, l.nu_dim);
            const Real y = state(l.x_off);
            const Real e_now = y - exo.output(nu_hat);
            if (petm_b_fire(e_now, c.e_hat_held, s.controller.iota_e)) {
                c.e_hat_held = e_now;
                c.e_hat_event_time = t;
                log.events.push_back({t, i, Channel::petm_b, std::abs(e_now), false, false});
            }
            c.xi_hat = detail::slice(state, l.xi_off, l.xi_dim);
            const ColVec zeta = zeta_hat_cascade(c.xi_hat, s.controller.q);
            const Real omega = control_output(zeta, im,
                                              detail::slice(state, l.eta_off, l.eta_dim),
                                              s.controller);
            if (s.petm_c_enabled) {
                if (petm_c_fire(omega, c.u_actuator, s.controller.iota_omega)) {
                    c.u_actuator = omega;
                    c.u_event_time = t;
                    log.events.push_back({t, i, Channel::petm_c, std::abs(omega), false, false});
                }
            } else {
                c.u_actuator = omega;
            }
        }

        // (4) log
        if (step % decim == 0) {
            log.t.push_back(t);
            const ColVec nu_true = exo.leader_state(t);
            const Real y0 = exo.output(nu_true);
            log.y0.push_back(y0);
            for (Index i = 0; i < n_agents; ++i) {
                const auto& l = layout[static_cast<std::size_t>(i)];
                auto& series = log.agents[static_cast<std::size_t>(i)];
                const Real y = state(l.x_off);
                series.y.push_back(y);
                series.e.push_back(y - y0);
                series.u.push_back(ctl[static_cast<std::size_t>(i)].u_actuator);
                series.nu_err.push_back(
                    (detail::slice(state, l.nu_off, l.nu_dim) - nu_true).norm());
                if (case2)
                    series.a_err.push_back(
                        (detail::slice_matrix(state, l.a_off, nu_dim) - true_a).frobenius_norm());
                series.xi_hat.push_back(detail::slice(state, l.xi_off, l.xi_dim));
            }
        }
    }
    return log;
}

// ---------------------------------------------------------------------------
// Post-processing

/// Least-squares slope of log(values) against time on [t0, t1].
/// Negative slope is exponential-decay evidence.
inline Real fit_exponential_rate(const std::vector<Real>& times, const std::vector<Real>& values,
                                 Real t0, Real t1) {
    if (times.size() != values.size())
        throw DimensionError("fit_exponential_rate: series length mismatch");
    Real sum_t = 0, sum_y = 0, sum_tt = 0, sum_ty = 0;
    long n = 0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] < t0 || times[k] > t1) continue;
        if (!(values[k] > 0))
            throw InputError("fit_exponential_rate: nonpositive value in the fit window");
        const Real y = std::log(values[k]);
        sum_t += times[k];
        sum_y += y;
        sum_tt += times[k] * times[k];
        sum_ty += times[k] * y;
        ++n;
    }
    if (n < 2) throw InputError("fit_exponential_rate: fewer than two samples in the window");
    const Real denom = n * sum_tt - sum_t * sum_t;
    if (denom == 0) throw NumericError("fit_exponential_rate: degenerate time window");
    return (n * sum_ty - sum_t * sum_y) / denom;
}

struct ChannelStats {
    Index agent = 0;  // 0-based
    Channel channel = Channel::observer;
    long events = 0;
    long checks = 0;
    Real period = 0;
    Real min_gap = 0, mean_gap = 0, max_gap = 0;
    bool multiples_ok = true;  // every gap an integer multiple >= 1 of the period
};

inline std::vector<ChannelStats> event_statistics(const SimLog& log) {
    std::vector<ChannelStats> out;
    const Index n_agents = static_cast<Index>(log.agents.size());
    const std::vector<Channel> channels =
        log.petm_c_enabled
            ? std::vector<Channel>{Channel::observer, Channel::petm_b, Channel::petm_c}
            : std::vector<Channel>{Channel::observer, Channel::petm_b};
    for (Index i = 0; i < n_agents; ++i) {
        for (Channel ch : channels) {
            ChannelStats st;
            st.agent = i;
            st.channel = ch;
            st.period = ch == Channel::observer ? log.observer_period[static_cast<std::size_t>(i)]
                                                : log.controller_period[static_cast<std::size_t>(i)];
            const Real phase = ch == Channel::observer
                                   ? log.observer_phase[static_cast<std::size_t>(i)]
                                   : log.controller_phase[static_cast<std::size_t>(i)];
            st.checks = ch == Channel::observer ? log.observer_checks[static_cast<std::size_t>(i)]
                                                : log.controller_checks[static_cast<std::size_t>(i)];
            Real prev = std::numeric_limits<Real>::quiet_NaN();
            std::vector<Real> gaps;
            bool first_from_init = false;
            for (const auto& ev : log.events) {
                if (ev.agent != i || ev.channel != ch) continue;
                ++st.events;
                if (!std::isnan(prev)) {
                    if (gaps.empty()) first_from_init = prev == 0.0 && phase > 0.0;
                    gaps.push_back(ev.t - prev);
                }
                prev = ev.t;
            }
            if (!gaps.empty()) {
                st.min_gap = gaps.front();
                st.max_gap = gaps.front();
                Real sum = 0;
                for (std::size_t k = 0; k < gaps.size(); ++k) {
                    const Real g = gaps[k];
                    st.min_gap = std::min(st.min_gap, g);
                    st.max_gap = std::max(st.max_gap, g);
                    sum += g;
                    // a phased grid starts at `phase`, so the gap from the
                    // t = 0 initialization to the first grid event is
                    // phase + m*period rather than a plain multiple
                    const Real adjusted = (k == 0 && first_from_init) ? g - phase : g;
                    const Real min_mult = (k == 0 && first_from_init) ? 0.0 : 1.0;
                    const Real ratio = adjusted / st.period;
                    const Real rounded = std::round(ratio);
                    if (std::abs(ratio - rounded) > 1e-6 || rounded < min_mult)
                        st.multiples_ok = false;
                }
                st.mean_gap = sum / static_cast<Real>(gaps.size());
            }
            out.push_back(st);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV output (full double precision, 17 significant digits)

namespace detail {
inline void append_real(std::string& out, Real x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out += buf;
}
}  // namespace detail

inline std::string timeseries_csv(const SimLog& log) {
    const Index n = static_cast<Index>(log.agents.size());
    const bool with_a = log.observer_case == 2;
    std::string out = "t,y0";
    for (Index i = 1; i <= n; ++i) out += ",y" + std::to_string(i);
    for (Index i = 1; i <= n; ++i) out += ",e" + std::to_string(i);
    for (Index i = 1; i <= n; ++i) out += ",u" + std::to_string(i);
    for (Index i = 1; i <= n; ++i) out += ",nu_err_" + std::to_string(i);
    if (with_a)
        for (Index i = 1; i <= n; ++i) out += ",A_err_" + std::to_string(i);
    out += "\n";
    for (std::size_t r = 0; r < log.t.size(); ++r) {
        detail::append_real(out, log.t[r]);
        out += ",";
        detail::append_real(out, log.y0[r]);
        auto emit = [&](const std::vector<Real>& v) {
            out += ",";
            detail::append_real(out, v[r]);
        };
        for (Index i = 0; i < n; ++i) emit(log.agents[static_cast<std::size_t>(i)].y);
        for (Index i = 0; i < n; ++i) emit(log.agents[static_cast<std::size_t>(i)].e);
        for (Index i = 0; i < n; ++i) emit(log.agents[static_cast<std::size_t>(i)].u);
        for (Index i = 0; i < n; ++i) emit(log.agents[static_cast<std::size_t>(i)].nu_err);
        if (with_a)
            for (Index i = 0; i < n; ++i) emit(log.agents[static_cast<std::size_t>(i)].a_err);
        out += "\n";
    }
    return out;
}

inline std::string events_csv(const SimLog& log) {
    std::string out = "t,agent,channel,payload_norm\n";
    for (const auto& ev : log.events) {
        detail::append_real(out, ev.t);
        out += "," + std::to_string(ev.agent + 1) + ",";
        out += channel_name(ev.channel);
        out += ",";
        detail::append_real(out, ev.payload_norm);
        out += "\n";
    }
    return out;
}

}  // namespace petreg
