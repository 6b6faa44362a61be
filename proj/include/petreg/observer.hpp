#pragma once

// Per-agent PET distributed leader observers.
//
// Case 1: the leader matrix A is known everywhere; each agent integrates
//   nu_hat' = A nu_hat + mu2 * sum_j a_ij (nubar_j - nubar_i)
// where nubar_j(t) propagates neighbour j's last broadcast in closed form.
//
// Case 2: A is known only through the pinned channels; each agent also runs
//   A_hat' = mu1 * sum_j a_ij (A_hat_j(held) - A_hat_i(held))
// and its nu_hat dynamics use the held A_hat of the last own broadcast.
//
// Triggers are checked only on the agent's own sampling grid; between grid
// points everything evolves continuously.

#include <cmath>
#include <utility>
#include <vector>

#include "petreg/numerics.hpp"

namespace petreg {

struct ObserverParams {
    Real mu1 = 2.0;
    Real mu2 = 2.0;
    Real iota_a = 0.01;
    Real gamma_a = 0.2;
    Real iota_nu = 0.01;
    Real gamma_nu = 0.2;

    void validate() const {
        if (!(mu1 > 0 && mu2 > 0 && iota_a > 0 && gamma_a > 0 && iota_nu > 0 && gamma_nu > 0))
            throw InputError("ObserverParams: all parameters must be positive");
    }
};

/// Uniform sampling grid t_k = phase + k * period.
struct SamplingGrid {
    Real period = 0.01;
    Real phase = 0.0;

    void validate() const {
        if (!(period > 0)) throw InputError("SamplingGrid: period must be positive");
        if (phase < 0) throw InputError("SamplingGrid: phase must be nonnegative");
    }
};

/// What an agent last put on the wire: event time plus held payload.
struct BroadcastRecord {
    Real event_time = 0.0;
    ColVec nu_hat;    // nu_hat at the event
    Matrix a_hat;     // A_hat at the event (the true A in Case 1)
};

/// nubar(t) = e^{A_used (t - event_time)} nu_hat(event_time).
inline ColVec predict_broadcast(const BroadcastRecord& record, const Matrix& a_used, Real t) {
    if (t < record.event_time)
        throw InputError("predict_broadcast: query before the recorded event");
    return expm(a_used, t - record.event_time) * record.nu_hat;
}

inline ColVec predict_broadcast(const BroadcastRecord& record, Real t) {
    return predict_broadcast(record, record.a_hat, t);
}

/// Case-1 right-hand side: A nu_hat + mu2 * sum (nubar_j - nubar_i).
/// `neighbor_predictions` carries one entry per in-neighbour with a_ij = 1
/// (the leader's exact nu(t) included when pinned).
inline ColVec observer_rhs_case1(const Matrix& a, const ColVec& nu_hat,
                                 const ColVec& own_prediction,
                                 const std::vector<ColVec>& neighbor_predictions, Real mu2) {
    ColVec coupling(nu_hat.dim());
    for (const ColVec& pred : neighbor_predictions) coupling += pred - own_prediction;
    return a * nu_hat + coupling * mu2;
}

/// Case-2 right-hand side. The nu_hat drift uses the *held* A_hat of the
/// agent's own last broadcast, not the current estimate.
struct ObserverDerivative {
    Matrix a_hat_dot;
    ColVec nu_hat_dot;
};

inline ObserverDerivative observer_rhs_case2(const Matrix& a_hat_held, const ColVec& nu_hat,
                                             const ColVec& own_prediction,
                                             const std::vector<ColVec>& neighbor_predictions,
                                             const std::vector<Matrix>& neighbor_a_held,
                                             Real mu1, Real mu2) {
    const Index n = a_hat_held.rows();
    Matrix a_coupling(n, n);
    for (const Matrix& a_j : neighbor_a_held) a_coupling += a_j - a_hat_held;
    ColVec coupling(nu_hat.dim());
    for (const ColVec& pred : neighbor_predictions) coupling += pred - own_prediction;
    return {a_coupling * mu1, a_hat_held * nu_hat + coupling * mu2};
}

/// PETM-A: fire iff ||nu_hat(tau) - nubar(tau)|| exceeds iota_nu e^{-gamma_nu tau}.
/// Strict inequality: exact equality does not fire.
inline bool petm_a_fire(const ColVec& nu_hat_now, const ColVec& prediction_now, Real tau,
                        const ObserverParams& p) {
    return (nu_hat_now - prediction_now).norm() > p.iota_nu * std::exp(-p.gamma_nu * tau);
}

/// Case-2 trigger: fire when either the A-deviation or the nu-deviation
/// exceeds its threshold. Both conditions are reported for logging.
struct Case2Fire {
    bool by_a = false;
    bool by_nu = false;
    [[nodiscard]] bool fired() const { return by_a || by_nu; }
};

inline Case2Fire petm_case2_fire(const Matrix& a_hat_now, const Matrix& a_hat_held,
                                 const ColVec& nu_hat_now, const ColVec& prediction_now,
                                 Real tau, const ObserverParams& p) {
    Case2Fire f;
    f.by_a = spectral_norm(a_hat_now - a_hat_held) > p.iota_a * std::exp(-p.gamma_a * tau);
    f.by_nu = (nu_hat_now - prediction_now).norm() > p.iota_nu * std::exp(-p.gamma_nu * tau);
    return f;
}

/// Constructive sampling-period bound for the Case-1 observer:
///   T < min{ 1/(6 mu ||H||^2) - gamma ||P|| / (3 mu^2 ||H||^2),
///            1/(mu ||PH|| + 3 mu^2 ||PH|| + gamma) }
/// with P solving P H + H^T P = 2I. May come out nonpositive; the parameters
/// then admit no guarantee and `feasible` is false.
struct SamplingBound {
    Real value = 0.0;
    bool feasible = false;
    Real term_state = 0.0;  // first min argument
    Real term_delay = 0.0;  // second min argument
};

inline SamplingBound sampling_period_bound(Real mu2, Real gamma_nu, const Matrix& h) {
    if (!(mu2 > 0) || !(gamma_nu > 0))
        throw InputError("sampling_period_bound: mu2 and gamma_nu must be positive");
    const Matrix p = solve_lyapunov_2I(h);
    const Real nh = spectral_norm(h);
    const Real np = spectral_norm(p);
    const Real nph = spectral_norm(p * h);
    SamplingBound b;
    b.term_state = 1.0 / (6 * mu2 * nh * nh) - gamma_nu * np / (3 * mu2 * mu2 * nh * nh);
    b.term_delay = 1.0 / (mu2 * nph + 3 * mu2 * mu2 * nph + gamma_nu);
    b.value = std::min(b.term_state, b.term_delay);
    b.feasible = b.value > 0;
    return b;
}

}  // namespace petreg
