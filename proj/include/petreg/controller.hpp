#pragma once

// Per-agent output-feedback stack: PET high-gain observer, backstepping
// coordinate cascade, saturated control law, and the two controller-side
// PET mechanisms (sensor-to-controller PETM-B, controller-to-actuator
// PETM-C).

#include <cmath>
#include <vector>

#include "petreg/internal_model.hpp"
#include "petreg/matrix.hpp"

namespace petreg {

struct ControllerParams {
    Real gamma_hgo = 40.0;       // high-gain parameter, >= 1
    std::vector<Real> d;         // d_1..d_n, coefficients of a Hurwitz polynomial
    Real b_hat = 1.0;            // control-coefficient estimate b_hat_n
    std::vector<Real> q;         // Q_1..Q_{n-1} backstepping gains
    Real k = 30.0;               // feedback gain K (enters as -K zeta_hat_n)
    Real sat_level = 30.0;       // saturation bound R on the feedback part
    Real iota_e = 0.1;           // PETM-B relative threshold
    Real iota_omega = 0.0;       // PETM-C relative threshold

    [[nodiscard]] Index order() const { return static_cast<Index>(d.size()); }

    void validate() const {
        if (d.empty()) throw InputError("ControllerParams: d must have length n >= 1");
        if (static_cast<Index>(q.size()) + 1 < order())
            throw InputError("ControllerParams: need n-1 backstepping gains");
        if (!(gamma_hgo >= 1)) throw InputError("ControllerParams: gamma_hgo must be >= 1");
        if (!(b_hat > 0) || !(k > 0) || !(sat_level > 0))
            throw InputError("ControllerParams: gains must be positive");
        if (iota_e < 0 || iota_omega < 0)
            throw InputError("ControllerParams: trigger thresholds must be nonnegative");
        for (Real di : d)
            if (!(di > 0)) throw InputError("ControllerParams: d coefficients must be positive");
        for (Real qi : q)
            if (!(qi > 0)) throw InputError("ControllerParams: Q gains must be positive");
        // s^n + d1 s^{n-1} + ... + dn must be Hurwitz
        std::vector<Real> coeffs;
        coeffs.reserve(d.size() + 1);
        coeffs.push_back(1.0);
        coeffs.insert(coeffs.end(), d.begin(), d.end());
        if (!polynomial_is_hurwitz(coeffs))
            throw InputError("ControllerParams: d is not a Hurwitz polynomial");
    }
};

/// Held discrete values of one agent's controller channels.
struct ControllerState {
    ColVec xi_hat;            // high-gain observer state, length n
    Real e_hat_held = 0.0;    // PETM-B payload
    Real e_hat_event_time = 0.0;
    Real u_actuator = 0.0;    // value currently applied by the actuator
    Real u_event_time = 0.0;  // last PETM-C transmission instant
};

inline Real saturate(Real x, Real level) {
    if (x > level) return level;
    if (x < -level) return -level;
    return x;
}

/// Surrogate regulation error: measured output minus the leader output
/// reconstructed from the distributed-observer estimate.
template <typename OutputMap>
Real e_hat(Real y, const ColVec& nu_hat, OutputMap&& q0) {
    return y - q0(nu_hat);
}

/// PETM-B: fire iff |e_hat_now - e_hat_held| > iota_e |e_hat_now| (strict).
inline bool petm_b_fire(Real e_hat_now, Real e_hat_held, Real iota_e) {
    return std::abs(e_hat_now - e_hat_held) > iota_e * std::abs(e_hat_now);
}

/// PETM-C: fire iff |omega_now - omega_held| > iota_omega |omega_now| (strict).
inline bool petm_c_fire(Real omega_now, Real omega_held, Real iota_omega) {
    return std::abs(omega_now - omega_held) > iota_omega * std::abs(omega_now);
}

/// High-gain observer derivative, driven by the *held* e_hat:
///   xi_j' = xi_{j+1} + Gamma^j d_j (e_held - xi_1),   j < n
///   xi_n' = b_hat u_bar + Gamma^n d_n (e_held - xi_1)
inline ColVec hgo_rhs(const ColVec& xi_hat, Real e_hat_held, Real u_bar,
                      const ControllerParams& p) {
    const Index n = p.order();
    if (xi_hat.dim() != n) throw DimensionError("hgo_rhs: xi_hat length mismatch");
    const Real innovation = e_hat_held - xi_hat(0);
    ColVec dot(n);
    Real gain = 1.0;
    for (Index j = 0; j < n; ++j) {
        gain *= p.gamma_hgo;
        dot(j) = gain * p.d[static_cast<std::size_t>(j)] * innovation;
        if (j + 1 < n) dot(j) += xi_hat(j + 1);
    }
    dot(n - 1) += p.b_hat * u_bar;
    return dot;
}

/// Backstepping coordinates from the observer state:
///   zeta_1 = xi_1;  zeta_j = xi_j - alpha_{j-1};  alpha_j = -Q_j zeta_j.
inline ColVec zeta_hat_cascade(const ColVec& xi_hat, const std::vector<Real>& q) {
    const Index n = xi_hat.dim();
    if (static_cast<Index>(q.size()) + 1 < n)
        throw DimensionError("zeta_hat_cascade: need n-1 gains");
    ColVec zeta(n);
    zeta(0) = xi_hat(0);
    for (Index j = 1; j < n; ++j) {
        const Real alpha_prev = -q[static_cast<std::size_t>(j - 1)] * zeta(j - 1);
        zeta(j) = xi_hat(j) - alpha_prev;
    }
    return zeta;
}

/// Control effort u = sat_R(-K zeta_n) + Phi eta. The stabilizing part is
/// negative feedback on the top backstepping coordinate; the compensator
/// readout supplies the steady-state control outside the saturation.
inline Real control_output(const ColVec& zeta_hat, const InternalModel& im, const ColVec& eta,
                           const ControllerParams& p) {
    const Real feedback = saturate(-p.k * zeta_hat(zeta_hat.dim() - 1), p.sat_level);
    return feedback + im.readout(eta);
}

}  // namespace petreg
