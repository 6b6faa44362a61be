#pragma once

// Follower dynamics: the generic strict-feedback interface and the
// four-parameter-family Lorenz instantiation used by the benchmark.

#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "petreg/matrix.hpp"

namespace petreg {

struct PlantDerivative {
    ColVec z_dot;
    ColVec x_dot;
};

/// z' = f0(z, x1, nu, w); x_j' = f_j(z, x_1..j, nu, w) + b_j x_{j+1};
/// x_n' = f_n(...) + b_n u; y = x_1. The callback evaluates the whole
/// right-hand side; w is baked into the callback.
struct StrictFeedbackPlant {
    Index order = 0;    // n
    Index z_dim = 0;    // n_z
    Index nu_dim = 2;   // dimension of the exosystem state the rhs expects
    std::function<PlantDerivative(const ColVec& z, const ColVec& x, const ColVec& nu, Real u)> rhs;

    [[nodiscard]] Real output(const ColVec& x) const { return x(0); }
};

struct LorenzParams {
    Real g1 = -10.0;
    Real g2 = 10.0;
    Real g3 = -8.0 / 3.0;
    Real g4 = 1.0;
    Real g5 = 0.0;
    Real g6 = 0.2;
    Real g7 = 1.0;  // the benchmark family leaves g7 free; default documented in README
};

/// z1' = g1 z1 + g2 x1;  z2' = g3 z2 + z1 x1;
/// x1' = g4 z1 + g5 x1 - z1 z2 + x2;  x2' = g6 z1 + g7 z2 x1 + u.
inline PlantDerivative lorenz_rhs(const ColVec& z, const ColVec& x, Real u,
                                  const LorenzParams& p) {
    if (z.dim() != 2 || x.dim() != 2) throw DimensionError("lorenz_rhs: state dims must be 2+2");
    PlantDerivative d{ColVec(2), ColVec(2)};
    d.z_dot(0) = p.g1 * z(0) + p.g2 * x(0);
    d.z_dot(1) = p.g3 * z(1) + z(0) * x(0);
    d.x_dot(0) = p.g4 * z(0) + p.g5 * x(0) - z(0) * z(1) + x(1);
    d.x_dot(1) = p.g6 * z(0) + p.g7 * z(1) * x(0) + u;
    if (!d.z_dot.all_finite() || !d.x_dot.all_finite())
        throw DivergenceError("lorenz_rhs: non-finite derivative",
                              std::numeric_limits<Real>::quiet_NaN());
    return d;
}

inline StrictFeedbackPlant make_lorenz_plant(const LorenzParams& p) {
    StrictFeedbackPlant plant;
    plant.order = 2;
    plant.z_dim = 2;
    plant.rhs = [p](const ColVec& z, const ColVec& x, const ColVec&, Real u) {
        return lorenz_rhs(z, x, u, p);
    };
    return plant;
}

struct PlantProbe {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct PlantReport {
    std::vector<PlantProbe> probes;
    [[nodiscard]] bool all_passed() const {
        for (const auto& p : probes)
            if (!p.passed) return false;
        return true;
    }
};

/// Structural probes: equilibrium at the origin, control entering only the
/// last channel, and affinity in u (three-point curvature check). Advisory
/// only; never blocks a run.
inline PlantReport validate_plant(const StrictFeedbackPlant& plant) {
    PlantReport report;
    const ColVec z0(plant.z_dim), x0(plant.order), nu0(plant.nu_dim);

    {
        PlantProbe probe{"equilibrium_at_origin", false, ""};
        const PlantDerivative d = plant.rhs(z0, x0, nu0, 0.0);
        Real mag = 0;
        for (Index i = 0; i < plant.z_dim; ++i) mag = std::max(mag, std::abs(d.z_dot(i)));
        for (Index i = 0; i < plant.order; ++i) mag = std::max(mag, std::abs(d.x_dot(i)));
        probe.passed = mag < 1e-12;
        if (!probe.passed) probe.detail = "rhs(0,...,0,0) is nonzero";
        report.probes.push_back(probe);
    }

    // probe at a few pseudo-random states, u in {-1, 0, 1}
    std::vector<std::pair<ColVec, ColVec>> states;
    unsigned seed = 0x9e3779b9u;
    auto next = [&seed] {
        seed = seed * 1664525u + 1013904223u;
        return static_cast<Real>(seed) / 4294967296.0 - 0.5;
    };
    for (int k = 0; k < 5; ++k) {
        ColVec z(plant.z_dim), x(plant.order);
        for (Index i = 0; i < plant.z_dim; ++i) z(i) = next();
        for (Index i = 0; i < plant.order; ++i) x(i) = next();
        states.emplace_back(z, x);
    }

    {
        PlantProbe probe{"control_enters_last_channel_only", true, ""};
        for (const auto& [z, x] : states) {
            const PlantDerivative d0 = plant.rhs(z, x, nu0, 0.0);
            const PlantDerivative d1 = plant.rhs(z, x, nu0, 1.0);
            for (Index i = 0; i < plant.z_dim; ++i)
                if (std::abs(d1.z_dot(i) - d0.z_dot(i)) > 1e-12) probe.passed = false;
            for (Index i = 0; i + 1 < plant.order; ++i)
                if (std::abs(d1.x_dot(i) - d0.x_dot(i)) > 1e-12) probe.passed = false;
            if (d1.x_dot(plant.order - 1) - d0.x_dot(plant.order - 1) <= 0) {
                probe.passed = false;
                probe.detail = "b_n must be positive";
            }
        }
        report.probes.push_back(probe);
    }

    {
        PlantProbe probe{"affine_in_u", true, ""};
        for (const auto& [z, x] : states) {
            const Real f_minus = plant.rhs(z, x, nu0, -1.0).x_dot(plant.order - 1);
            const Real f_zero = plant.rhs(z, x, nu0, 0.0).x_dot(plant.order - 1);
            const Real f_plus = plant.rhs(z, x, nu0, 1.0).x_dot(plant.order - 1);
            // second difference vanishes iff no curvature in u
            if (std::abs(f_plus - 2 * f_zero + f_minus) > 1e-9) {
                probe.passed = false;
                probe.detail = "last-channel rhs is not affine in u";
            }
        }
        report.probes.push_back(probe);
    }

    return report;
}

}  // namespace petreg
