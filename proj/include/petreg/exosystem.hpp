#pragma once

// The leader: nu' = A nu with output y0 = q0(nu), propagated in closed form.

#include <functional>
#include <utility>

#include "petreg/numerics.hpp"

namespace petreg {

class Exosystem {
public:
    /// Linear output map y0 = c0 . nu (the benchmark uses [1 0]).
    Exosystem(Matrix a, ColVec nu0, ColVec c0)
        : a_(std::move(a)), nu0_(std::move(nu0)), c0_(std::move(c0)) {
        check();
        if (c0_.dim() != a_.rows()) throw DimensionError("Exosystem: output row dimension");
    }

    /// Pluggable smooth output map; must satisfy q0(0) = 0.
    Exosystem(Matrix a, ColVec nu0, std::function<Real(const ColVec&)> q0)
        : a_(std::move(a)), nu0_(std::move(nu0)), q0_(std::move(q0)) {
        check();
        if (std::abs(q0_(ColVec(a_.rows()))) > 1e-12)
            throw InputError("Exosystem: q0(0) must be 0");
    }

    [[nodiscard]] const Matrix& a() const { return a_; }
    [[nodiscard]] const ColVec& nu0() const { return nu0_; }
    [[nodiscard]] Index dim() const { return a_.rows(); }

    [[nodiscard]] ColVec leader_state(Real t) const { return expm(a_, t) * nu0_; }

    [[nodiscard]] Real output(const ColVec& nu) const {
        if (q0_) return q0_(nu);
        return c0_.dot(nu);
    }

    [[nodiscard]] Real leader_output(Real t) const { return output(leader_state(t)); }

private:
    void check() const {
        if (!is_skew_symmetric(a_, 1e-12))
            throw InputError("Exosystem: A must be skew-symmetric");
        if (nu0_.dim() != a_.rows()) throw DimensionError("Exosystem: nu0 dimension");
    }

    Matrix a_;
    ColVec nu0_;
    ColVec c0_;
    std::function<Real(const ColVec&)> q0_;
};

}  // namespace petreg
