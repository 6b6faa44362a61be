#pragma once

// Internal-model compensator eta' = M eta + N u with steady-state read-out
// row Phi. Phi is either supplied directly or derived from a steady-state
// mode matrix Psi through the Sylvester relation T Psi - M T = N Gamma,
// Phi = Gamma T^{-1}.

#include <optional>
#include <utility>
#include <vector>

#include "petreg/numerics.hpp"

namespace petreg {

/// Companion matrix of the monic polynomial s^n + a_{n-1} s^{n-1} + ... + a_0,
/// with N the last unit vector. `ascending` lists a_0 ... a_{n-1}.
/// (M, N) is controllable by construction.
inline std::pair<Matrix, ColVec> companion_from_poly(const std::vector<Real>& ascending) {
    const Index n = static_cast<Index>(ascending.size());
    if (n < 1) throw InputError("companion_from_poly: degree must be >= 1");
    Matrix m(n, n);
    for (Index i = 0; i + 1 < n; ++i) m(i, i + 1) = 1.0;
    for (Index j = 0; j < n; ++j) m(n - 1, j) = -ascending[static_cast<std::size_t>(j)];
    ColVec n_col(n);
    n_col(n - 1) = 1.0;
    return {m, n_col};
}

/// Descending coefficient list {1, a_{n-1}, ..., a_0} of the same polynomial.
inline std::vector<Real> monic_descending(const std::vector<Real>& ascending) {
    std::vector<Real> out;
    out.reserve(ascending.size() + 1);
    out.push_back(1.0);
    for (auto it = ascending.rbegin(); it != ascending.rend(); ++it) out.push_back(*it);
    return out;
}

class InternalModel {
public:
    /// Phi computed as Gamma T^{-1} from the Sylvester relation.
    InternalModel(Matrix m, ColVec n_col, const Matrix& psi)
        : m_(std::move(m)), n_(std::move(n_col)), eta_(m_.rows()) {
        check_pair();
        Matrix gamma(1, psi.cols());
        gamma(0, 0) = 1.0;
        const Matrix t = solve_sylvester(psi, m_, n_, gamma);
        phi_ = gamma * inverse(t);
    }

    /// Phi supplied directly (row vector of length dim).
    InternalModel(Matrix m, ColVec n_col, ColVec phi_row)
        : m_(std::move(m)), n_(std::move(n_col)), eta_(m_.rows()) {
        check_pair();
        if (phi_row.dim() != m_.rows()) throw DimensionError("InternalModel: Phi length");
        phi_ = Matrix(1, m_.rows());
        for (Index j = 0; j < m_.rows(); ++j) phi_(0, j) = phi_row(j);
    }

    [[nodiscard]] Index dim() const { return m_.rows(); }
    [[nodiscard]] const Matrix& m() const { return m_; }
    [[nodiscard]] const ColVec& n() const { return n_; }
    [[nodiscard]] const Matrix& phi_row() const { return phi_; }

    [[nodiscard]] const ColVec& eta() const { return eta_; }
    void set_eta(ColVec eta) {
        if (eta.dim() != dim()) throw DimensionError("InternalModel: eta dimension");
        eta_ = std::move(eta);
    }

    /// eta' = M eta + N u for the given state.
    [[nodiscard]] ColVec rhs(const ColVec& eta, Real drive) const {
        if (!std::isfinite(drive)) throw InputError("InternalModel: non-finite drive");
        return m_ * eta + n_ * drive;
    }
    [[nodiscard]] ColVec rhs(Real drive) const { return rhs(eta_, drive); }

    /// Phi . eta, the steady-state control reproduced by the compensator.
    [[nodiscard]] Real readout(const ColVec& eta) const {
        Real s = 0;
        for (Index j = 0; j < dim(); ++j) s += phi_(0, j) * eta(j);
        return s;
    }
    [[nodiscard]] Real readout() const { return readout(eta_); }

private:
    void check_pair() const {
        if (!is_hurwitz(m_)) throw InputError("InternalModel: M must be Hurwitz");
        if (!is_controllable(m_, n_)) throw InputError("InternalModel: (M, N) not controllable");
    }

    Matrix m_;
    ColVec n_;
    Matrix phi_;  // 1 x dim
    ColVec eta_;
};

/// Free-function form of the compensator dynamics.
inline ColVec compensator_rhs(const InternalModel& im, Real drive) { return im.rhs(drive); }

}  // namespace petreg
