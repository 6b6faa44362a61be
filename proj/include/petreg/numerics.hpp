#pragma once

// Numeric substrate: matrix exponential, Lyapunov/Sylvester solves, stability
// and structure predicates, and a fixed-step RK4 integrator.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "petreg/matrix.hpp"

namespace petreg {

/// Default tolerances for the solvers below; callers may pass their own.
namespace tol {
inline constexpr Real residual = 1e-10;
inline constexpr Real symmetry = 1e-12;
inline constexpr Real singular = 1e-12;
}  // namespace tol

/// e^{At} by scaling-and-squaring with a truncated Taylor series.
/// Scales so the scaled norm is <= 1/4; 16 Taylor terms leave a remainder
/// far below double rounding at that norm.
inline Matrix expm(const Matrix& a, Real t) {
    if (!a.square()) throw DimensionError("expm: square input required");
    if (!a.all_finite() || !std::isfinite(t)) throw InputError("expm: non-finite input");
    const Index n = a.rows();
    Matrix b = a * t;

    Real norm_inf = 0;
    for (Index i = 0; i < n; ++i) {
        Real row = 0;
        for (Index j = 0; j < n; ++j) row += std::abs(b(i, j));
        norm_inf = std::max(norm_inf, row);
    }
    int squarings = 0;
    while (norm_inf > 0.25 && squarings < 64) {
        norm_inf /= 2;
        ++squarings;
    }
    b *= std::ldexp(1.0, -squarings);

    Matrix result = Matrix::identity(n);
    Matrix term = Matrix::identity(n);
    for (int k = 1; k <= 16; ++k) {
        term = term * b;
        term *= 1.0 / k;
        result += term;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

/// All eigenvalues of M strictly in the open left half plane?
/// Characteristic polynomial by Faddeev–LeVerrier, then a Routh array.
inline std::vector<Real> characteristic_polynomial(const Matrix& m) {
    if (!m.square()) throw DimensionError("characteristic_polynomial: square input required");
    const Index n = m.rows();
    // coeffs[k] multiplies s^{n-k}; coeffs[0] = 1
    std::vector<Real> coeffs(static_cast<std::size_t>(n) + 1, 0.0);
    coeffs[0] = 1.0;
    Matrix mk = Matrix::identity(n);
    for (Index k = 1; k <= n; ++k) {
        mk = m * mk;
        Real tr = 0;
        for (Index i = 0; i < n; ++i) tr += mk(i, i);
        coeffs[static_cast<std::size_t>(k)] = -tr / k;
        for (Index i = 0; i < n; ++i) mk(i, i) += coeffs[static_cast<std::size_t>(k)];
    }
    return coeffs;
}

/// Routh–Hurwitz test on descending coefficients {a0, a1, ..., an}, a0 > 0.
/// Strict: roots on the imaginary axis count as unstable.
inline bool polynomial_is_hurwitz(const std::vector<Real>& coeffs) {
    const std::size_t n = coeffs.size();
    if (n < 2) return false;
    Real scale = 0;
    for (Real c : coeffs) scale = std::max(scale, std::abs(c));
    if (scale == 0 || coeffs[0] <= 0) return false;
    const Real eps = 1e-9 * scale;
    for (Real c : coeffs)
        if (c <= eps) return false;  // necessary condition

    // Routh array, two working rows.
    std::vector<Real> top, bot;
    for (std::size_t i = 0; i < n; i += 2) top.push_back(coeffs[i]);
    for (std::size_t i = 1; i < n; i += 2) bot.push_back(coeffs[i]);
    bot.resize(top.size(), 0.0);
    for (std::size_t row = 2; row < n; ++row) {
        if (std::abs(bot[0]) <= eps) return false;
        std::vector<Real> next(top.size(), 0.0);
        for (std::size_t j = 0; j + 1 < top.size(); ++j)
            next[j] = (bot[0] * top[j + 1] - top[0] * bot[j + 1]) / bot[0];
        top = bot;
        bot = next;
        if (bot[0] <= eps) return false;
    }
    return true;
}

inline bool is_hurwitz(const Matrix& m) {
    return polynomial_is_hurwitz(characteristic_polynomial(m));
}

inline bool is_skew_symmetric(const Matrix& a, Real tolerance) {
    if (!a.square()) throw DimensionError("is_skew_symmetric: square input required");
    return (a + a.transpose()).max_abs() <= tolerance;
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
inline std::vector<Real> symmetric_eigenvalues(Matrix s) {
    if (!s.square()) throw DimensionError("symmetric_eigenvalues: square input required");
    const Index n = s.rows();
    const Real scale2 = s.frobenius_norm() * s.frobenius_norm();
    for (int sweep = 0; sweep < 64; ++sweep) {
        Real off = 0;
        for (Index p = 0; p < n; ++p)
            for (Index q = p + 1; q < n; ++q) off += s(p, q) * s(p, q);
        if (off <= 1e-30 * (1.0 + scale2)) break;
        for (Index p = 0; p < n; ++p)
            for (Index q = p + 1; q < n; ++q) {
                if (std::abs(s(p, q)) < 1e-300) continue;
                const Real theta = (s(q, q) - s(p, p)) / (2 * s(p, q));
                const Real sign = theta >= 0 ? 1.0 : -1.0;
                const Real tau = sign / (std::abs(theta) + std::sqrt(theta * theta + 1));
                const Real c = 1 / std::sqrt(tau * tau + 1);
                const Real sn = tau * c;
                for (Index k = 0; k < n; ++k) {
                    const Real skp = s(k, p), skq = s(k, q);
                    s(k, p) = c * skp - sn * skq;
                    s(k, q) = sn * skp + c * skq;
                }
                for (Index k = 0; k < n; ++k) {
                    const Real spk = s(p, k), sqk = s(q, k);
                    s(p, k) = c * spk - sn * sqk;
                    s(q, k) = sn * spk + c * sqk;
                }
            }
    }
    std::vector<Real> eig(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) eig[static_cast<std::size_t>(i)] = s(i, i);
    return eig;
}

/// Spectral norm: sqrt of the largest eigenvalue of AᵀA.
inline Real spectral_norm(const Matrix& a) {
    const Matrix ata = a.transpose() * a;
    Real lmax = 0;
    for (Real l : symmetric_eigenvalues(ata)) lmax = std::max(lmax, l);
    return std::sqrt(std::max(lmax, 0.0));
}

/// Positive definiteness via Cholesky (strict positive pivots).
inline bool is_positive_definite(const Matrix& p) {
    if (!p.square()) throw DimensionError("is_positive_definite: square input required");
    const Index n = p.rows();
    Matrix l(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j <= i; ++j) {
            Real s = p(i, j);
            for (Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (s <= 0) return false;
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return true;
}

/// Solve P H + Hᵀ P = 2 I for symmetric positive-definite P.
/// Requires -H Hurwitz; solved by vectorizing into an n²×n² linear system.
inline Matrix solve_lyapunov_2I(const Matrix& h, Real residual_tol = tol::residual) {
    if (!h.square()) throw DimensionError("solve_lyapunov_2I: square input required");
    const Index n = h.rows();
    Matrix neg_h = h * -1.0;
    if (!is_hurwitz(neg_h))
        throw NumericError("solve_lyapunov_2I: -H is not Hurwitz, no positive definite solution");

    // Unknown vec(P) with k = i + j*n; equation index r likewise.
    Matrix sys(n * n, n * n);
    ColVec rhs(n * n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            const Index r = i + j * n;
            rhs(r) = (i == j) ? 2.0 : 0.0;
            for (Index q = 0; q < n; ++q) sys(r, i + q * n) += h(q, j);  // (PH)(i,j)
            for (Index p = 0; p < n; ++p) sys(r, p + j * n) += h(p, i);  // (HᵀP)(i,j)
        }
    ColVec vec_p = lu_solve(sys, rhs);
    Matrix p(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) p(i, j) = vec_p(i + j * n);
    // symmetrize away rounding
    p = (p + p.transpose()) * 0.5;

    const Real residual = (p * h + h.transpose() * p - Matrix::identity(n) * 2.0).frobenius_norm();
    if (residual > residual_tol) throw NumericError("solve_lyapunov_2I: residual out of tolerance");
    if (!is_positive_definite(p))
        throw NumericError("solve_lyapunov_2I: solution not positive definite");
    return p;
}

/// Solve T Ψ - M T = N Γ for nonsingular T (Ψ, M square with disjoint spectra,
/// N a column, Γ a row).
inline Matrix solve_sylvester(const Matrix& psi, const Matrix& m, const ColVec& n_col,
                              const Matrix& gamma_row, Real residual_tol = tol::residual) {
    if (!psi.square() || !m.square()) throw DimensionError("solve_sylvester: square Psi and M required");
    const Index p = psi.rows();
    const Index q = m.rows();
    if (n_col.dim() != q) throw DimensionError("solve_sylvester: N dimension mismatch");
    if (gamma_row.rows() != 1 || gamma_row.cols() != p)
        throw DimensionError("solve_sylvester: Gamma must be 1 x dim(Psi)");

    // Unknown vec(T) with k = i + j*q, T is q x p.
    Matrix sys(q * p, q * p);
    ColVec rhs(q * p);
    for (Index i = 0; i < q; ++i)
        for (Index j = 0; j < p; ++j) {
            const Index r = i + j * q;
            rhs(r) = n_col(i) * gamma_row(0, j);
            for (Index k = 0; k < p; ++k) sys(r, i + k * q) += psi(k, j);  // (T Psi)(i,j)
            for (Index k = 0; k < q; ++k) sys(r, k + j * q) -= m(i, k);   // (M T)(i,j)
        }
    ColVec vec_t;
    try {
        vec_t = lu_solve(sys, rhs);
    } catch (const NumericError&) {
        throw NumericError("solve_sylvester: singular system (overlapping spectra?)");
    }
    Matrix t(q, p);
    for (Index i = 0; i < q; ++i)
        for (Index j = 0; j < p; ++j) t(i, j) = vec_t(i + j * q);

    Matrix gamma_outer(q, p);
    for (Index i = 0; i < q; ++i)
        for (Index j = 0; j < p; ++j) gamma_outer(i, j) = n_col(i) * gamma_row(0, j);
    const Real residual = (t * psi - m * t - gamma_outer).frobenius_norm();
    if (residual > residual_tol) throw NumericError("solve_sylvester: residual out of tolerance");
    if (q == p && std::abs(determinant(t)) <= tol::singular)
        throw NumericError("solve_sylvester: solution T is singular");
    return t;
}

/// Controllability matrix [N, MN, ..., M^{n-1}N] has full rank?
inline bool is_controllable(const Matrix& m, const ColVec& n_col) {
    if (!m.square()) throw DimensionError("is_controllable: square M required");
    const Index n = m.rows();
    if (n_col.dim() != n) throw DimensionError("is_controllable: N dimension mismatch");
    Matrix ctrb(n, n);
    ColVec col = n_col;
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) ctrb(i, j) = col(i);
        col = m * col;
    }
    // rank by elimination with a relative pivot threshold
    Real scale = ctrb.max_abs();
    if (scale == 0) return false;
    const Real eps = 1e-10 * scale;
    Index rank = 0;
    for (Index c = 0; c < n && rank < n; ++c) {
        Index piv = rank;
        for (Index i = rank + 1; i < n; ++i)
            if (std::abs(ctrb(i, c)) > std::abs(ctrb(piv, c))) piv = i;
        if (std::abs(ctrb(piv, c)) <= eps) continue;
        if (piv != rank)
            for (Index j = 0; j < n; ++j) std::swap(ctrb(rank, j), ctrb(piv, j));
        for (Index i = rank + 1; i < n; ++i) {
            const Real f = ctrb(i, c) / ctrb(rank, c);
            for (Index j = c; j < n; ++j) ctrb(i, j) -= f * ctrb(rank, j);
        }
        ++rank;
    }
    return rank == n;
}

/// One classical RK4 step for x' = f(t, x).
template <typename F>
ColVec rk4_step(F&& f, const ColVec& x, Real t, Real h) {
    if (!(h > 0)) throw InputError("rk4_step: step size must be positive");
    const ColVec k1 = f(t, x);
    const ColVec k2 = f(t + h / 2, x + k1 * (h / 2));
    const ColVec k3 = f(t + h / 2, x + k2 * (h / 2));
    const ColVec k4 = f(t + h, x + k3 * h);
    ColVec out = x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6);
    if (!out.all_finite()) throw DivergenceError("rk4_step: non-finite state", t + h);
    return out;
}

}  // namespace petreg
