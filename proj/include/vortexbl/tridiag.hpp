#pragma once

/// Thomas solves for the per-line implicit systems.  The factorized form is
/// for the boundary-layer solver, where one matrix serves every column of a
/// time step.

#include <Eigen/Dense>
#include <stdexcept>

namespace vbl {

using Eigen::ArrayXd;

/// Solve the tridiagonal system (sub, diag, sup) x = rhs in place.
/// sub[i] multiplies x[i-1] in row i (sub[0] unused); sup[i] multiplies
/// x[i+1] in row i (sup[n-1] unused).  No pivoting: rows must be safely
/// diagonally dominant, which holds for all systems assembled here.
inline void tridiag_solve(const ArrayXd& sub, const ArrayXd& diag, const ArrayXd& sup,
                          ArrayXd& rhs) {
    const int n = static_cast<int>(diag.size());
    static thread_local ArrayXd cp;
    cp.resize(n);
    double piv = diag[0];
    if (piv == 0.0) throw std::runtime_error("tridiag_solve: zero pivot");
    cp[0] = sup[0] / piv;
    rhs[0] /= piv;
    for (int i = 1; i < n; ++i) {
        piv = diag[i] - sub[i] * cp[i - 1];
        if (piv == 0.0) throw std::runtime_error("tridiag_solve: zero pivot");
        cp[i] = sup[i] / piv;
        rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / piv;
    }
    for (int i = n - 2; i >= 0; --i) rhs[i] -= cp[i] * rhs[i + 1];
}

/// Forward-elimination factors of a fixed tridiagonal matrix, for repeated
/// solves against many right-hand sides.
struct TridiagFactors {
    ArrayXd cp;      ///< modified superdiagonal
    ArrayXd inv_piv; ///< reciprocal pivots
    ArrayXd sub;     ///< original subdiagonal (needed in the rhs sweep)

    void factorize(const ArrayXd& sub_in, const ArrayXd& diag, const ArrayXd& sup) {
        const int n = static_cast<int>(diag.size());
        cp.resize(n);
        inv_piv.resize(n);
        sub = sub_in;
        double piv = diag[0];
        if (piv == 0.0) throw std::runtime_error("TridiagFactors: zero pivot");
        inv_piv[0] = 1.0 / piv;
        cp[0] = sup[0] * inv_piv[0];
        for (int i = 1; i < n; ++i) {
            piv = diag[i] - sub[i] * cp[i - 1];
            if (piv == 0.0) throw std::runtime_error("TridiagFactors: zero pivot");
            inv_piv[i] = 1.0 / piv;
            cp[i] = sup[i] * inv_piv[i];
        }
    }

    /// Solve with a strided right-hand side/solution vector (in place).
    void solve(double* rhs, int stride) const {
        const int n = static_cast<int>(cp.size());
        rhs[0] *= inv_piv[0];
        for (int i = 1; i < n; ++i)
            rhs[i * stride] = (rhs[i * stride] - sub[i] * rhs[(i - 1) * stride]) * inv_piv[i];
        for (int i = n - 2; i >= 0; --i)
            rhs[i * stride] -= cp[i] * rhs[(i + 1) * stride];
    }
};

}  // namespace vbl
