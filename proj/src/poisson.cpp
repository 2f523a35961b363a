#include "vortexbl/poisson.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "vortexbl/tridiag.hpp"

namespace vbl {

namespace {

bool is_pow2_plus_1(int n) {
    if (n < 5) return false;
    const int m = n - 1;
    return (m & (m - 1)) == 0;
}

double interior_norm(const ArrayXXd& a) {
    // Boundary entries of residual arrays are kept at zero.
    return std::sqrt((a * a).sum());
}

}  // namespace

void StencilOperator::residual(const ArrayXXd& u, const ArrayXXd& f, ArrayXXd& r) const {
    r.setZero(ny, nx);
    for (int i = 1; i + 1 < nx; ++i)
        for (int j = 1; j + 1 < ny; ++j)
            r(j, i) = f(j, i) - (cw(j, i) * u(j, i - 1) + ce(j, i) * u(j, i + 1) +
                                 cs(j, i) * u(j - 1, i) + cn(j, i) * u(j + 1, i) +
                                 cc(j, i) * u(j, i));
}

void StencilOperator::apply(const ArrayXXd& u, ArrayXXd& out) const {
    out.setZero(ny, nx);
    for (int i = 1; i + 1 < nx; ++i)
        for (int j = 1; j + 1 < ny; ++j)
            out(j, i) = cw(j, i) * u(j, i - 1) + ce(j, i) * u(j, i + 1) +
                        cs(j, i) * u(j - 1, i) + cn(j, i) * u(j + 1, i) +
                        cc(j, i) * u(j, i);
}

double StencilOperator::dominance_margin() const {
    double worst = 1.0;
    for (int i = 1; i + 1 < nx; ++i)
        for (int j = 1; j + 1 < ny; ++j) {
            const double off = std::abs(cw(j, i)) + std::abs(ce(j, i)) +
                               std::abs(cs(j, i)) + std::abs(cn(j, i));
            worst = std::min(worst, (std::abs(cc(j, i)) - off) / std::abs(cc(j, i)));
        }
    return worst;
}

StencilOperator assemble_operator(const MappedAxis& ax, const MappedAxis& ay) {
    StencilOperator op;
    op.nx = ax.n();
    op.ny = ay.n();
    op.cc.setZero(op.ny, op.nx);
    op.cw.setZero(op.ny, op.nx);
    op.ce.setZero(op.ny, op.nx);
    op.cs.setZero(op.ny, op.nx);
    op.cn.setZero(op.ny, op.nx);
    const double hx = ax.dcomp, hy = ay.dcomp;
    for (int i = 1; i + 1 < op.nx; ++i) {
        const double aw = 0.5 * (ax.d1[i - 1] + ax.d1[i]) * ax.d1[i] / (hx * hx);
        const double ae = 0.5 * (ax.d1[i + 1] + ax.d1[i]) * ax.d1[i] / (hx * hx);
        for (int j = 1; j + 1 < op.ny; ++j) {
            const double as = 0.5 * (ay.d1[j - 1] + ay.d1[j]) * ay.d1[j] / (hy * hy);
            const double an = 0.5 * (ay.d1[j + 1] + ay.d1[j]) * ay.d1[j] / (hy * hy);
            op.cw(j, i) = aw;
            op.ce(j, i) = ae;
            op.cs(j, i) = as;
            op.cn(j, i) = an;
            op.cc(j, i) = -(aw + ae + as + an);
        }
    }
    return op;
}

void gauss_seidel_rb(const StencilOperator& op, const ArrayXXd& f, ArrayXXd& u, int sweeps) {
    for (int s = 0; s < sweeps; ++s)
        for (int color = 0; color < 2; ++color)
            for (int i = 1; i + 1 < op.nx; ++i) {
                int j = 1 + ((i + 1 + color) & 1);
                for (; j + 1 < op.ny; j += 2)
                    u(j, i) = (f(j, i) - op.cw(j, i) * u(j, i - 1) - op.ce(j, i) * u(j, i + 1) -
                               op.cs(j, i) * u(j - 1, i) - op.cn(j, i) * u(j + 1, i)) /
                              op.cc(j, i);
            }
}

void zebra_line_relax(const StencilOperator& op, const ArrayXXd& f, ArrayXXd& u, int sweeps) {
    const int nx = op.nx, ny = op.ny;
    const int mx = nx - 2, my = ny - 2;
    static thread_local ArrayXd sub, diag, sup, rhs;
    for (int s = 0; s < sweeps; ++s) {
        sub.resize(mx), diag.resize(mx), sup.resize(mx), rhs.resize(mx);
        for (int parity = 0; parity < 2; ++parity)
            for (int j = 1 + parity; j + 1 < ny; j += 2) {
                for (int i = 1; i + 1 < nx; ++i) {
                    sub[i - 1] = op.cw(j, i);
                    diag[i - 1] = op.cc(j, i);
                    sup[i - 1] = op.ce(j, i);
                    rhs[i - 1] = f(j, i) - op.cs(j, i) * u(j - 1, i) - op.cn(j, i) * u(j + 1, i);
                }
                rhs[0] -= op.cw(j, 1) * u(j, 0);
                rhs[mx - 1] -= op.ce(j, nx - 2) * u(j, nx - 1);
                tridiag_solve(sub, diag, sup, rhs);
                for (int i = 1; i + 1 < nx; ++i) u(j, i) = rhs[i - 1];
            }
        sub.resize(my), diag.resize(my), sup.resize(my), rhs.resize(my);
        for (int parity = 0; parity < 2; ++parity)
            for (int i = 1 + parity; i + 1 < nx; i += 2) {
                for (int j = 1; j + 1 < ny; ++j) {
                    sub[j - 1] = op.cs(j, i);
                    diag[j - 1] = op.cc(j, i);
                    sup[j - 1] = op.cn(j, i);
                    rhs[j - 1] = f(j, i) - op.cw(j, i) * u(j, i - 1) - op.ce(j, i) * u(j, i + 1);
                }
                rhs[0] -= op.cs(1, i) * u(0, i);
                rhs[my - 1] -= op.cn(ny - 2, i) * u(ny - 1, i);
                tridiag_solve(sub, diag, sup, rhs);
                for (int j = 1; j + 1 < ny; ++j) u(j, i) = rhs[j - 1];
            }
    }
}

Multigrid::Multigrid(const MappedAxis& ax, const MappedAxis& ay,
                     int pre_sweeps, int post_sweeps)
    : pre_sweeps_(pre_sweeps), post_sweeps_(post_sweeps) {
    if (!is_pow2_plus_1(ax.n()) || !is_pow2_plus_1(ay.n()))
        throw std::invalid_argument(
            "Multigrid: node counts must be 2^k + 1 per side (5, 9, 17, 33, 65, 129, 257, "
            "513, 1025, ...), got " + std::to_string(ax.n()) + " x " + std::to_string(ay.n()));

    Level lev;
    lev.ax = ax;
    lev.ay = ay;
    levels_.push_back(std::move(lev));
    while (std::min(levels_.back().ax.n(), levels_.back().ay.n()) > 5) {
        Level next;
        next.ax = coarsen_axis(levels_.back().ax);
        next.ay = coarsen_axis(levels_.back().ay);
        levels_.push_back(std::move(next));
    }
    for (Level& l : levels_) {
        l.op = assemble_operator(l.ax, l.ay);
        l.u.setZero(l.ay.n(), l.ax.n());
        l.f.setZero(l.ay.n(), l.ax.n());
        l.r.setZero(l.ay.n(), l.ax.n());
    }

    // Dense factorization of the coarsest interior system.
    const Level& c = levels_.back();
    const int mx = c.ax.n() - 2, my = c.ay.n() - 2;
    const int m = mx * my;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
    auto idx = [my](int j, int i) { return (i - 1) * my + (j - 1); };
    for (int i = 1; i <= mx; ++i)
        for (int j = 1; j <= my; ++j) {
            const int row = idx(j, i);
            A(row, row) = c.op.cc(j, i);
            if (i > 1) A(row, idx(j, i - 1)) = c.op.cw(j, i);
            if (i < mx) A(row, idx(j, i + 1)) = c.op.ce(j, i);
            if (j > 1) A(row, idx(j - 1, i)) = c.op.cs(j, i);
            if (j < my) A(row, idx(j + 1, i)) = c.op.cn(j, i);
        }
    coarse_lu_.compute(A);
}

void Multigrid::coarse_correct(Level& lev) {
    // Exact interior correction: solve A e = (f - A u), u += e.  Handles
    // nonzero Dirichlet data when the coarsest level is also the finest.
    lev.op.residual(lev.u, lev.f, lev.r);
    const int mx = lev.ax.n() - 2, my = lev.ay.n() - 2;
    Eigen::VectorXd rhs(mx * my);
    for (int i = 1; i <= mx; ++i)
        for (int j = 1; j <= my; ++j) rhs((i - 1) * my + (j - 1)) = lev.r(j, i);
    const Eigen::VectorXd e = coarse_lu_.solve(rhs);
    for (int i = 1; i <= mx; ++i)
        for (int j = 1; j <= my; ++j) lev.u(j, i) += e((i - 1) * my + (j - 1));
}

void Multigrid::cycle(int l) {
    Level& lev = levels_[l];
    if (l + 1 == static_cast<int>(levels_.size())) {
        coarse_correct(lev);
        return;
    }
    Level& crs = levels_[l + 1];
    zebra_line_relax(lev.op, lev.f, lev.u, pre_sweeps_);
    lev.op.residual(lev.u, lev.f, lev.r);

    // Full-weighting restriction of the residual; coarse boundary stays 0.
    crs.f.setZero();
    for (int I = 1; I + 1 < crs.ax.n(); ++I)
        for (int J = 1; J + 1 < crs.ay.n(); ++J) {
            const int i = 2 * I, j = 2 * J;
            crs.f(J, I) = (4.0 * lev.r(j, i) +
                           2.0 * (lev.r(j, i - 1) + lev.r(j, i + 1) +
                                  lev.r(j - 1, i) + lev.r(j + 1, i)) +
                           lev.r(j - 1, i - 1) + lev.r(j - 1, i + 1) +
                           lev.r(j + 1, i - 1) + lev.r(j + 1, i + 1)) / 16.0;
        }
    crs.u.setZero();
    cycle(l + 1);

    // Bilinear prolongation of the coarse correction.
    for (int I = 0; I < crs.ax.n(); ++I)
        for (int J = 0; J < crs.ay.n(); ++J) {
            const double e = crs.u(J, I);
            if (e == 0.0) continue;
            const int i = 2 * I, j = 2 * J;
            lev.u(j, i) += e;
            if (i + 1 < lev.ax.n()) lev.u(j, i + 1) += 0.5 * e;
            if (i > 0) lev.u(j, i - 1) += 0.5 * e;
            if (j + 1 < lev.ay.n()) lev.u(j + 1, i) += 0.5 * e;
            if (j > 0) lev.u(j - 1, i) += 0.5 * e;
            if (i + 1 < lev.ax.n() && j + 1 < lev.ay.n()) lev.u(j + 1, i + 1) += 0.25 * e;
            if (i + 1 < lev.ax.n() && j > 0) lev.u(j - 1, i + 1) += 0.25 * e;
            if (i > 0 && j + 1 < lev.ay.n()) lev.u(j + 1, i - 1) += 0.25 * e;
            if (i > 0 && j > 0) lev.u(j - 1, i - 1) += 0.25 * e;
        }
    zebra_line_relax(lev.op, lev.f, lev.u, post_sweeps_);
}

double Multigrid::vcycle(const ArrayXXd& f, ArrayXXd& u) {
    Level& fine = levels_.front();
    fine.f = f;
    fine.u.swap(u);
    cycle(0);
    fine.u.swap(u);
    fine.op.residual(u, f, fine.r);
    return interior_norm(fine.r);
}

SolveStats Multigrid::solve(const ArrayXXd& f, ArrayXXd& u, double tol, int max_cycles) {
    Level& fine = levels_.front();
    if (u.rows() != fine.ay.n() || u.cols() != fine.ax.n() ||
        f.rows() != fine.ay.n() || f.cols() != fine.ax.n())
        throw std::invalid_argument("Multigrid::solve: field shape mismatch");

    SolveStats stats;
    ArrayXXd fi = f;
    // Zero the boundary ring of the rhs copy so norms see interior only.
    fi.row(0).setZero();
    fi.row(fine.ay.n() - 1).setZero();
    fi.col(0).setZero();
    fi.col(fine.ax.n() - 1).setZero();
    const double f2 = interior_norm(fi);
    const double target = (f2 > 0.0) ? tol * f2 : tol;

    fine.op.residual(u, f, fine.r);
    double rnorm = interior_norm(fine.r);
    while (rnorm > target && stats.cycles < max_cycles) {
        rnorm = vcycle(f, u);
        ++stats.cycles;
    }
    stats.rel_residual = (f2 > 0.0) ? rnorm / f2 : rnorm;
    stats.converged = rnorm <= target;
    return stats;
}

}  // namespace vbl
