#pragma once

/// Mapped-coordinate Poisson solver: 5-point stencil assembly on a tensor
/// grid of two MappedAxis objects, smoothed by alternating zebra line
/// relaxation inside a geometric V-cycle with full-weighting restriction and
/// bilinear prolongation.  Coarse operators are re-assembled from the
/// analytic metric derivatives at the surviving nodes, not Galerkin products.

#include <Eigen/Dense>
#include <vector>

#include "vortexbl/grid.hpp"

namespace vbl {

/// Per-node coefficients of  cw*u_W + ce*u_E + cs*u_S + cn*u_N + cc*u_C,
/// the discretization of d1x^2 u_xx + d2x u_x + d1y^2 u_yy + d2y u_y in
/// computational coordinates.  Each direction is assembled in the equivalent
/// flux form a*D(a*Du) with midpoint-averaged a = d1, which keeps every
/// off-diagonal positive however hard the maps focus; the expanded centered
/// stencil flips off-diagonal signs once |d2|*h/2 exceeds d1^2 and the
/// smoothers diverge.  Arrays are (ny, nx); boundary entries unused.
struct StencilOperator {
    int nx = 0, ny = 0;
    ArrayXXd cc, cw, ce, cs, cn;

    /// Residual f - A u on interior nodes (boundary entries set to 0).
    void residual(const ArrayXXd& u, const ArrayXXd& f, ArrayXXd& r) const;

    /// A u on interior nodes (boundary entries set to 0).
    void apply(const ArrayXXd& u, ArrayXXd& out) const;

    /// min over interior of (|cc| - sum |off-diagonals|) / |cc|; flux-form
    /// assembly makes this zero up to rounding, and a negative value beyond
    /// rounding flags a broken operator.
    double dominance_margin() const;
};

StencilOperator assemble_operator(const MappedAxis& ax, const MappedAxis& ay);

/// sweeps red-black passes of Gauss-Seidel over the interior of u.
void gauss_seidel_rb(const StencilOperator& op, const ArrayXXd& f, ArrayXXd& u, int sweeps);

/// sweeps alternating zebra passes: tridiagonal solves along even then odd
/// interior rows, then even then odd interior columns.  Line solves in both
/// directions keep the smoother effective where the focusing maps make the
/// stencil strongly anisotropic; point relaxation stalls there.
void zebra_line_relax(const StencilOperator& op, const ArrayXXd& f, ArrayXXd& u, int sweeps);

struct SolveStats {
    int cycles = 0;
    double rel_residual = 0.0;   ///< final ||f - A u||_2 / ||f||_2
    bool converged = false;
};

class Multigrid {
public:
    /// Both axis node counts must be 2^k + 1, k >= 2.  Coarsening stops once
    /// either side reaches 5 nodes; that level is solved densely.
    Multigrid(const MappedAxis& ax, const MappedAxis& ay,
              int pre_sweeps = 2, int post_sweeps = 2);

    /// Iterate V-cycles on A u = f until ||f - A u|| <= tol * ||f||.
    /// u carries the initial guess and the Dirichlet boundary values; only
    /// interior entries are updated.  f is read on interior nodes.
    SolveStats solve(const ArrayXXd& f, ArrayXXd& u, double tol, int max_cycles);

    /// One V-cycle starting and ending on the finest level (for contraction
    /// measurements); returns the interior residual norm after the cycle.
    double vcycle(const ArrayXXd& f, ArrayXXd& u);

    const StencilOperator& fine_op() const { return levels_.front().op; }
    int depth() const { return static_cast<int>(levels_.size()); }

private:
    struct Level {
        MappedAxis ax, ay;
        StencilOperator op;
        ArrayXXd u, f, r;
    };

    void cycle(int l);
    void coarse_correct(Level& lev);

    std::vector<Level> levels_;
    int pre_sweeps_, post_sweeps_;
    Eigen::PartialPivLU<Eigen::MatrixXd> coarse_lu_;
};

}  // namespace vbl
