#pragma once

/// Unsteady boundary-layer solver in the frame moving with the vortex.
/// Momentum equation
///     u_t + u u_x + V u_Y - U_inf U_inf' = u_YY,
/// with V from continuity, solved on arctan-mapped coordinates
/// (whole line in x, [0, Y_max] in Y) by a (2,3,3) IMEX Runge-Kutta step:
/// two-step Richtmyer-Lax-Wendroff tendencies for both convective terms,
/// implicit 3-point wall-normal diffusion (one tridiagonal factorization per
/// step serves every column and both implicit stages).
///
/// The impulsive start is regularized by a cubic Hermite layer of width
/// epsilon: u rises from -1 at the wall to U_inf at Y = epsilon with zero
/// slope at both ends.

#include <Eigen/Dense>

#include "vortexbl/grid.hpp"
#include "vortexbl/imex.hpp"
#include "vortexbl/tridiag.hpp"

namespace vbl {

struct PrandtlConfig {
    int nx = 1024;
    int ny = 300;
    double x_center = -0.21;   ///< streamwise clustering point
    double alpha = 0.2;        ///< streamwise map scale
    double beta = 0.1;         ///< wall-normal map scale
    double y_max = 20.0;       ///< wall-normal truncation (boundary-layer units)
    double epsilon = 0.05;     ///< initial-layer width; must be < y_max / 10
    double cfl_safety = 0.75;
    double dt_max = 5e-4;
    double dt_min = 1e-9;      ///< stopping trigger: CFL-proposed dt below this
    double blowup_grad = 1e3;  ///< stopping trigger: max |du/dxhat| (mapped units) above this
    double t_end = 1.05;

    void validate() const;
};

enum class PrandtlStop {
    running,
    time_end,
    blowup_gradient,
    blowup_dt,
};

/// Streamwise-gradient extrema of a state. `value` is the largest physical
/// gradient |(dxhat/dx) du/dxhat| and (x, i, j) locate it; `mapped` is the
/// largest gradient in map coordinates |du/dxhat|, which the blow-up trigger
/// compares against blowup_grad (the metric deflates physical gradients near
/// the focus, so the mapped number is the resolution-relevant one).
struct GradientProbe {
    double value = 0.0;
    double x = 0.0;
    int i = 0, j = 0;
    double mapped = 0.0;
    double mapped_x = 0.0;
};

struct PrandtlStepResult {
    double dt = 0.0;
    PrandtlStop stop = PrandtlStop::running;
    GradientProbe probe;
};

class PrandtlSolver {
public:
    explicit PrandtlSolver(const PrandtlConfig& cfg);

    /// Epsilon-regularized impulsive start at t = 0.
    void reset();

    /// Install a state (resume); u must satisfy the boundary conditions.
    void set_state(const ArrayXXd& u, double t, long step);

    const ArrayXXd& u() const { return u_; }
    double t() const { return t_; }
    long step_index() const { return step_; }
    const PrandtlConfig& config() const { return cfg_; }
    const MappedAxis& xaxis() const { return ax_; }
    const MappedAxis& yaxis() const { return ay_; }
    const ArrayXd& freestream() const { return uinf_; }

    /// CFL-limited dt proposal from the current state (before safety clamp
    /// against t_end).
    double cfl_dt() const;

    /// One adaptive IMEX step; applies the stopping triggers.
    PrandtlStepResult advance();

    /// Streamwise-gradient probe of the current state.
    GradientProbe gradient_probe() const;

    /// V(x, Y) = -int_0^Y du/dx dY', trapezoid in Y, centered in xhat.
    void compute_v(const ArrayXXd& u, ArrayXXd& V) const;

    /// Explicit tendency: -u (dxhat/dx) u_xhat - V (dyhat/dY) u_yhat
    /// + U_inf U_inf', Richtmyer-Lax-Wendroff form with half-step dt.
    /// Boundary entries are 0.
    void rhs_explicit(const ArrayXXd& u, const ArrayXXd& V, double dt, ArrayXXd& out) const;

    /// Mapped wall-normal diffusion L u at interior rows (boundary rows 0).
    void apply_diffusion(const ArrayXXd& u, ArrayXXd& out) const;

    /// Solve (I - coeff L) x = rhs column-by-column with Dirichlet rows
    /// x(0,:) = wall and x(ny-1,:) = top; solves every column in place.
    void implicit_solve(ArrayXXd& rhs, double coeff,
                        const ArrayXd& wall, const ArrayXd& top) const;

private:
    void enforce_boundaries(ArrayXXd& u) const;

    PrandtlConfig cfg_;
    MappedAxis ax_, ay_;
    ImexTableau tab_;
    ArrayXd uinf_, forcing_;       ///< per-column U_inf and U_inf U_inf'
    ArrayXd wall_bc_;              ///< -1 per column
    ArrayXd diff_lo_, diff_di_, diff_up_;   ///< diffusion stencil per row
    mutable TridiagFactors fact_;
    mutable double fact_coeff_ = -1.0;
    ArrayXXd u_;
    double t_ = 0.0;
    long step_ = 0;

    // Stage workspaces.
    mutable ArrayXXd V_, ke1_, ke2_, ke3_, ki_, stage_, half_;
};

/// Scalar building block of rhs_explicit, exposed for convergence
/// measurement: Richtmyer-Lax-Wendroff tendency for u_t + c u_x = 0 on a
/// periodic uniform grid, -c (half_{i+1/2} - half_{i-1/2}) / h with
/// half_{i+1/2} = (u_i + u_{i+1})/2 - (dt/2h) c (u_{i+1} - u_i).
ArrayXd lw_periodic_tendency(const ArrayXd& u, double c, double h, double dt);

}  // namespace vbl
