#pragma once

/// 2D incompressible Navier-Stokes in vorticity-streamfunction form for the
/// mollified vortex above a translating wall, in the frame moving with the
/// vortex (wall speed -1, far-field velocity -1).
///
/// Space: two-focus stretched tensor grid clustering at the vortex and at
/// the wall.  Time: factored ADI Crank-Nicolson
///     (I - k A_x)(I - k A_y) w^{n+1} = (I + k A_x)(I + k A_y) w^n,
/// k = dt/2, with advecting velocities frozen at t_n.  Each step then solves
/// the mapped Poisson equation Lap(psi) = -w by geometric multigrid with
/// psi = 0 on the wall and the steady point-vortex streamfunction on the far
/// boundaries, recomputes velocities from psi, and refreshes the wall
/// vorticity row with the non-uniform Jensen closure.

#include <Eigen/Dense>
#include <memory>

#include "vortexbl/grid.hpp"
#include "vortexbl/poisson.hpp"

namespace vbl {

/// Two-focus map parameters for both axes plus the physical truncation box.
struct NSStretchParams {
    double x1 = 0.0;       ///< streamwise vortex focus (leading)
    double beta_x1 = 0.6;
    double x2 = 0.4;       ///< streamwise event-region focus (modulating)
    double beta_x2 = 0.15;
    double y1 = 1.0;       ///< vortex height focus (modulating)
    double beta_y1 = 0.2;
    double y2 = 0.0;       ///< wall focus (leading)
    double beta_y2 = 0.5;
    double gamma = 5.0;
    double x_lo = -30.0, x_hi = 30.0;
    double y_hi = 10.0;

    TwoFocusMap xmap() const;
    TwoFocusMap ymap() const;
};

struct NSConfig {
    int nx = 257, ny = 257;
    double re = 1000.0;
    double dt = 2.8e-4;
    double t_end = 1.55;
    NSStretchParams stretch;
    double sigma = 0.05;               ///< vortex mollifier width
    bool mollifier_normalized = true;  ///< scale the blob to circulation 4*pi
    double poisson_tol = 1e-10;
    int poisson_max_cycles = 60;
    double omega_abort = 1e7;          ///< sanity bound on max |omega|

    void validate() const;
};

struct NSState {
    ArrayXXd omega, psi, u, v;
    double t = 0.0;
    long step = 0;
};

/// Non-uniform wall-vorticity closure: psi Taylor-expanded in physical y at
/// the wall with dpsi/dy|_0 = u_wall, using interior nodes at heights h1, h2.
/// Exact on quadratics; reduces to
///   w0 = (7 psi0 - 8 psi1 + psi2)/(2 h^2) + 3 u_wall / h
/// on uniform spacing.
double jensen_wall_vorticity(double psi0, double psi1, double psi2,
                             double h1, double h2, double u_wall);

class NSSolver {
public:
    explicit NSSolver(const NSConfig& cfg);

    /// Mollified-vortex initial state at t = 0 (Poisson solve included).
    void reset();

    /// Install a stored state (resume).
    void set_state(const NSState& s);

    const NSState& state() const { return s_; }
    const NSConfig& config() const { return cfg_; }
    const MappedAxis& xaxis() const { return ax_; }
    const MappedAxis& yaxis() const { return ay_; }
    Multigrid& poisson() { return *mg_; }
    const SolveStats& last_poisson() const { return last_poisson_; }

    /// One fixed-dt step; throws std::runtime_error if the state leaves the
    /// sanity bounds (non-finite or |omega| > omega_abort).
    void advance();

    /// max |omega| on the far boundaries (lateral columns and top row)
    /// relative to the interior max: truncation-quality watchdog.
    double boundary_omega_ratio() const;

    /// max |u d(xbar)/dx . du/dxbar| over the interior (spike diagnostic),
    /// with its location.
    void max_dudx(double& value, double& x_at) const;

    /// u = (dybar/dy) dpsi/dybar, v = -(dxbar/dx) dpsi/dxbar; centered inside,
    /// one-sided second order on the boundary ring.
    void velocities_from_psi(const ArrayXXd& psi, ArrayXXd& u, ArrayXXd& v) const;

    /// Jensen closure along the whole wall row of psi.
    ArrayXd wall_vorticity_row(const ArrayXXd& psi) const;

private:
    void poisson_solve();       ///< psi from omega (boundary values preset)
    void enforce_far_omega();   ///< zero vorticity on lateral/top boundaries

    NSConfig cfg_;
    MappedAxis ax_, ay_;
    std::unique_ptr<Multigrid> mg_;
    ArrayXd psi_top_, psi_left_, psi_right_;  ///< Euler far-field values
    NSState s_;
    SolveStats last_poisson_;
    ArrayXXd r1_, r2_, rhs_;                  ///< ADI workspaces
    ArrayXd line_lo_, line_di_, line_up_, line_rhs_;
};

}  // namespace vbl
