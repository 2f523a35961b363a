#pragma once

/// Physical observables and detectors shared by both solvers: wall shear,
/// wall pressure gradient, displacement thickness, normal-pressure
/// reconstruction, energy/enstrophy/palinstrophy budgets with their boundary
/// integrals, stagnation points, profile critical points, vortex-core
/// tracking, and enstrophy-peak detection.
///
/// Everything here is a pure function of field arrays plus axis metadata, so
/// the detectors can be re-run on stored artifacts.

#include <Eigen/Dense>
#include <vector>

#include "vortexbl/grid.hpp"

namespace vbl {

using Eigen::Array3d;

/// One-sided first-derivative weights at the first of three nodes located at
/// offsets {0, h1, h2}; exact on quadratics.
Array3d deriv3_weights(double h1, double h2);

/// First derivative of f(x) on a non-uniform axis, 3-point stencils
/// (one-sided at the ends, centered-weighted inside).
ArrayXd profile_derivative(const ArrayXd& x, const ArrayXd& f);

/// Piecewise-linear interpolation; clamps outside the axis range.
double interp_linear(const ArrayXd& x, const ArrayXd& f, double xq);

// ---------------------------------------------------------------------------
// Wall profiles
// ---------------------------------------------------------------------------

/// tau_w = du/dY at Y=0 per column, one-sided second order on the stretched
/// wall-normal axis.
ArrayXd wall_shear_prandtl(const ArrayXXd& u, const MappedAxis& yaxis);

/// tau_w = -omega_wall / sqrt(Re).
ArrayXd wall_shear_ns(const ArrayXXd& omega, double re);

/// dp/dx at the wall: -(1/Re) (dybar/dy) domega/dybar with a one-sided
/// second-order derivative at the wall row.
ArrayXd wall_pressure_gradient(const ArrayXXd& omega, const MappedAxis& yaxis, double re);

/// Displacement thickness per column: int_0^Ymax (1 - (u+1)/(Uinf+1)) dY.
ArrayXd displacement_thickness(const ArrayXXd& u, const MappedAxis& yaxis, const ArrayXd& uinf);

/// Sup-norm mismatch of two sampled curves over [lo, hi]: curve a is
/// interpolated onto the nodes of b; returns max|a-b| / max|b| there.
double sup_norm_mismatch(const ArrayXd& xa, const ArrayXd& fa,
                         const ArrayXd& xb, const ArrayXd& fb,
                         double lo, double hi);

// ---------------------------------------------------------------------------
// Pressure reconstruction over the near-wall strip
// ---------------------------------------------------------------------------

/// Velocity/vorticity fields of one stored state (views; not owned).
struct NSFieldsView {
    const ArrayXXd& omega;
    const ArrayXXd& u;
    const ArrayXXd& v;
};

struct PressureStrip {
    int j_top = 0;       ///< row index of the Y_BL line
    ArrayXXd dpdy;       ///< (j_top+1, nx), from the v-momentum balance
    ArrayXXd p;          ///< reconstructed pressure, gauge p(x_lo, 0) = 0
    double sup_dpdy = 0; ///< max |dp/dy| over the strip
};

/// dp/dy = -(v_t + u v_x + v v_y) + (1/Re) omega_x using two consecutive
/// states dt apart (v_t one-sided); Laplacian(v) = omega_x identically for
/// divergence-free fields. p integrates dpdx_w along the wall then dp/dy up
/// each column.
PressureStrip pressure_strip(const NSFieldsView& prev, const NSFieldsView& cur,
                             double dt, double re,
                             const MappedAxis& xaxis, const MappedAxis& yaxis,
                             int j_top);

/// Row index of the boundary-layer top: nearest grid row to y_bl.
int snap_bl_row(const MappedAxis& yaxis, double y_bl);

/// Sup of |dp/dy| over the part of the strip inside the vorticity layer:
/// each column is truncated at the highest strip row where |omega| still
/// reaches rel_cut of that column's strip maximum.  The full strip reaches
/// into the outer flow, where the vortex imposes an O(1) normal pressure
/// gradient at all times; cutting at the vorticity edge isolates the layer's
/// own contribution, the quantity the boundary-layer approximation bounds.
double strip_sup_in_layer(const PressureStrip& strip, const ArrayXXd& omega,
                          double rel_cut = 0.01);

// ---------------------------------------------------------------------------
// Budgets over D = {0 <= y <= Y_BL}
// ---------------------------------------------------------------------------

struct BudgetRecord {
    double t = 0;
    double E = 0;        ///< (1/2) int |u|^2
    double Omega = 0;    ///< int omega^2
    double P = 0;        ///< int |grad omega|^2
    double I_omega = 0;  ///< -(1/Re) int u omega |_{y=0} dx
    double I_p = 0;      ///< int omega |_{y=0} dpdx_w dx
    double NT1 = 0;      ///< Y_BL-line energy flux terms
    double NT2 = 0;      ///< (2/Re) int omega domega/dy |_{Y_BL} dx
};

/// All budget integrals by non-uniform trapezoid over D; the previous state
/// supplies the v_t estimate behind the pressure term in NT1.
BudgetRecord budgets(const NSFieldsView& prev, const NSFieldsView& cur,
                     double t, double dt, double re,
                     const MappedAxis& xaxis, const MappedAxis& yaxis,
                     double y_bl);

/// Boundary-layer rescaling: Omega/sqrt(Re), P/Re^{3/2}, I_p/sqrt(Re),
/// I_omega*sqrt(Re); other fields pass through.
BudgetRecord rescale_budgets(BudgetRecord r, double re);

/// Boundary-layer-variable analogues for a Prandtl state, directly
/// comparable with rescaled NS budgets: Omega = int u_Y^2, P = int u_YY^2,
/// I_p = int tau Uinf Uinf' dx, I_omega = -int tau dx.
struct PrandtlBudget {
    double t = 0, Omega = 0, P = 0, I_omega = 0, I_p = 0;
};
PrandtlBudget prandtl_budgets(const ArrayXXd& u, double t,
                              const MappedAxis& xaxis, const MappedAxis& yaxis,
                              const ArrayXd& forcing);

// ---------------------------------------------------------------------------
// Stagnation points
// ---------------------------------------------------------------------------

struct StagnationPoint {
    double x = 0, y = 0;
    double jac_det = 0;      ///< bilinear velocity-Jacobian determinant
    bool is_center = false;  ///< det > 0: rotation; det < 0: saddle
};

/// Cells where both velocity components change sign, refined by bilinear
/// Newton iteration; restricted to the window [x_lo,x_hi] x [y_lo,y_hi].
std::vector<StagnationPoint> find_stagnation_points(
    const ArrayXXd& u, const ArrayXXd& v,
    const ArrayXd& xphys, const ArrayXd& yphys,
    double x_lo, double x_hi, double y_lo, double y_hi);

// ---------------------------------------------------------------------------
// Profile critical points
// ---------------------------------------------------------------------------

enum class CritKind { minimum, maximum, inflection };

struct CriticalPoint {
    double x = 0;      ///< sub-grid location (linear interpolation)
    double value = 0;  ///< profile value there
    CritKind kind = CritKind::minimum;
};

/// Zero crossings of the first and second discrete derivatives of f within
/// (x_lo, x_hi): local extrema and inflection points.
std::vector<CriticalPoint> profile_critical_points(const ArrayXd& x, const ArrayXd& f,
                                                   double x_lo, double x_hi);

/// Discrete local minima with a prominence barrier: f must rise by at least
/// `prominence` on both sides before dropping below the minimum again.
struct ProfileMinimum {
    int i = 0;
    double x = 0, value = 0;
};
std::vector<ProfileMinimum> local_minima(const ArrayXd& x, const ArrayXd& f,
                                         double x_lo, double x_hi,
                                         double prominence);

// ---------------------------------------------------------------------------
// Vortex-core tracking
// ---------------------------------------------------------------------------

struct CoreSample {
    double t = 0, x = 0, y = 0, peak = 0;
};

struct VortexTrack {
    std::vector<CoreSample> samples;
    bool ambiguous = false;  ///< a link had two near-equal candidates
    double birth() const { return samples.front().t; }
};

/// Per-frame core candidates: grid-local extrema of sign*omega exceeding
/// rel_threshold * max|omega| inside the window, sub-cell refined by
/// parabolic fits.
std::vector<CoreSample> find_cores(const ArrayXXd& omega,
                                   const ArrayXd& xphys, const ArrayXd& yphys,
                                   int sign, double rel_threshold,
                                   double x_lo, double x_hi, double y_lo, double y_hi,
                                   double t);

/// Greedy nearest-neighbor linking of per-frame candidates into tracks;
/// links longer than max_jump start a new track; near-ties broken by peak
/// similarity and flagged.
std::vector<VortexTrack> link_tracks(const std::vector<std::vector<CoreSample>>& frames,
                                     double max_jump);

// ---------------------------------------------------------------------------
// Series peaks
// ---------------------------------------------------------------------------

/// Indices of local maxima of f with prominence >= rel_prominence * range(f).
std::vector<int> series_peaks(const ArrayXd& f, double rel_prominence);

}  // namespace vbl
