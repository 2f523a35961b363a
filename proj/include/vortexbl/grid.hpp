#pragma once

/// Mapped 1D axes: uniform nodes in computational space paired with their
/// physical locations, analytic metric derivatives and trapezoid weights.
/// All 2D grids in the solvers are tensor products of two of these.

#include <Eigen/Dense>

#include "vortexbl/maps.hpp"

namespace vbl {

using Eigen::ArrayXd;
using Eigen::ArrayXXd;

enum class AxisKind {
    uniform,            ///< identity map (model problems, tests)
    arctan_line,        ///< single-focus map of the whole line, open interval (-1, 1)
    arctan_half_line,   ///< single-focus map of [0, Y_max]
    stretch,            ///< two-focus product map, truncated interval
};

struct MappedAxis {
    AxisKind kind = AxisKind::uniform;
    ArrayXd comp;    ///< computational nodes, uniformly spaced, strictly increasing
    ArrayXd phys;    ///< physical nodes, strictly increasing
    ArrayXd d1;      ///< d(comp)/d(phys) at nodes, > 0
    ArrayXd d2;      ///< d2(comp)/d(phys)2 at nodes
    ArrayXd qw;      ///< trapezoid quadrature weights in the physical coordinate
    double dcomp = 0.0;   ///< uniform computational spacing

    int n() const { return static_cast<int>(comp.size()); }
};

/// Whole-line boundary-layer axis.  The ideal mapped range is the open
/// interval (-1, 1) whose endpoints sit at x = +-inf, so nodes are placed at
/// xhat_i = -1 + (i + 1) * 2/(n + 1): one virtual cell inside each end.  The
/// extreme columns then live at large finite |x| and converge to the ideal
/// endpoints under refinement.  For odd n the center node maps exactly to
/// m.center.
MappedAxis build_arctan_line_axis(const ArctanMap& m, int n);

/// Wall-normal boundary-layer axis on [0, y_max], endpoints included.
MappedAxis build_arctan_half_line_axis(double scale, double y_max, int n);

/// Two-focus stretched axis on [phys_lo, phys_hi], endpoints included.
/// Physical nodes of the interior come from two_focus_inverse at tol 1e-13.
MappedAxis build_stretch_axis(const TwoFocusMap& m, double phys_lo, double phys_hi, int n);

/// Identity axis on [lo, hi] (comp == phys).
MappedAxis build_uniform_axis(double lo, double hi, int n);

/// Trapezoid integral of nodal values over the axis.
double integrate(const MappedAxis& axis, const ArrayXd& values);

/// Every-2nd-node subsampling (n -> (n+1)/2); requires odd n >= 3.
/// Metric entries are the analytic values already stored at the kept nodes.
MappedAxis coarsen_axis(const MappedAxis& axis);

}  // namespace vbl
