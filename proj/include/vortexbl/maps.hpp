#pragma once

/// Coordinate maps between physical and computational space.
///
/// Two families:
///  - single-focus arctangent map (boundary-layer solver), compactifying a
///    half line or the whole line around one clustering point;
///  - two-focus arctangent product map (Navier-Stokes solver), clustering
///    around two points at once with a tunable weight gamma.

#include <stdexcept>

namespace vbl {

/// xhat = (2/pi) atan((x - center)/scale).  Maps (-inf, inf) onto (-1, 1);
/// with center = 0 it maps [0, inf) onto [0, 1).
struct ArctanMap {
    double center = 0.0;
    double scale = 1.0;
};

double arctan_forward(double x, const ArctanMap& m);
double arctan_inverse(double xhat, const ArctanMap& m);   ///< throws std::domain_error for |xhat| >= 1
double arctan_d1(double x, const ArctanMap& m);           ///< d(xhat)/dx
double arctan_d2(double x, const ArctanMap& m);           ///< d2(xhat)/dx2

/// xbar = A atan((x - c_lead)/beta_lead) [gamma + atan((x - c_mod)/beta_mod)],
/// A = 1 / ((pi/2)(gamma + pi/2)).
/// Monotone bijection of (-inf, inf) onto (-(gamma - pi/2)/(gamma + pi/2), 1)
/// when gamma satisfies the bound checked by check_bijectivity().
struct TwoFocusMap {
    double c_lead = 0.0;
    double beta_lead = 1.0;
    double c_mod = 0.0;
    double beta_mod = 1.0;
    double gamma = 5.0;

    double amplitude() const;   ///< A above
    double lo_limit() const;    ///< value as x -> -inf
};

double two_focus_forward(double x, const TwoFocusMap& m);
double two_focus_d1(double x, const TwoFocusMap& m);
double two_focus_d2(double x, const TwoFocusMap& m);

/// Inverse by bracketed Newton with bisection fallback.
/// Requires xbar strictly inside (lo_limit, 1); tol is on the computational
/// residual.  Throws std::domain_error outside the open range.
double two_focus_inverse(double xbar, const TwoFocusMap& m, double tol = 1e-13);

/// Worst-case margin of the monotonicity bound gamma > g(x) over a dense
/// sample of the given physical interval.  ok iff min margin > 0.
struct BijectivityReport {
    bool ok = false;
    double min_margin = 0.0;   ///< min over samples of gamma - g(x)
    double argmin_x = 0.0;
};

BijectivityReport check_bijectivity(const TwoFocusMap& m, double x_lo, double x_hi,
                                    int n_samples = 200001);

}  // namespace vbl
