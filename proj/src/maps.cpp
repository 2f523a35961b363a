#include "vortexbl/maps.hpp"

#include <cmath>
#include <limits>

namespace vbl {

namespace {
constexpr double kPi = 3.14159265358979323846;

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + ": non-finite argument");
}
}  // namespace

double arctan_forward(double x, const ArctanMap& m) {
    require_finite(x, "arctan_forward");
    return (2.0 / kPi) * std::atan((x - m.center) / m.scale);
}

double arctan_inverse(double xhat, const ArctanMap& m) {
    require_finite(xhat, "arctan_inverse");
    if (xhat <= -1.0 || xhat >= 1.0)
        throw std::domain_error("arctan_inverse: coordinate outside (-1, 1)");
    return m.center + m.scale * std::tan(kPi * 0.5 * xhat);
}

double arctan_d1(double x, const ArctanMap& m) {
    const double s = x - m.center;
    return (2.0 / kPi) * m.scale / (m.scale * m.scale + s * s);
}

double arctan_d2(double x, const ArctanMap& m) {
    const double s = x - m.center;
    const double q = m.scale * m.scale + s * s;
    return -(2.0 / kPi) * 2.0 * m.scale * s / (q * q);
}

double TwoFocusMap::amplitude() const {
    return 1.0 / ((kPi / 2.0) * (gamma + kPi / 2.0));
}

double TwoFocusMap::lo_limit() const {
    return -(gamma - kPi / 2.0) / (gamma + kPi / 2.0);
}

double two_focus_forward(double x, const TwoFocusMap& m) {
    require_finite(x, "two_focus_forward");
    const double a = std::atan((x - m.c_lead) / m.beta_lead);
    const double b = std::atan((x - m.c_mod) / m.beta_mod);
    return m.amplitude() * a * (m.gamma + b);
}

double two_focus_d1(double x, const TwoFocusMap& m) {
    const double sa = x - m.c_lead;
    const double sb = x - m.c_mod;
    const double a = std::atan(sa / m.beta_lead);
    const double b = std::atan(sb / m.beta_mod);
    const double da = m.beta_lead / (m.beta_lead * m.beta_lead + sa * sa);
    const double db = m.beta_mod / (m.beta_mod * m.beta_mod + sb * sb);
    return m.amplitude() * (da * (m.gamma + b) + a * db);
}

double two_focus_d2(double x, const TwoFocusMap& m) {
    const double sa = x - m.c_lead;
    const double sb = x - m.c_mod;
    const double qa = m.beta_lead * m.beta_lead + sa * sa;
    const double qb = m.beta_mod * m.beta_mod + sb * sb;
    const double a = std::atan(sa / m.beta_lead);
    const double b = std::atan(sb / m.beta_mod);
    const double da = m.beta_lead / qa;
    const double db = m.beta_mod / qb;
    const double dda = -2.0 * m.beta_lead * sa / (qa * qa);
    const double ddb = -2.0 * m.beta_mod * sb / (qb * qb);
    return m.amplitude() * (dda * (m.gamma + b) + 2.0 * da * db + a * ddb);
}

double two_focus_inverse(double xbar, const TwoFocusMap& m, double tol) {
    require_finite(xbar, "two_focus_inverse");
    if (xbar <= m.lo_limit() || xbar >= 1.0)
        throw std::domain_error("two_focus_inverse: coordinate outside the open mapped range");

    // Bracket by doubling outward from the focus points.
    double lo = std::min(m.c_lead, m.c_mod);
    double hi = std::max(m.c_lead, m.c_mod);
    double span = std::max(1.0, hi - lo);
    while (two_focus_forward(lo, m) > xbar) { lo -= span; span *= 2.0; }
    span = std::max(1.0, hi - lo);
    while (two_focus_forward(hi, m) < xbar) { hi += span; span *= 2.0; }

    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = two_focus_forward(x, m) - xbar;
        if (std::abs(f) <= tol) return x;
        if (f > 0.0) hi = x; else lo = x;
        const double d = two_focus_d1(x, m);
        double xn = (d > 0.0) ? x - f / d : x;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);   // Newton left the bracket
        x = xn;
    }
    return x;
}

BijectivityReport check_bijectivity(const TwoFocusMap& m, double x_lo, double x_hi,
                                    int n_samples) {
    if (n_samples < 2) throw std::invalid_argument("check_bijectivity: need >= 2 samples");
    BijectivityReport rep;
    rep.min_margin = std::numeric_limits<double>::infinity();
    const double h = (x_hi - x_lo) / (n_samples - 1);
    for (int k = 0; k < n_samples; ++k) {
        const double x = x_lo + k * h;
        const double sa = x - m.c_lead;
        const double sb = x - m.c_mod;
        const double a = std::atan(sa / m.beta_lead);
        const double b = std::atan(sb / m.beta_mod);
        // gamma > -b - a * (db/da) is equivalent to d(xbar)/dx > 0.
        const double ratio = (m.beta_mod * (m.beta_lead * m.beta_lead + sa * sa)) /
                             (m.beta_lead * (m.beta_mod * m.beta_mod + sb * sb));
        const double bound = -a * ratio - b;
        const double margin = m.gamma - bound;
        if (margin < rep.min_margin) {
            rep.min_margin = margin;
            rep.argmin_x = x;
        }
    }
    rep.ok = rep.min_margin > 0.0;
    return rep;
}

}  // namespace vbl
