#include "vortexbl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vbl {

namespace {

/// First-derivative weights at offset 0 for quadratic interpolation through
/// nodes at offsets d0, d1, d2 (Lagrange derivative at the origin).
inline Array3d lagrange_d1_weights(double d0, double d1, double d2) {
    Array3d w;
    w[0] = (-d1 - d2) / ((d0 - d1) * (d0 - d2));
    w[1] = (-d0 - d2) / ((d1 - d0) * (d1 - d2));
    w[2] = (-d0 - d1) / ((d2 - d0) * (d2 - d1));
    return w;
}

/// Second-derivative weights (constant for a quadratic) through the same nodes.
inline Array3d lagrange_d2_weights(double d0, double d1, double d2) {
    Array3d w;
    w[0] = 2.0 / ((d0 - d1) * (d0 - d2));
    w[1] = 2.0 / ((d1 - d0) * (d1 - d2));
    w[2] = 2.0 / ((d2 - d0) * (d2 - d1));
    return w;
}

/// Trapezoid weights for the leading rows [0..j_top] of a stretched axis.
ArrayXd partial_trapezoid(const ArrayXd& phys, int j_top) {
    ArrayXd w = ArrayXd::Zero(j_top + 1);
    for (int j = 0; j < j_top; ++j) {
        const double h = phys[j + 1] - phys[j];
        w[j] += 0.5 * h;
        w[j + 1] += 0.5 * h;
    }
    return w;
}

}  // namespace

Array3d deriv3_weights(double h1, double h2) {
    return lagrange_d1_weights(0.0, h1, h2);
}

ArrayXd profile_derivative(const ArrayXd& x, const ArrayXd& f) {
    const int n = static_cast<int>(x.size());
    if (n < 3) throw std::invalid_argument("profile_derivative: need >= 3 nodes");
    ArrayXd g(n);
    {
        const Array3d w = lagrange_d1_weights(0.0, x[1] - x[0], x[2] - x[0]);
        g[0] = w[0] * f[0] + w[1] * f[1] + w[2] * f[2];
    }
    for (int i = 1; i < n - 1; ++i) {
        const Array3d w = lagrange_d1_weights(x[i - 1] - x[i], 0.0, x[i + 1] - x[i]);
        g[i] = w[0] * f[i - 1] + w[1] * f[i] + w[2] * f[i + 1];
    }
    {
        const Array3d w = lagrange_d1_weights(x[n - 3] - x[n - 1], x[n - 2] - x[n - 1], 0.0);
        g[n - 1] = w[0] * f[n - 3] + w[1] * f[n - 2] + w[2] * f[n - 1];
    }
    return g;
}

double interp_linear(const ArrayXd& x, const ArrayXd& f, double xq) {
    const int n = static_cast<int>(x.size());
    if (xq <= x[0]) return f[0];
    if (xq >= x[n - 1]) return f[n - 1];
    const double* lo = std::upper_bound(x.data(), x.data() + n, xq);
    const int i = static_cast<int>(lo - x.data());  // x[i-1] <= xq < x[i]
    const double s = (xq - x[i - 1]) / (x[i] - x[i - 1]);
    return (1.0 - s) * f[i - 1] + s * f[i];
}

// ---------------------------------------------------------------------------
// Wall profiles
// ---------------------------------------------------------------------------

ArrayXd wall_shear_prandtl(const ArrayXXd& u, const MappedAxis& yaxis) {
    const Array3d w = deriv3_weights(yaxis.phys[1] - yaxis.phys[0],
                                     yaxis.phys[2] - yaxis.phys[0]);
    return w[0] * u.row(0).transpose() + w[1] * u.row(1).transpose() +
           w[2] * u.row(2).transpose();
}

ArrayXd wall_shear_ns(const ArrayXXd& omega, double re) {
    return -omega.row(0).transpose() / std::sqrt(re);
}

ArrayXd wall_pressure_gradient(const ArrayXXd& omega, const MappedAxis& yaxis, double re) {
    const double h = yaxis.dcomp;
    const double m = yaxis.d1[0];
    ArrayXd dwdy = (-3.0 * omega.row(0) + 4.0 * omega.row(1) - omega.row(2)).transpose() / (2.0 * h);
    return -(m / re) * dwdy;
}

ArrayXd displacement_thickness(const ArrayXXd& u, const MappedAxis& yaxis, const ArrayXd& uinf) {
    const int nx = static_cast<int>(u.cols());
    const int ny = static_cast<int>(u.rows());
    ArrayXd beta = ArrayXd::Zero(nx);
    for (int i = 0; i < nx; ++i) {
        const double due = uinf[i] + 1.0;
        double acc = 0.0;
        for (int j = 0; j < ny; ++j)
            acc += yaxis.qw[j] * (1.0 - (u(j, i) + 1.0) / due);
        beta[i] = acc;
    }
    return beta;
}

double sup_norm_mismatch(const ArrayXd& xa, const ArrayXd& fa,
                         const ArrayXd& xb, const ArrayXd& fb,
                         double lo, double hi) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < xb.size(); ++i) {
        if (xb[i] < lo || xb[i] > hi) continue;
        num = std::max(num, std::abs(interp_linear(xa, fa, xb[i]) - fb[i]));
        den = std::max(den, std::abs(fb[i]));
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return num / den;
}

// ---------------------------------------------------------------------------
// Pressure reconstruction
// ---------------------------------------------------------------------------

int snap_bl_row(const MappedAxis& yaxis, double y_bl) {
    const int ny = yaxis.n();
    if (y_bl > yaxis.phys[ny - 1])
        throw std::invalid_argument("snap_bl_row: region D exceeds the grid");
    int best = 0;
    for (int j = 1; j < ny; ++j)
        if (std::abs(yaxis.phys[j] - y_bl) < std::abs(yaxis.phys[best] - y_bl)) best = j;
    if (best < 2) best = 2;
    if (best > ny - 2) best = ny - 2;
    return best;
}

double strip_sup_in_layer(const PressureStrip& strip, const ArrayXXd& omega,
                          double rel_cut) {
    const int nx = static_cast<int>(strip.dpdy.cols());
    const int jt = strip.j_top;
    if (omega.cols() != nx || omega.rows() <= jt)
        throw std::invalid_argument("strip_sup_in_layer: field/strip shape mismatch");
    double sup = 0.0;
    for (int i = 0; i < nx; ++i) {
        double cmax = 0.0;
        for (int j = 0; j <= jt; ++j) cmax = std::max(cmax, std::abs(omega(j, i)));
        int jedge = 0;
        for (int j = jt; j >= 0; --j)
            if (std::abs(omega(j, i)) >= rel_cut * cmax) { jedge = j; break; }
        for (int j = 0; j <= jedge; ++j) sup = std::max(sup, std::abs(strip.dpdy(j, i)));
    }
    return sup;
}

PressureStrip pressure_strip(const NSFieldsView& prev, const NSFieldsView& cur,
                             double dt, double re,
                             const MappedAxis& xaxis, const MappedAxis& yaxis,
                             int j_top) {
    if (dt <= 0.0) throw std::invalid_argument("pressure_strip: need dt > 0");
    const int nx = xaxis.n();
    const int ny = yaxis.n();
    if (j_top < 1 || j_top > ny - 2)
        throw std::invalid_argument("pressure_strip: j_top out of range");
    const double hx = xaxis.dcomp, hy = yaxis.dcomp;

    PressureStrip out;
    out.j_top = j_top;
    out.dpdy.resize(j_top + 1, nx);

    for (int i = 0; i < nx; ++i) {
        const double mx = xaxis.d1[i];
        for (int j = 0; j <= j_top; ++j) {
            double vx, ox;
            if (i == 0) {
                vx = mx * (cur.v(j, 1) - cur.v(j, 0)) / hx;
                ox = mx * (cur.omega(j, 1) - cur.omega(j, 0)) / hx;
            } else if (i == nx - 1) {
                vx = mx * (cur.v(j, nx - 1) - cur.v(j, nx - 2)) / hx;
                ox = mx * (cur.omega(j, nx - 1) - cur.omega(j, nx - 2)) / hx;
            } else {
                vx = mx * (cur.v(j, i + 1) - cur.v(j, i - 1)) / (2.0 * hx);
                ox = mx * (cur.omega(j, i + 1) - cur.omega(j, i - 1)) / (2.0 * hx);
            }
            double vy;
            const double my = yaxis.d1[j];
            if (j == 0)
                vy = my * (-3.0 * cur.v(0, i) + 4.0 * cur.v(1, i) - cur.v(2, i)) / (2.0 * hy);
            else
                vy = my * (cur.v(j + 1, i) - cur.v(j - 1, i)) / (2.0 * hy);
            const double vt = (cur.v(j, i) - prev.v(j, i)) / dt;
            // Laplacian(v) = domega/dx for divergence-free fields.
            out.dpdy(j, i) = -(vt + cur.u(j, i) * vx + cur.v(j, i) * vy) + ox / re;
        }
    }
    out.sup_dpdy = out.dpdy.abs().maxCoeff();

    // Pressure: integrate dpdx along the wall from the left edge, then dp/dy
    // up each column (gauge p = 0 at the wall's left end).
    const ArrayXd dpdxw = wall_pressure_gradient(cur.omega, yaxis, re);
    out.p.resize(j_top + 1, nx);
    out.p(0, 0) = 0.0;
    for (int i = 1; i < nx; ++i)
        out.p(0, i) = out.p(0, i - 1) +
                      0.5 * (dpdxw[i] + dpdxw[i - 1]) * (xaxis.phys[i] - xaxis.phys[i - 1]);
    for (int i = 0; i < nx; ++i)
        for (int j = 1; j <= j_top; ++j)
            out.p(j, i) = out.p(j - 1, i) +
                          0.5 * (out.dpdy(j, i) + out.dpdy(j - 1, i)) *
                              (yaxis.phys[j] - yaxis.phys[j - 1]);
    return out;
}

// ---------------------------------------------------------------------------
// Budgets
// ---------------------------------------------------------------------------

BudgetRecord budgets(const NSFieldsView& prev, const NSFieldsView& cur,
                     double t, double dt, double re,
                     const MappedAxis& xaxis, const MappedAxis& yaxis,
                     double y_bl) {
    const int nx = xaxis.n();
    const int j_top = snap_bl_row(yaxis, y_bl);
    const double hx = xaxis.dcomp, hy = yaxis.dcomp;
    const ArrayXd& wx = xaxis.qw;
    const ArrayXd wy = partial_trapezoid(yaxis.phys, j_top);

    BudgetRecord r;
    r.t = t;

    // Mapped vorticity gradient over the strip.
    ArrayXXd gx(j_top + 1, nx), gy(j_top + 1, nx);
    for (int i = 0; i < nx; ++i) {
        const double mx = xaxis.d1[i];
        for (int j = 0; j <= j_top; ++j) {
            if (i == 0)
                gx(j, i) = mx * (cur.omega(j, 1) - cur.omega(j, 0)) / hx;
            else if (i == nx - 1)
                gx(j, i) = mx * (cur.omega(j, nx - 1) - cur.omega(j, nx - 2)) / hx;
            else
                gx(j, i) = mx * (cur.omega(j, i + 1) - cur.omega(j, i - 1)) / (2.0 * hx);
            const double my = yaxis.d1[j];
            if (j == 0)
                gy(j, i) = my * (-3.0 * cur.omega(0, i) + 4.0 * cur.omega(1, i) - cur.omega(2, i)) / (2.0 * hy);
            else
                gy(j, i) = my * (cur.omega(j + 1, i) - cur.omega(j - 1, i)) / (2.0 * hy);
        }
    }

    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j <= j_top; ++j) {
            const double w = wx[i] * wy[j];
            const double uu = cur.u(j, i), vv = cur.v(j, i), om = cur.omega(j, i);
            r.E += 0.5 * w * (uu * uu + vv * vv);
            r.Omega += w * om * om;
            r.P += w * (gx(j, i) * gx(j, i) + gy(j, i) * gy(j, i));
        }
    }

    const ArrayXd dpdxw = wall_pressure_gradient(cur.omega, yaxis, re);
    const PressureStrip strip = pressure_strip(prev, cur, dt, re, xaxis, yaxis, j_top);
    for (int i = 0; i < nx; ++i) {
        r.I_omega += -wx[i] * cur.u(0, i) * cur.omega(0, i) / re;
        r.I_p += wx[i] * cur.omega(0, i) * dpdxw[i];
        r.NT2 += (2.0 / re) * wx[i] * cur.omega(j_top, i) * gy(j_top, i);
        // Y_BL-line fluxes of the energy budget; the wall contributes nothing
        // (v = 0) and the remote lateral segments cancel by far-field
        // uniformity.
        const double uu = cur.u(j_top, i), vv = cur.v(j_top, i), om = cur.omega(j_top, i);
        r.NT1 += -wx[i] * ((0.5 * (uu * uu + vv * vv) + strip.p(j_top, i)) * vv + om * uu / re);
    }
    return r;
}

BudgetRecord rescale_budgets(BudgetRecord r, double re) {
    if (re <= 0.0) throw std::invalid_argument("rescale_budgets: need Re > 0");
    const double s = std::sqrt(re);
    r.Omega /= s;
    r.P /= re * s;
    r.I_p /= s;
    r.I_omega *= s;
    return r;
}

PrandtlBudget prandtl_budgets(const ArrayXXd& u, double t,
                              const MappedAxis& xaxis, const MappedAxis& yaxis,
                              const ArrayXd& forcing) {
    const int nx = xaxis.n(), ny = yaxis.n();
    const ArrayXd& Y = yaxis.phys;
    // Per-row derivative weights in physical Y (quadratic stencils).
    std::vector<Array3d> w1(ny), w2(ny);
    w1[0] = lagrange_d1_weights(0.0, Y[1] - Y[0], Y[2] - Y[0]);
    w2[0] = lagrange_d2_weights(0.0, Y[1] - Y[0], Y[2] - Y[0]);
    for (int j = 1; j < ny - 1; ++j) {
        w1[j] = lagrange_d1_weights(Y[j - 1] - Y[j], 0.0, Y[j + 1] - Y[j]);
        w2[j] = lagrange_d2_weights(Y[j - 1] - Y[j], 0.0, Y[j + 1] - Y[j]);
    }
    w1[ny - 1] = lagrange_d1_weights(Y[ny - 3] - Y[ny - 1], Y[ny - 2] - Y[ny - 1], 0.0);
    w2[ny - 1] = lagrange_d2_weights(Y[ny - 3] - Y[ny - 1], Y[ny - 2] - Y[ny - 1], 0.0);

    PrandtlBudget r;
    r.t = t;
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            const int jb = j == 0 ? 0 : (j == ny - 1 ? ny - 3 : j - 1);
            const double uy = w1[j][0] * u(jb, i) + w1[j][1] * u(jb + 1, i) + w1[j][2] * u(jb + 2, i);
            const double uyy = w2[j][0] * u(jb, i) + w2[j][1] * u(jb + 1, i) + w2[j][2] * u(jb + 2, i);
            const double w = xaxis.qw[i] * yaxis.qw[j];
            r.Omega += w * uy * uy;
            r.P += w * uyy * uyy;
        }
    }
    const ArrayXd tau = wall_shear_prandtl(u, yaxis);
    for (int i = 0; i < nx; ++i) {
        r.I_omega += -xaxis.qw[i] * tau[i];
        r.I_p += xaxis.qw[i] * tau[i] * forcing[i];
    }
    return r;
}

// ---------------------------------------------------------------------------
// Stagnation points
// ---------------------------------------------------------------------------

std::vector<StagnationPoint> find_stagnation_points(
    const ArrayXXd& u, const ArrayXXd& v,
    const ArrayXd& xphys, const ArrayXd& yphys,
    double x_lo, double x_hi, double y_lo, double y_hi) {
    const int nx = static_cast<int>(xphys.size());
    const int ny = static_cast<int>(yphys.size());
    std::vector<StagnationPoint> pts;

    for (int i = 0; i < nx - 1; ++i) {
        if (xphys[i + 1] < x_lo || xphys[i] > x_hi) continue;
        for (int j = 0; j < ny - 1; ++j) {
            if (yphys[j + 1] < y_lo || yphys[j] > y_hi) continue;
            const double u00 = u(j, i), u10 = u(j, i + 1), u01 = u(j + 1, i), u11 = u(j + 1, i + 1);
            const double v00 = v(j, i), v10 = v(j, i + 1), v01 = v(j + 1, i), v11 = v(j + 1, i + 1);
            const double umin = std::min(std::min(u00, u10), std::min(u01, u11));
            const double umax = std::max(std::max(u00, u10), std::max(u01, u11));
            const double vmin = std::min(std::min(v00, v10), std::min(v01, v11));
            const double vmax = std::max(std::max(v00, v10), std::max(v01, v11));
            if (umin > 0.0 || umax < 0.0 || vmin > 0.0 || vmax < 0.0) continue;

            // Newton on the bilinear interpolants from the cell center.
            double xi = 0.5, eta = 0.5;
            bool ok = false;
            for (int it = 0; it < 40; ++it) {
                const double U = u00 * (1 - xi) * (1 - eta) + u10 * xi * (1 - eta) +
                                 u01 * (1 - xi) * eta + u11 * xi * eta;
                const double V = v00 * (1 - xi) * (1 - eta) + v10 * xi * (1 - eta) +
                                 v01 * (1 - xi) * eta + v11 * xi * eta;
                const double Uxi = (1 - eta) * (u10 - u00) + eta * (u11 - u01);
                const double Ueta = (1 - xi) * (u01 - u00) + xi * (u11 - u10);
                const double Vxi = (1 - eta) * (v10 - v00) + eta * (v11 - v01);
                const double Veta = (1 - xi) * (v01 - v00) + xi * (v11 - v10);
                const double det = Uxi * Veta - Ueta * Vxi;
                const double scale = std::max({std::abs(u00), std::abs(u10), std::abs(u01),
                                               std::abs(u11), std::abs(v00), std::abs(v10),
                                               std::abs(v01), std::abs(v11), 1e-300});
                if (std::abs(U) < 1e-11 * scale && std::abs(V) < 1e-11 * scale) {
                    ok = true;
                    break;
                }
                if (std::abs(det) < 1e-300) break;
                xi -= (U * Veta - V * Ueta) / det;
                eta -= (V * Uxi - U * Vxi) / det;
                if (xi < -1.0 || xi > 2.0 || eta < -1.0 || eta > 2.0) break;
            }
            if (!ok || xi < -0.02 || xi > 1.02 || eta < -0.02 || eta > 1.02) continue;

            const double dxc = xphys[i + 1] - xphys[i];
            const double dyc = yphys[j + 1] - yphys[j];
            StagnationPoint p;
            p.x = xphys[i] + xi * dxc;
            p.y = yphys[j] + eta * dyc;
            if (p.x < x_lo || p.x > x_hi || p.y < y_lo || p.y > y_hi) continue;
            const double Uxi = (1 - eta) * (u10 - u00) + eta * (u11 - u01);
            const double Ueta = (1 - xi) * (u01 - u00) + xi * (u11 - u10);
            const double Vxi = (1 - eta) * (v10 - v00) + eta * (v11 - v01);
            const double Veta = (1 - xi) * (v01 - v00) + xi * (v11 - v10);
            p.jac_det = (Uxi * Veta - Ueta * Vxi) / (dxc * dyc);
            p.is_center = p.jac_det > 0.0;

            bool dup = false;
            for (const auto& q : pts)
                if (std::abs(q.x - p.x) < 0.51 * dxc && std::abs(q.y - p.y) < 0.51 * dyc) dup = true;
            if (!dup) pts.push_back(p);
        }
    }
    return pts;
}

// ---------------------------------------------------------------------------
// Profile critical points
// ---------------------------------------------------------------------------

std::vector<CriticalPoint> profile_critical_points(const ArrayXd& x, const ArrayXd& f,
                                                   double x_lo, double x_hi) {
    const int n = static_cast<int>(x.size());
    if (n < 5) throw std::invalid_argument("profile_critical_points: need >= 5 samples");
    const ArrayXd g = profile_derivative(x, f);
    const ArrayXd s = profile_derivative(x, g);

    std::vector<CriticalPoint> out;
    auto crossings = [&](const ArrayXd& q, bool is_deriv1) {
        for (int i = 1; i < n - 2; ++i) {
            if (q[i] == 0.0 && q[i + 1] == 0.0) continue;
            const bool crosses = (q[i] < 0.0 && q[i + 1] > 0.0) || (q[i] > 0.0 && q[i + 1] < 0.0) ||
                                 (q[i] == 0.0 && q[i - 1] * q[i + 1] < 0.0);
            if (!crosses) continue;
            const double frac = q[i] == 0.0 ? 0.0 : q[i] / (q[i] - q[i + 1]);
            const double xs = x[i] + frac * (x[i + 1] - x[i]);
            if (xs <= x_lo || xs >= x_hi) continue;
            CriticalPoint c;
            c.x = xs;
            c.value = interp_linear(x, f, xs);
            if (is_deriv1)
                c.kind = q[i] < q[i + 1] ? CritKind::minimum : CritKind::maximum;
            else
                c.kind = CritKind::inflection;
            out.push_back(c);
        }
    };
    crossings(g, true);
    crossings(s, false);
    std::sort(out.begin(), out.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        return a.x < b.x;
    });
    return out;
}

std::vector<ProfileMinimum> local_minima(const ArrayXd& x, const ArrayXd& f,
                                         double x_lo, double x_hi,
                                         double prominence) {
    const int n = static_cast<int>(x.size());
    std::vector<ProfileMinimum> out;
    for (int i = 1; i < n - 1; ++i) {
        if (x[i] < x_lo || x[i] > x_hi) continue;
        if (!(f[i] < f[i - 1] && f[i] <= f[i + 1])) continue;
        // Barrier walk: require a rise of at least `prominence` on both sides
        // before the profile drops below this minimum again.
        bool okl = false, okr = false;
        for (int k = i - 1; k >= 0; --k) {
            if (f[k] >= f[i] + prominence) { okl = true; break; }
            if (f[k] < f[i]) break;
        }
        for (int k = i + 1; k < n; ++k) {
            if (f[k] >= f[i] + prominence) { okr = true; break; }
            if (f[k] < f[i]) break;
        }
        if (!okl || !okr) continue;
        ProfileMinimum m;
        m.i = i;
        // Sub-grid refinement on the local quadratic through the three nodes.
        const Array3d w1 = lagrange_d1_weights(x[i - 1] - x[i], 0.0, x[i + 1] - x[i]);
        const Array3d w2 = lagrange_d2_weights(x[i - 1] - x[i], 0.0, x[i + 1] - x[i]);
        const double g = w1[0] * f[i - 1] + w1[1] * f[i] + w1[2] * f[i + 1];
        const double h = w2[0] * f[i - 1] + w2[1] * f[i] + w2[2] * f[i + 1];
        if (h > 0.0) {
            m.x = x[i] - g / h;
            m.value = f[i] - 0.5 * g * g / h;
        } else {
            m.x = x[i];
            m.value = f[i];
        }
        out.push_back(m);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Vortex cores
// ---------------------------------------------------------------------------

std::vector<CoreSample> find_cores(const ArrayXXd& omega,
                                   const ArrayXd& xphys, const ArrayXd& yphys,
                                   int sign, double rel_threshold,
                                   double x_lo, double x_hi, double y_lo, double y_hi,
                                   double t) {
    const int nx = static_cast<int>(xphys.size());
    const int ny = static_cast<int>(yphys.size());
    double wmax = 0.0;
    for (int i = 0; i < nx; ++i) {
        if (xphys[i] < x_lo || xphys[i] > x_hi) continue;
        for (int j = 0; j < ny; ++j) {
            if (yphys[j] < y_lo || yphys[j] > y_hi) continue;
            wmax = std::max(wmax, std::abs(omega(j, i)));
        }
    }
    const double thresh = rel_threshold * wmax;

    std::vector<CoreSample> out;
    for (int i = 1; i < nx - 1; ++i) {
        if (xphys[i] < x_lo || xphys[i] > x_hi) continue;
        for (int j = 1; j < ny - 1; ++j) {
            if (yphys[j] < y_lo || yphys[j] > y_hi) continue;
            const double q = sign * omega(j, i);
            if (q <= thresh) continue;
            bool peak = true;
            for (int di = -1; di <= 1 && peak; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    if (sign * omega(j + dj, i + di) >= q) { peak = false; break; }
                }
            if (!peak) continue;
            CoreSample c;
            c.t = t;
            c.peak = omega(j, i);
            // Parabolic sub-cell refinement along each axis.
            auto vertex = [](double xm, double x0, double xp,
                             double fm, double f0, double fp) {
                const Array3d w1 = lagrange_d1_weights(xm - x0, 0.0, xp - x0);
                const Array3d w2 = lagrange_d2_weights(xm - x0, 0.0, xp - x0);
                const double g = w1[0] * fm + w1[1] * f0 + w1[2] * fp;
                const double h = w2[0] * fm + w2[1] * f0 + w2[2] * fp;
                return h < 0.0 ? x0 - g / h : x0;
            };
            c.x = vertex(xphys[i - 1], xphys[i], xphys[i + 1],
                         sign * omega(j, i - 1), q, sign * omega(j, i + 1));
            c.y = vertex(yphys[j - 1], yphys[j], yphys[j + 1],
                         sign * omega(j - 1, i), q, sign * omega(j + 1, i));
            out.push_back(c);
        }
    }
    return out;
}

std::vector<VortexTrack> link_tracks(const std::vector<std::vector<CoreSample>>& frames,
                                     double max_jump) {
    std::vector<VortexTrack> tracks;
    std::vector<int> active;  // indices into tracks still being extended

    for (const auto& frame : frames) {
        std::vector<bool> claimed(frame.size(), false);
        std::vector<int> still_active;
        for (int ti : active) {
            const CoreSample& last = tracks[ti].samples.back();
            int best = -1, second = -1;
            double dbest = max_jump, dsecond = max_jump;
            for (int k = 0; k < static_cast<int>(frame.size()); ++k) {
                if (claimed[k]) continue;
                const double d = std::hypot(frame[k].x - last.x, frame[k].y - last.y);
                if (d < dbest) {
                    second = best;
                    dsecond = dbest;
                    best = k;
                    dbest = d;
                } else if (d < dsecond) {
                    second = k;
                    dsecond = d;
                }
            }
            if (best < 0) continue;  // track ends
            if (second >= 0 && dsecond < 1.3 * dbest) {
                // Near-tie: prefer the candidate whose peak matches the track.
                if (std::abs(frame[second].peak - last.peak) <
                    std::abs(frame[best].peak - last.peak))
                    best = second;
                tracks[ti].ambiguous = true;
            }
            claimed[best] = true;
            tracks[ti].samples.push_back(frame[best]);
            still_active.push_back(ti);
        }
        for (int k = 0; k < static_cast<int>(frame.size()); ++k) {
            if (claimed[k]) continue;
            VortexTrack tr;
            tr.samples.push_back(frame[k]);
            still_active.push_back(static_cast<int>(tracks.size()));
            tracks.push_back(std::move(tr));
        }
        active = std::move(still_active);
    }
    std::sort(tracks.begin(), tracks.end(), [](const VortexTrack& a, const VortexTrack& b) {
        return a.samples.front().t < b.samples.front().t;
    });
    return tracks;
}

std::vector<int> series_peaks(const ArrayXd& f, double rel_prominence) {
    const int n = static_cast<int>(f.size());
    std::vector<int> out;
    if (n < 3) return out;
    const double range = f.maxCoeff() - f.minCoeff();
    if (range <= 0.0) return out;
    const double prom = rel_prominence * range;
    for (int i = 1; i < n - 1; ++i) {
        if (!(f[i] > f[i - 1] && f[i] >= f[i + 1])) continue;
        bool okl = false, okr = false;
        for (int k = i - 1; k >= 0; --k) {
            if (f[k] <= f[i] - prom) { okl = true; break; }
            if (f[k] > f[i]) break;
        }
        for (int k = i + 1; k < n; ++k) {
            if (f[k] <= f[i] - prom) { okr = true; break; }
            if (f[k] > f[i]) break;
        }
        if (okl && okr) out.push_back(i);
    }
    return out;
}

}  // namespace vbl
