#include "vortexbl/navier_stokes.hpp"

#include <cmath>
#include <stdexcept>

#include "vortexbl/euler.hpp"
#include "vortexbl/tridiag.hpp"

namespace vbl {

namespace {
constexpr double kPi = 3.14159265358979323846;

bool pow2_plus_1(int n) {
    if (n < 5) return false;
    const int m = n - 1;
    return (m & (m - 1)) == 0;
}
}  // namespace

TwoFocusMap NSStretchParams::xmap() const {
    TwoFocusMap m;
    m.c_lead = x1;
    m.beta_lead = beta_x1;
    m.c_mod = x2;
    m.beta_mod = beta_x2;
    m.gamma = gamma;
    return m;
}

TwoFocusMap NSStretchParams::ymap() const {
    TwoFocusMap m;
    m.c_lead = y2;
    m.beta_lead = beta_y2;
    m.c_mod = y1;
    m.beta_mod = beta_y1;
    m.gamma = gamma;
    return m;
}

void NSConfig::validate() const {
    if (!pow2_plus_1(nx) || !pow2_plus_1(ny))
        throw std::invalid_argument("ns: grid sides must be 2^k + 1 for the multigrid solver");
    if (re <= 0.0) throw std::invalid_argument("ns: Re must be positive");
    if (dt <= 0.0) throw std::invalid_argument("ns: dt must be positive");
    if (t_end <= 0.0) throw std::invalid_argument("ns: t_end must be positive");
    if (sigma <= 0.0) throw std::invalid_argument("ns: sigma must be positive");
    if (stretch.x_lo >= stretch.x_hi || stretch.y_hi <= 0.0)
        throw std::invalid_argument("ns: bad truncation box");
    if (poisson_tol <= 0.0 || poisson_max_cycles < 1)
        throw std::invalid_argument("ns: bad poisson settings");
}

double jensen_wall_vorticity(double psi0, double psi1, double psi2,
                             double h1, double h2, double u_wall) {
    if (!(h1 > 0.0) || !(h2 > h1))
        throw std::invalid_argument("jensen_wall_vorticity: need 0 < h1 < h2");
    const double d1 = psi1 - psi0 - h1 * u_wall;
    const double d2 = psi2 - psi0 - h2 * u_wall;
    const double r = h1 / h2;
    const double psi_yy = 2.0 * (d1 - r * r * r * d2) / (h1 * h1 * (1.0 - r));
    return -psi_yy;
}

NSSolver::NSSolver(const NSConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    ax_ = build_stretch_axis(cfg_.stretch.xmap(), cfg_.stretch.x_lo, cfg_.stretch.x_hi, cfg_.nx);
    ay_ = build_stretch_axis(cfg_.stretch.ymap(), 0.0, cfg_.stretch.y_hi, cfg_.ny);
    mg_ = std::make_unique<Multigrid>(ax_, ay_);

    psi_top_.resize(cfg_.nx);
    for (int i = 0; i < cfg_.nx; ++i)
        psi_top_[i] = euler_streamfunction(ax_.phys[i], ay_.phys[cfg_.ny - 1]);
    psi_left_.resize(cfg_.ny);
    psi_right_.resize(cfg_.ny);
    for (int j = 0; j < cfg_.ny; ++j) {
        psi_left_[j] = euler_streamfunction(ax_.phys[0], ay_.phys[j]);
        psi_right_[j] = euler_streamfunction(ax_.phys[cfg_.nx - 1], ay_.phys[j]);
    }

    s_.omega.resize(cfg_.ny, cfg_.nx);
    s_.psi.resize(cfg_.ny, cfg_.nx);
    s_.u.resize(cfg_.ny, cfg_.nx);
    s_.v.resize(cfg_.ny, cfg_.nx);
    r1_.resize(cfg_.ny, cfg_.nx);
    r2_.resize(cfg_.ny, cfg_.nx);
    rhs_.resize(cfg_.ny, cfg_.nx);
    const int nmax = std::max(cfg_.nx, cfg_.ny);
    line_lo_.resize(nmax);
    line_di_.resize(nmax);
    line_up_.resize(nmax);
    line_rhs_.resize(nmax);
    reset();
}

void NSSolver::reset() {
    const double scale = cfg_.mollifier_normalized ? 1.0 / kPi : 1.0;
    for (int i = 0; i < cfg_.nx; ++i)
        for (int j = 0; j < cfg_.ny; ++j)
            s_.omega(j, i) = scale * vortex_blob(ax_.phys[i], ay_.phys[j], cfg_.sigma);
    enforce_far_omega();

    // Zero interior guess; poisson_solve installs the boundary values.  (The
    // outer streamfunction is log-singular at the vortex center, so it is not
    // a safe interior guess.)
    s_.psi.setZero();
    poisson_solve();
    velocities_from_psi(s_.psi, s_.u, s_.v);
    s_.omega.row(0) = wall_vorticity_row(s_.psi).transpose();
    s_.t = 0.0;
    s_.step = 0;
}

void NSSolver::set_state(const NSState& s) {
    if (s.omega.rows() != cfg_.ny || s.omega.cols() != cfg_.nx)
        throw std::invalid_argument("ns: state shape mismatch");
    s_ = s;
}

void NSSolver::enforce_far_omega() {
    s_.omega.row(cfg_.ny - 1) = 0.0;
    s_.omega.col(0) = 0.0;
    s_.omega.col(cfg_.nx - 1) = 0.0;
}

void NSSolver::poisson_solve() {
    rhs_ = -s_.omega;
    // Dirichlet data rides on psi: wall streamline 0, outer flow far away.
    s_.psi.row(0) = 0.0;
    s_.psi.row(cfg_.ny - 1) = psi_top_.transpose();
    s_.psi.col(0) = psi_left_;
    s_.psi.col(cfg_.nx - 1) = psi_right_;
    last_poisson_ = mg_->solve(rhs_, s_.psi, cfg_.poisson_tol, cfg_.poisson_max_cycles);
    if (!last_poisson_.converged)
        throw std::runtime_error("ns: multigrid stalled (relative residual " +
                                 std::to_string(last_poisson_.rel_residual) + ")");
}

void NSSolver::velocities_from_psi(const ArrayXXd& psi, ArrayXXd& u, ArrayXXd& v) const {
    const int nx = cfg_.nx, ny = cfg_.ny;
    const double hx = ax_.dcomp, hy = ay_.dcomp;
    u.resize(ny, nx);
    v.resize(ny, nx);
    for (int i = 0; i < nx; ++i) {
        for (int j = 1; j < ny - 1; ++j)
            u(j, i) = ay_.d1[j] * (psi(j + 1, i) - psi(j - 1, i)) / (2.0 * hy);
        u(0, i) = ay_.d1[0] * (-3.0 * psi(0, i) + 4.0 * psi(1, i) - psi(2, i)) / (2.0 * hy);
        u(ny - 1, i) = ay_.d1[ny - 1] *
                       (3.0 * psi(ny - 1, i) - 4.0 * psi(ny - 2, i) + psi(ny - 3, i)) / (2.0 * hy);
    }
    for (int j = 0; j < ny; ++j) {
        for (int i = 1; i < nx - 1; ++i)
            v(j, i) = -ax_.d1[i] * (psi(j, i + 1) - psi(j, i - 1)) / (2.0 * hx);
        v(j, 0) = -ax_.d1[0] * (-3.0 * psi(j, 0) + 4.0 * psi(j, 1) - psi(j, 2)) / (2.0 * hx);
        v(j, nx - 1) = -ax_.d1[nx - 1] *
                       (3.0 * psi(j, nx - 1) - 4.0 * psi(j, nx - 2) + psi(j, nx - 3)) / (2.0 * hx);
    }
}

ArrayXd NSSolver::wall_vorticity_row(const ArrayXXd& psi) const {
    const double h1 = ay_.phys[1] - ay_.phys[0];
    const double h2 = ay_.phys[2] - ay_.phys[0];
    ArrayXd w(cfg_.nx);
    for (int i = 0; i < cfg_.nx; ++i)
        w[i] = jensen_wall_vorticity(psi(0, i), psi(1, i), psi(2, i), h1, h2, -1.0);
    return w;
}

void NSSolver::advance() {
    const int nx = cfg_.nx, ny = cfg_.ny;
    const double hx = ax_.dcomp, hy = ay_.dcomp;
    const double k = 0.5 * cfg_.dt;
    const double inv_re = 1.0 / cfg_.re;

    // R1 = (I + k A_y) omega, column by column (boundary rows pass through).
    for (int i = 0; i < nx; ++i) {
        r1_(0, i) = s_.omega(0, i);
        r1_(ny - 1, i) = s_.omega(ny - 1, i);
        for (int j = 1; j < ny - 1; ++j) {
            const double dc = ay_.d1[j] * ay_.d1[j] * inv_re / (hy * hy);
            const double cy = (ay_.d1[j] * s_.v(j, i) - inv_re * ay_.d2[j]) / (2.0 * hy);
            r1_(j, i) = s_.omega(j, i) +
                        k * ((dc + cy) * s_.omega(j - 1, i) - 2.0 * dc * s_.omega(j, i) +
                             (dc - cy) * s_.omega(j + 1, i));
        }
    }

    // R2 = (I + k A_x) R1 on interior rows (lateral columns stay zero).
    for (int i = 1; i < nx - 1; ++i) {
        const double dc = ax_.d1[i] * ax_.d1[i] * inv_re / (hx * hx);
        for (int j = 1; j < ny - 1; ++j) {
            const double cx = (ax_.d1[i] * s_.u(j, i) - inv_re * ax_.d2[i]) / (2.0 * hx);
            r2_(j, i) = r1_(j, i) + k * ((dc + cx) * r1_(j, i - 1) - 2.0 * dc * r1_(j, i) +
                                         (dc - cx) * r1_(j, i + 1));
        }
    }

    // x sweep: (I - k A_x) omega* = R2 along each interior row, omega* = 0 at
    // the lateral boundaries (vorticity is identically zero there).
    line_lo_.resize(nx);
    line_di_.resize(nx);
    line_up_.resize(nx);
    line_rhs_.resize(nx);
    line_lo_[0] = line_up_[0] = line_lo_[nx - 1] = line_up_[nx - 1] = 0.0;
    line_di_[0] = line_di_[nx - 1] = 1.0;
    for (int j = 1; j < ny - 1; ++j) {
        line_rhs_[0] = 0.0;
        for (int i = 1; i < nx - 1; ++i) {
            const double dc = ax_.d1[i] * ax_.d1[i] * inv_re / (hx * hx);
            const double cx = (ax_.d1[i] * s_.u(j, i) - inv_re * ax_.d2[i]) / (2.0 * hx);
            line_lo_[i] = -k * (dc + cx);
            line_di_[i] = 1.0 + 2.0 * k * dc;
            line_up_[i] = -k * (dc - cx);
            line_rhs_[i] = r2_(j, i);
        }
        line_rhs_[nx - 1] = 0.0;
        tridiag_solve(line_lo_, line_di_, line_up_, line_rhs_);
        for (int i = 1; i < nx - 1; ++i) r2_(j, i) = line_rhs_[i];
    }

    // y sweep: (I - k A_y) omega^{n+1} = omega*, wall row held at the current
    // Jensen value (refreshed below), zero at the top.
    line_lo_.resize(ny);
    line_di_.resize(ny);
    line_up_.resize(ny);
    line_rhs_.resize(ny);
    line_lo_[0] = line_up_[0] = line_lo_[ny - 1] = line_up_[ny - 1] = 0.0;
    line_di_[0] = line_di_[ny - 1] = 1.0;
    for (int i = 1; i < nx - 1; ++i) {
        line_rhs_[0] = s_.omega(0, i);
        for (int j = 1; j < ny - 1; ++j) {
            const double dc = ay_.d1[j] * ay_.d1[j] * inv_re / (hy * hy);
            const double cy = (ay_.d1[j] * s_.v(j, i) - inv_re * ay_.d2[j]) / (2.0 * hy);
            line_lo_[j] = -k * (dc + cy);
            line_di_[j] = 1.0 + 2.0 * k * dc;
            line_up_[j] = -k * (dc - cy);
            line_rhs_[j] = r2_(j, i);
        }
        line_rhs_[ny - 1] = 0.0;
        tridiag_solve(line_lo_, line_di_, line_up_, line_rhs_);
        for (int j = 0; j < ny; ++j) s_.omega(j, i) = line_rhs_[j];
    }
    enforce_far_omega();

    poisson_solve();
    velocities_from_psi(s_.psi, s_.u, s_.v);
    s_.omega.row(0) = wall_vorticity_row(s_.psi).transpose();

    ++s_.step;
    s_.t = cfg_.dt * static_cast<double>(s_.step);

    const double wmax = s_.omega.abs().maxCoeff();
    if (!std::isfinite(wmax) || wmax > cfg_.omega_abort)
        throw std::runtime_error("ns: vorticity left sanity bounds at t = " + std::to_string(s_.t));
}

double NSSolver::boundary_omega_ratio() const {
    const int nx = cfg_.nx, ny = cfg_.ny;
    double interior = 0.0;
    for (int i = 1; i < nx - 1; ++i)
        for (int j = 1; j < ny - 1; ++j)
            interior = std::max(interior, std::abs(s_.omega(j, i)));
    double boundary = 0.0;
    for (int i = 0; i < nx; ++i) boundary = std::max(boundary, std::abs(s_.omega(ny - 1, i)));
    for (int j = 1; j < ny; ++j) {
        boundary = std::max(boundary, std::abs(s_.omega(j, 0)));
        boundary = std::max(boundary, std::abs(s_.omega(j, nx - 1)));
    }
    return interior > 0.0 ? boundary / interior : 0.0;
}

void NSSolver::max_dudx(double& value, double& x_at) const {
    const int nx = cfg_.nx, ny = cfg_.ny;
    const double hx = ax_.dcomp;
    value = 0.0;
    x_at = 0.0;
    for (int i = 1; i < nx - 1; ++i) {
        const double m = ax_.d1[i];
        for (int j = 1; j < ny - 1; ++j) {
            const double g = std::abs(m * (s_.u(j, i + 1) - s_.u(j, i - 1)) / (2.0 * hx));
            if (g > value) {
                value = g;
                x_at = ax_.phys[i];
            }
        }
    }
}

}  // namespace vbl
