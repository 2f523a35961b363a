#include "vortexbl/prandtl.hpp"

#include <cmath>
#include <stdexcept>

#include "vortexbl/euler.hpp"

namespace vbl {

void PrandtlConfig::validate() const {
    if (nx < 8 || ny < 8) throw std::invalid_argument("prandtl: grid too small");
    if (alpha <= 0.0 || beta <= 0.0) throw std::invalid_argument("prandtl: map scales must be positive");
    if (y_max <= 0.0) throw std::invalid_argument("prandtl: y_max must be positive");
    if (!(epsilon > 0.0) || epsilon >= 0.1 * y_max)
        throw std::invalid_argument("prandtl: epsilon must lie in (0, y_max/10)");
    if (cfl_safety <= 0.0 || cfl_safety > 1.0)
        throw std::invalid_argument("prandtl: cfl_safety must lie in (0, 1]");
    if (dt_max <= 0.0 || dt_min <= 0.0 || dt_min > dt_max)
        throw std::invalid_argument("prandtl: need 0 < dt_min <= dt_max");
    if (t_end <= 0.0) throw std::invalid_argument("prandtl: t_end must be positive");
}

PrandtlSolver::PrandtlSolver(const PrandtlConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    ax_ = build_arctan_line_axis(ArctanMap{cfg_.x_center, cfg_.alpha}, cfg_.nx);
    ay_ = build_arctan_half_line_axis(cfg_.beta, cfg_.y_max, cfg_.ny);

    uinf_.resize(cfg_.nx);
    forcing_.resize(cfg_.nx);
    for (int i = 0; i < cfg_.nx; ++i) {
        uinf_[i] = freestream_velocity(ax_.phys[i]);
        forcing_[i] = freestream_forcing(ax_.phys[i]);
    }
    wall_bc_ = ArrayXd::Constant(cfg_.nx, -1.0);

    // Wall-normal diffusion u_YY on the mapped axis:
    //   u_YY = (dyhat/dY)^2 u_hh + (d2yhat/dY2) u_h,  h = yhat spacing.
    const double h = ay_.dcomp;
    diff_lo_.resize(cfg_.ny);
    diff_di_.resize(cfg_.ny);
    diff_up_.resize(cfg_.ny);
    diff_lo_.setZero();
    diff_di_.setZero();
    diff_up_.setZero();
    for (int j = 1; j < cfg_.ny - 1; ++j) {
        const double m1 = ay_.d1[j], m2 = ay_.d2[j];
        const double dyy = m1 * m1 / (h * h);
        const double dy1 = m2 / (2.0 * h);
        diff_lo_[j] = dyy - dy1;
        diff_di_[j] = -2.0 * dyy;
        diff_up_[j] = dyy + dy1;
    }

    u_.resize(cfg_.ny, cfg_.nx);
    V_.resize(cfg_.ny, cfg_.nx);
    ke1_.resize(cfg_.ny, cfg_.nx);
    ke2_.resize(cfg_.ny, cfg_.nx);
    ke3_.resize(cfg_.ny, cfg_.nx);
    ki_.resize(cfg_.ny, cfg_.nx);
    stage_.resize(cfg_.ny, cfg_.nx);
    half_.resize(cfg_.ny, cfg_.nx);
    reset();
}

void PrandtlSolver::reset() {
    // Cubic Hermite ramp S(eta) = 3 eta^2 - 2 eta^3, zero slope at both ends:
    // u = -1 + (U_inf + 1) S(Y / eps) below Y = eps, u = U_inf above.
    for (int i = 0; i < cfg_.nx; ++i) {
        const double due = uinf_[i] + 1.0;
        for (int j = 0; j < cfg_.ny; ++j) {
            const double eta = std::min(ay_.phys[j] / cfg_.epsilon, 1.0);
            const double s = eta * eta * (3.0 - 2.0 * eta);
            u_(j, i) = -1.0 + due * s;
        }
    }
    enforce_boundaries(u_);
    t_ = 0.0;
    step_ = 0;
}

void PrandtlSolver::set_state(const ArrayXXd& u, double t, long step) {
    if (u.rows() != cfg_.ny || u.cols() != cfg_.nx)
        throw std::invalid_argument("prandtl: state shape mismatch");
    u_ = u;
    enforce_boundaries(u_);
    t_ = t;
    step_ = step;
}

void PrandtlSolver::enforce_boundaries(ArrayXXd& u) const {
    u.row(0) = -1.0;                        // wall, comoving frame
    u.row(cfg_.ny - 1) = uinf_.transpose(); // matching with the outer flow
    u.col(0) = -1.0;                        // far upstream U_inf -> -1
    u.col(cfg_.nx - 1) = -1.0;              // far downstream
}

void PrandtlSolver::compute_v(const ArrayXXd& u, ArrayXXd& V) const {
    const int nx = cfg_.nx, ny = cfg_.ny;
    const double hx = ax_.dcomp;
    V.resize(ny, nx);
    // G = du/dx (physical) column by column, then V = -cumtrapz_Y G.
    for (int i = 0; i < nx; ++i) {
        const double m = ax_.d1[i];
        double gprev = 0.0;
        V(0, i) = 0.0;
        for (int j = 0; j < ny; ++j) {
            double g;
            if (i == 0)
                g = m * (u(j, 1) - u(j, 0)) / hx;
            else if (i == nx - 1)
                g = m * (u(j, nx - 1) - u(j, nx - 2)) / hx;
            else
                g = m * (u(j, i + 1) - u(j, i - 1)) / (2.0 * hx);
            if (j > 0)
                V(j, i) = V(j - 1, i) - 0.5 * (g + gprev) * (ay_.phys[j] - ay_.phys[j - 1]);
            gprev = g;
        }
    }
}

void PrandtlSolver::rhs_explicit(const ArrayXXd& u, const ArrayXXd& V, double dt,
                                 ArrayXXd& out) const {
    const int nx = cfg_.nx, ny = cfg_.ny;
    const double hx = ax_.dcomp, hy = ay_.dcomp;
    out.resize(ny, nx);
    out.setZero();

    // Streamwise term: provisional half-step values at cell midpoints with
    // the advection speed u * dxhat/dx frozen at the midpoint, then a
    // centered corrector. half_(j, i) holds the i+1/2 face value.
    for (int i = 0; i < nx - 1; ++i) {
        const double mmid = 0.5 * (ax_.d1[i] + ax_.d1[i + 1]);
        for (int j = 1; j < ny - 1; ++j) {
            const double um = 0.5 * (u(j, i) + u(j, i + 1));
            const double c = um * mmid;
            half_(j, i) = um - (0.5 * dt / hx) * c * (u(j, i + 1) - u(j, i));
        }
    }
    for (int i = 1; i < nx - 1; ++i) {
        const double m = ax_.d1[i];
        for (int j = 1; j < ny - 1; ++j)
            out(j, i) = -u(j, i) * m * (half_(j, i) - half_(j, i - 1)) / hx;
    }

    // Wall-normal term, same construction along columns.
    for (int i = 1; i < nx - 1; ++i) {
        for (int j = 0; j < ny - 1; ++j) {
            const double mmid = 0.5 * (ay_.d1[j] + ay_.d1[j + 1]);
            const double vm = 0.5 * (V(j, i) + V(j + 1, i));
            const double c = vm * mmid;
            half_(j, i) = 0.5 * (u(j, i) + u(j + 1, i)) - (0.5 * dt / hy) * c * (u(j + 1, i) - u(j, i));
        }
        for (int j = 1; j < ny - 1; ++j)
            out(j, i) += -V(j, i) * ay_.d1[j] * (half_(j, i) - half_(j - 1, i)) / hy + forcing_[i];
    }
}

void PrandtlSolver::apply_diffusion(const ArrayXXd& u, ArrayXXd& out) const {
    const int nx = cfg_.nx, ny = cfg_.ny;
    out.resize(ny, nx);
    out.setZero();
    for (int i = 0; i < nx; ++i)
        for (int j = 1; j < ny - 1; ++j)
            out(j, i) = diff_lo_[j] * u(j - 1, i) + diff_di_[j] * u(j, i) + diff_up_[j] * u(j + 1, i);
}

void PrandtlSolver::implicit_solve(ArrayXXd& rhs, double coeff,
                                   const ArrayXd& wall, const ArrayXd& top) const {
    const int nx = cfg_.nx, ny = cfg_.ny;
    if (coeff != fact_coeff_) {
        ArrayXd lo(ny), di(ny), up(ny);
        lo.setZero();
        up.setZero();
        di.setOnes();  // Dirichlet identity rows at j = 0 and j = ny-1
        for (int j = 1; j < ny - 1; ++j) {
            lo[j] = -coeff * diff_lo_[j];
            di[j] = 1.0 - coeff * diff_di_[j];
            up[j] = -coeff * diff_up_[j];
        }
        fact_.factorize(lo, di, up);
        fact_coeff_ = coeff;
    }
    for (int i = 0; i < nx; ++i) {
        rhs(0, i) = wall[i];
        rhs(ny - 1, i) = top[i];
        fact_.solve(rhs.col(i).data(), 1);
    }
}

double PrandtlSolver::cfl_dt() const {
    const int nx = cfg_.nx, ny = cfg_.ny;
    const double hx = ax_.dcomp, hy = ay_.dcomp;
    compute_v(u_, V_);
    double dt = cfg_.dt_max;
    for (int i = 0; i < nx; ++i) {
        const double mx = ax_.d1[i];
        for (int j = 0; j < ny; ++j) {
            const double cx = std::abs(u_(j, i)) * mx;
            if (cx > 1e-14) dt = std::min(dt, hx / cx);
            const double cy = std::abs(V_(j, i)) * ay_.d1[j];
            if (cy > 1e-14) dt = std::min(dt, hy / cy);
        }
    }
    return cfg_.cfl_safety * dt;
}

GradientProbe PrandtlSolver::gradient_probe() const {
    const int nx = cfg_.nx, ny = cfg_.ny;
    const double hx = ax_.dcomp;
    GradientProbe p;
    int i_mapped = 0;
    for (int i = 1; i < nx - 1; ++i) {
        const double m = ax_.d1[i];
        for (int j = 1; j < ny - 1; ++j) {
            const double gm = std::abs((u_(j, i + 1) - u_(j, i - 1)) / (2.0 * hx));
            const double g = m * gm;
            if (g > p.value) {
                p.value = g;
                p.i = i;
                p.j = j;
            }
            if (gm > p.mapped) {
                p.mapped = gm;
                i_mapped = i;
            }
        }
    }
    p.x = ax_.phys[p.i];
    p.mapped_x = ax_.phys[i_mapped];
    return p;
}

PrandtlStepResult PrandtlSolver::advance() {
    PrandtlStepResult res;
    const double remaining = cfg_.t_end - t_;
    if (remaining <= 0.0) {
        res.stop = PrandtlStop::time_end;
        return res;
    }

    const double dt_prop = cfl_dt();  // also fills V_ for stage 1
    if (dt_prop < cfg_.dt_min) {
        res.stop = PrandtlStop::blowup_dt;
        res.probe = gradient_probe();
        return res;
    }
    const double dt = std::min(dt_prop, remaining);
    res.dt = dt;

    const double g = tab_.gamma;
    const double cimp = dt * g;

    // Stage 1 explicit tendency (V_ already matches u_).
    rhs_explicit(u_, V_, dt, ke1_);

    // Stage 2: (I - dt g L) U2 = u + dt g KE1.
    stage_ = u_ + dt * g * ke1_;
    implicit_solve(stage_, cimp, wall_bc_, uinf_);
    apply_diffusion(stage_, ki_);
    compute_v(stage_, V_);
    rhs_explicit(stage_, V_, dt, ke2_);

    // Stage 3: (I - dt g L) U3 = u + dt [(g-1) KE1 + 2(1-g) KE2 + (1-2g) KI2].
    stage_ = u_ + dt * ((g - 1.0) * ke1_ + 2.0 * (1.0 - g) * ke2_ + (1.0 - 2.0 * g) * ki_);
    implicit_solve(stage_, cimp, wall_bc_, uinf_);

    // Assemble u^{n+1} = u + dt/2 (KE2 + KI2 + KE3 + KI3).
    u_ += 0.5 * dt * (ke2_ + ki_);
    apply_diffusion(stage_, ki_);
    compute_v(stage_, V_);
    rhs_explicit(stage_, V_, dt, ke3_);
    u_ += 0.5 * dt * (ke3_ + ki_);
    enforce_boundaries(u_);

    t_ += dt;
    ++step_;

    res.probe = gradient_probe();
    if (res.probe.mapped > cfg_.blowup_grad) {
        res.stop = PrandtlStop::blowup_gradient;
        return res;
    }
    if (t_ >= cfg_.t_end - 1e-12) res.stop = PrandtlStop::time_end;
    return res;
}

ArrayXd lw_periodic_tendency(const ArrayXd& u, double c, double h, double dt) {
    const int n = static_cast<int>(u.size());
    ArrayXd half(n), out(n);
    const double r = dt / (2.0 * h);
    for (int i = 0; i < n; ++i) {
        const int ip = i + 1 == n ? 0 : i + 1;
        half[i] = 0.5 * (u[i] + u[ip]) - r * c * (u[ip] - u[i]);
    }
    for (int i = 0; i < n; ++i) {
        const int im = i == 0 ? n - 1 : i - 1;
        out[i] = -c * (half[i] - half[im]) / h;
    }
    return out;
}

}  // namespace vbl
