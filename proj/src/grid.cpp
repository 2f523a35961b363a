#include "vortexbl/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace vbl {

namespace {

void finalize(MappedAxis& ax) {
    const int n = ax.n();
    if (n < 2) throw std::invalid_argument("MappedAxis: need at least 2 nodes");
    for (int i = 0; i + 1 < n; ++i)
        if (!(ax.phys[i] < ax.phys[i + 1]))
            throw std::runtime_error("MappedAxis: physical nodes not strictly increasing");
    for (int i = 0; i < n; ++i)
        if (!(ax.d1[i] > 0.0))
            throw std::runtime_error("MappedAxis: non-positive metric derivative");
    ax.dcomp = ax.comp[1] - ax.comp[0];
    ax.qw.resize(n);
    ax.qw[0] = 0.5 * (ax.phys[1] - ax.phys[0]);
    for (int i = 1; i + 1 < n; ++i) ax.qw[i] = 0.5 * (ax.phys[i + 1] - ax.phys[i - 1]);
    ax.qw[n - 1] = 0.5 * (ax.phys[n - 1] - ax.phys[n - 2]);
}

}  // namespace

MappedAxis build_arctan_line_axis(const ArctanMap& m, int n) {
    if (n < 3) throw std::invalid_argument("build_arctan_line_axis: need n >= 3");
    MappedAxis ax;
    ax.kind = AxisKind::arctan_line;
    ax.comp.resize(n);
    ax.phys.resize(n);
    ax.d1.resize(n);
    ax.d2.resize(n);
    const double h = 2.0 / (n + 1);
    for (int i = 0; i < n; ++i) {
        ax.comp[i] = -1.0 + (i + 1) * h;
        ax.phys[i] = arctan_inverse(ax.comp[i], m);
        ax.d1[i] = arctan_d1(ax.phys[i], m);
        ax.d2[i] = arctan_d2(ax.phys[i], m);
    }
    // Enforce the exact center node for odd n; atan/tan round-trips can
    // leave the midpoint a few ulp off zero otherwise.
    if (n % 2 == 1) {
        const int mid = n / 2;
        ax.comp[mid] = 0.0;
        ax.phys[mid] = m.center;
        ax.d1[mid] = arctan_d1(m.center, m);
        ax.d2[mid] = arctan_d2(m.center, m);
    }
    finalize(ax);
    return ax;
}

MappedAxis build_arctan_half_line_axis(double scale, double y_max, int n) {
    if (n < 3) throw std::invalid_argument("build_arctan_half_line_axis: need n >= 3");
    if (!(scale > 0.0) || !(y_max > 0.0))
        throw std::invalid_argument("build_arctan_half_line_axis: scale and y_max must be positive");
    const ArctanMap m{0.0, scale};
    MappedAxis ax;
    ax.kind = AxisKind::arctan_half_line;
    ax.comp.resize(n);
    ax.phys.resize(n);
    ax.d1.resize(n);
    ax.d2.resize(n);
    const double top = arctan_forward(y_max, m);
    const double h = top / (n - 1);
    for (int i = 0; i < n; ++i) {
        ax.comp[i] = i * h;
        ax.phys[i] = (i == 0) ? 0.0 : (i == n - 1 ? y_max : arctan_inverse(ax.comp[i], m));
        ax.d1[i] = arctan_d1(ax.phys[i], m);
        ax.d2[i] = arctan_d2(ax.phys[i], m);
    }
    finalize(ax);
    return ax;
}

MappedAxis build_stretch_axis(const TwoFocusMap& m, double phys_lo, double phys_hi, int n) {
    if (n < 3) throw std::invalid_argument("build_stretch_axis: need n >= 3");
    if (!(phys_lo < phys_hi))
        throw std::invalid_argument("build_stretch_axis: phys_lo must be < phys_hi");
    const BijectivityReport rep = check_bijectivity(m, phys_lo, phys_hi, 20001);
    if (!rep.ok)
        throw std::invalid_argument("build_stretch_axis: map not monotone on the requested interval");
    MappedAxis ax;
    ax.kind = AxisKind::stretch;
    ax.comp.resize(n);
    ax.phys.resize(n);
    ax.d1.resize(n);
    ax.d2.resize(n);
    const double lo = two_focus_forward(phys_lo, m);
    const double hi = two_focus_forward(phys_hi, m);
    const double h = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) {
        ax.comp[i] = lo + i * h;
        ax.phys[i] = (i == 0) ? phys_lo
                   : (i == n - 1 ? phys_hi : two_focus_inverse(ax.comp[i], m));
        ax.d1[i] = two_focus_d1(ax.phys[i], m);
        ax.d2[i] = two_focus_d2(ax.phys[i], m);
    }
    finalize(ax);
    return ax;
}

MappedAxis build_uniform_axis(double lo, double hi, int n) {
    if (n < 2) throw std::invalid_argument("build_uniform_axis: need n >= 2");
    if (!(lo < hi)) throw std::invalid_argument("build_uniform_axis: lo must be < hi");
    MappedAxis ax;
    ax.kind = AxisKind::uniform;
    ax.comp = ArrayXd::LinSpaced(n, lo, hi);
    ax.phys = ax.comp;
    ax.d1 = ArrayXd::Ones(n);
    ax.d2 = ArrayXd::Zero(n);
    finalize(ax);
    return ax;
}

double integrate(const MappedAxis& axis, const ArrayXd& values) {
    if (values.size() != axis.comp.size())
        throw std::invalid_argument("integrate: size mismatch");
    return (axis.qw * values).sum();
}

MappedAxis coarsen_axis(const MappedAxis& axis) {
    const int n = axis.n();
    if (n < 3 || n % 2 == 0)
        throw std::invalid_argument("coarsen_axis: need odd n >= 3");
    const int nc = (n + 1) / 2;
    MappedAxis ax;
    ax.kind = axis.kind;
    ax.comp.resize(nc);
    ax.phys.resize(nc);
    ax.d1.resize(nc);
    ax.d2.resize(nc);
    for (int i = 0; i < nc; ++i) {
        ax.comp[i] = axis.comp[2 * i];
        ax.phys[i] = axis.phys[2 * i];
        ax.d1[i] = axis.d1[2 * i];
        ax.d2[i] = axis.d2[2 * i];
    }
    finalize(ax);
    return ax;
}

}  // namespace vbl
