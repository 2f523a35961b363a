/// Mapped-axis validation
///
/// Exercises both map families (single-focus arctangent, two-focus stretch)
/// against closed-form values and finite-difference oracles, then checks the
/// axis builders: node placement, metric derivatives, quadrature weights,
/// coarsening, and construction errors.

#include "test_support.hpp"
#include "vortexbl/grid.hpp"
#include "vortexbl/maps.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

using namespace vbl;
using namespace vbltest;

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Centered first difference of a scalar map, h chosen for ~1e-9 accuracy.
template <class F>
double fd1(F f, double x, double h = 1e-6) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Centered second difference.
template <class F>
double fd2(F f, double x, double h = 1e-4) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

/// Max relative mismatch between stored d1 and the node-to-node centered
/// difference of the computational coordinate, over interior nodes inside
/// [win_lo, win_hi].  The window keeps the comparison on a fixed physical
/// region; without it each refinement adds nodes deeper into the nearly flat
/// tails, where the error prefactor itself grows and masks the rate.
double metric_fd_error(const MappedAxis& ax, double win_lo, double win_hi) {
    double worst = 0.0;
    for (int i = 1; i + 1 < ax.n(); ++i) {
        if (ax.phys[i] < win_lo || ax.phys[i] > win_hi) continue;
        double fd = (ax.comp[i + 1] - ax.comp[i - 1]) / (ax.phys[i + 1] - ax.phys[i - 1]);
        worst = std::max(worst, std::abs(fd - ax.d1[i]) / ax.d1[i]);
    }
    return worst;
}

TwoFocusMap table_xmap() {
    TwoFocusMap m;
    m.c_lead = 0.0;
    m.beta_lead = 0.6;
    m.c_mod = 0.4;
    m.beta_mod = 0.15;
    m.gamma = 5.0;
    return m;
}

TwoFocusMap table_ymap() {
    TwoFocusMap m;
    m.c_lead = 0.0;   // wall focus
    m.beta_lead = 0.5;
    m.c_mod = 1.0;    // vortex height focus
    m.beta_mod = 0.2;
    m.gamma = 5.0;
    return m;
}

}  // namespace

// ============================================================================
// Test 1: arctangent map at analytic points
// ============================================================================
void test_arctan_analytic_points() {
    const ArctanMap m{0.21, 0.1};

    require_close(arctan_forward(0.21, m), 0.0, 1e-15, "center maps to 0");
    require_close(arctan_forward(0.21 + 0.1, m), 0.5, 1e-15, "one scale out maps to 0.5");
    require(arctan_forward(0.21 + 1e6 * 0.1, m) > 0.999999, "asymptote approached at 1e6 scales");
    require(arctan_forward(0.21 - 1e6 * 0.1, m) < -0.999999, "lower asymptote");

    // Metric derivatives against centered differences of the forward map.
    auto f = [&](double x) { return arctan_forward(x, m); };
    for (double x : {0.21, 0.05, -1.3, 2.0}) {
        require_rel(arctan_d1(x, m), fd1(f, x), 1e-7, "d1 vs finite difference");
        double d2ref = fd2(f, x);
        if (std::abs(d2ref) > 1e-6)
            require_rel(arctan_d2(x, m), d2ref, 1e-4, "d2 vs finite difference");
    }
    std::cout << "[PASS] arctangent map matches analytic points and derivatives\n";
}

// ============================================================================
// Test 2: arctangent inverse and round trips
// ============================================================================
void test_arctan_inverse() {
    const ArctanMap m{0.21, 0.1};

    require_close(arctan_inverse(0.0, m), 0.21, 1e-15, "inverse of 0 is the center");
    require_close(arctan_inverse(0.5, m), 0.31, 1e-14, "inverse of 0.5 is one scale out");
    require_close(arctan_forward(arctan_inverse(0.73, m), m), 0.73, 1e-12, "round trip at 0.73");

    for (int k = -19; k <= 19; ++k) {
        double xh = k * 0.05;
        require_rel(arctan_forward(arctan_inverse(xh, m), m), xh == 0.0 ? 0.0 : xh,
                    1e-12, "round trip sweep");
        if (xh == 0.0)
            require_close(arctan_inverse(0.0, m), 0.21, 1e-15, "round trip sweep center");
    }

    bool threw = false;
    try {
        arctan_inverse(1.0, m);
    } catch (const std::domain_error&) {
        threw = true;
    }
    require(threw, "inverse rejects |xhat| >= 1");
    std::cout << "[PASS] arctangent inverse round-trips to 1e-12\n";
}

// ============================================================================
// Test 3: two-focus map limits and focus values
// ============================================================================
void test_two_focus_limits() {
    const TwoFocusMap m = table_xmap();

    // Closed-form limits: x -> +inf gives exactly 1 by the normalization,
    // x -> -inf gives -(gamma - pi/2)/(gamma + pi/2).  The latter frozen from
    // a 30-digit evaluation of the expression at gamma = 5.
    const double lo_expected = -0.52188555277862349;
    require_close(m.lo_limit(), lo_expected, 1e-14, "closed-form lower limit");
    require_close(m.amplitude() * (kPi / 2.0) * (m.gamma + kPi / 2.0), 1.0, 1e-14,
                  "normalization gives upper limit 1");

    require(two_focus_forward(1e9, m) > 1.0 - 1e-7, "upper asymptote approached");
    require(two_focus_forward(-1e9, m) < lo_expected + 1e-7, "lower asymptote approached");
    require_close(two_focus_forward(m.c_lead, m), 0.0, 1e-15, "leading focus maps to 0");

    // Derivatives against centered differences.
    auto f = [&](double x) { return two_focus_forward(x, m); };
    for (double x : {-2.0, 0.0, 0.4, 1.7}) {
        require_rel(two_focus_d1(x, m), fd1(f, x), 1e-7, "stretch d1 vs finite difference");
        double d2ref = fd2(f, x);
        if (std::abs(d2ref) > 1e-6)
            require_rel(two_focus_d2(x, m), d2ref, 1e-4, "stretch d2 vs finite difference");
    }
    std::cout << "[PASS] two-focus limits match closed forms (lower limit "
              << lo_expected << ")\n";
}

// ============================================================================
// Test 4: bijectivity check accepts the production map, rejects a bad gamma
// ============================================================================
void test_bijectivity_check() {
    BijectivityReport ok = check_bijectivity(table_xmap(), -30.0, 30.0);
    require(ok.ok, "production x map passes");
    require(ok.min_margin > 0.0, "positive margin reported");

    TwoFocusMap bad = table_xmap();
    bad.gamma = -10.0;
    BijectivityReport rep = check_bijectivity(bad, -30.0, 30.0);
    require(!rep.ok, "gamma = -10 fails");
    require(rep.min_margin < 0.0, "negative margin reported");
    require(std::abs(rep.argmin_x) <= 30.0, "violation located inside the sample interval");
    std::cout << "[PASS] bijectivity check: margin " << ok.min_margin
              << " for the production map, fails for gamma = -10\n";
}

// ============================================================================
// Test 5: dense monotonicity of the passing map
// ============================================================================
void test_dense_monotonicity() {
    const TwoFocusMap m = table_xmap();
    const int n = 100001;
    double prev = two_focus_forward(-30.0, m);
    for (int i = 1; i < n; ++i) {
        double x = -30.0 + 60.0 * i / (n - 1);
        double cur = two_focus_forward(x, m);
        require(cur > prev, "strictly increasing at sample " + std::to_string(i));
        prev = cur;
    }
    std::cout << "[PASS] two-focus map strictly increasing on 1e5 samples\n";
}

// ============================================================================
// Test 6: two-focus inverse round trips and domain errors
// ============================================================================
void test_two_focus_inverse() {
    const TwoFocusMap m = table_xmap();
    const double lo = m.lo_limit();

    for (int k = 1; k < 40; ++k) {
        double xb = lo + (1.0 - lo) * k / 40.0;
        double x = two_focus_inverse(xb, m);
        require_rel(two_focus_forward(x, m), xb, 1e-12, "inverse round trip");
    }

    int caught = 0;
    for (double bad : {1.0, 1.5, lo, lo - 0.1}) {
        try {
            two_focus_inverse(bad, m);
        } catch (const std::domain_error&) {
            ++caught;
        }
    }
    require(caught == 4, "inverse rejects values outside the open range");
    std::cout << "[PASS] two-focus inverse round-trips to 1e-12\n";
}

// ============================================================================
// Test 7: whole-line axis places the center node exactly
// ============================================================================
void test_line_axis_center() {
    const ArctanMap m{0.21, 0.1};
    MappedAxis ax = build_arctan_line_axis(m, 129);

    require(ax.n() == 129, "node count");
    require_close(ax.phys[64], 0.21, 1e-15, "center node at the focus");
    require_close(ax.comp[64], 0.0, 1e-15, "center computational coordinate");

    const double h = ax.comp[1] - ax.comp[0];
    for (int i = 0; i + 1 < ax.n(); ++i)
        require_rel(ax.comp[i + 1] - ax.comp[i], h, 1e-12, "uniform computational spacing");
    for (int i = 0; i + 1 < ax.n(); ++i)
        require(ax.phys[i] < ax.phys[i + 1], "physical nodes increasing");
    require((ax.d1 > 0.0).all(), "d1 positive");
    std::cout << "[PASS] whole-line axis: center node exact, spacing uniform\n";
}

// ============================================================================
// Test 8: half-line axis endpoints and wall clustering
// ============================================================================
void test_half_line_axis() {
    MappedAxis ax = build_arctan_half_line_axis(0.1, 20.0, 129);

    require_close(ax.phys[0], 0.0, 0.0, "wall node exact");
    require_close(ax.phys[128], 20.0, 0.0, "top node exact");
    require_close(ax.comp[128], (2.0 / kPi) * std::atan(200.0), 1e-14,
                  "top computational coordinate");
    require(ax.phys[1] - ax.phys[0] < (ax.phys[128] - ax.phys[0]) / 1000.0,
            "clustering near the wall");
    std::cout << "[PASS] half-line axis: endpoints exact, wall spacing "
              << ax.phys[1] - ax.phys[0] << "\n";
}

// ============================================================================
// Test 9: stretch axis endpoints, clustering, and metric convergence
// ============================================================================
void test_stretch_axis() {
    MappedAxis ay = build_stretch_axis(table_ymap(), 0.0, 10.0, 65);

    require_close(ay.phys[0], 0.0, 0.0, "bottom endpoint exact");
    require_close(ay.phys[64], 10.0, 0.0, "top endpoint exact");

    // Clustering: spacing at the wall focus is tighter than at y = 5.
    int i5 = 0;
    for (int i = 0; i < ay.n(); ++i)
        if (std::abs(ay.phys[i] - 5.0) < std::abs(ay.phys[i5] - 5.0)) i5 = i;
    double near_wall = ay.phys[1] - ay.phys[0];
    double near_five = ay.phys[i5 + 1] - ay.phys[i5];
    require(near_wall < near_five, "spacing near the wall smaller than near y = 5");

    // Metric agreement with node-to-node differences improves at second
    // order: halving the spacing cuts the error by about 4.
    double e1 = metric_fd_error(build_stretch_axis(table_xmap(), -30.0, 30.0, 129), -5.0, 5.0);
    double e2 = metric_fd_error(build_stretch_axis(table_xmap(), -30.0, 30.0, 257), -5.0, 5.0);
    require_in(e1 / e2, 3.0, 5.0, "metric error halving rate");
    std::cout << "[PASS] stretch axis: clustering " << near_wall << " < " << near_five
              << ", metric error rate " << e1 / e2 << "\n";
}

// ============================================================================
// Test 10: quadrature weights and integration accuracy
// ============================================================================
void test_quadrature() {
    MappedAxis ax = build_stretch_axis(table_xmap(), -1.0, 2.0, 129);

    require_rel(ax.qw.sum(), 3.0, 1e-10, "weights sum to the interval length");

    // Trapezoid rule is exact on linear integrands for any node layout:
    // int_{-1}^{2} (2x + 1) dx = 6.
    ArrayXd lin = 2.0 * ax.phys + 1.0;
    require_rel(integrate(ax, lin), 6.0, 1e-12, "linear integrand exact");

    // Cubic integrand: int_{-1}^{2} x^3 dx = 15/4; error drops at second order.
    auto cubic_err = [&](int n) {
        MappedAxis a = build_stretch_axis(table_xmap(), -1.0, 2.0, n);
        ArrayXd f = a.phys.pow(3);
        return std::abs(integrate(a, f) - 3.75);
    };
    double r = cubic_err(65) / cubic_err(129);
    require_in(r, 3.0, 5.0, "cubic integration error halving rate");
    std::cout << "[PASS] quadrature: linear exact, cubic error rate " << r << "\n";
}

// ============================================================================
// Test 11: coarsening keeps every second node
// ============================================================================
void test_coarsen() {
    MappedAxis fine = build_stretch_axis(table_ymap(), 0.0, 10.0, 129);
    MappedAxis coarse = coarsen_axis(fine);

    require(coarse.n() == 65, "coarse node count");
    for (int i = 0; i < coarse.n(); ++i) {
        require_close(coarse.phys[i], fine.phys[2 * i], 0.0, "kept node identical");
        require_close(coarse.d1[i], fine.d1[2 * i], 0.0, "kept metric identical");
    }

    bool threw = false;
    try {
        coarsen_axis(build_uniform_axis(0.0, 1.0, 64));
    } catch (const std::invalid_argument&) {
        threw = true;
    }
    require(threw, "even node count rejected");
    std::cout << "[PASS] coarsening keeps every second node bit-exactly\n";
}

// ============================================================================
// Test 12: construction errors
// ============================================================================
void test_construction_errors() {
    int caught = 0;
    try {
        build_arctan_line_axis(ArctanMap{0.0, 1.0}, 2);
    } catch (const std::invalid_argument&) {
        ++caught;
    }
    try {
        build_stretch_axis(table_xmap(), 2.0, -1.0, 65);
    } catch (const std::invalid_argument&) {
        ++caught;
    }
    TwoFocusMap bad = table_xmap();
    bad.gamma = -10.0;
    try {
        build_stretch_axis(bad, -30.0, 30.0, 65);
    } catch (const std::invalid_argument&) {
        ++caught;
    }
    require(caught == 3, "all invalid constructions rejected");
    std::cout << "[PASS] construction errors reported\n";
}

// ============================================================================

int main() {
    std::cout << "\n========================================================\n";
    std::cout << "  MAPPED AXIS TEST SUITE\n";
    std::cout << "========================================================\n";

    int passed = 0, failed = 0;

    auto run_test = [&](const std::string& name, void (*func)()) {
        try {
            func();
            ++passed;
        } catch (const std::exception& e) {
            std::cout << "[FAIL] " << name << ": " << e.what() << "\n";
            ++failed;
        }
    };

    run_test("Arctangent Analytic Points", test_arctan_analytic_points);
    run_test("Arctangent Inverse", test_arctan_inverse);
    run_test("Two-Focus Limits", test_two_focus_limits);
    run_test("Bijectivity Check", test_bijectivity_check);
    run_test("Dense Monotonicity", test_dense_monotonicity);
    run_test("Two-Focus Inverse", test_two_focus_inverse);
    run_test("Line Axis Center", test_line_axis_center);
    run_test("Half-Line Axis", test_half_line_axis);
    run_test("Stretch Axis", test_stretch_axis);
    run_test("Quadrature", test_quadrature);
    run_test("Coarsen", test_coarsen);
    run_test("Construction Errors", test_construction_errors);

    std::cout << "\n========================================================\n";
    std::cout << "Summary: " << passed << "/" << (passed + failed) << " tests passed\n";
    std::cout << "========================================================\n";

    return (failed == 0) ? 0 : 1;
}
