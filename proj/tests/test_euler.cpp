/// Outer-flow validation
///
/// The inviscid background: wall slip velocity, vortex-pair streamfunction,
/// and the mollified initial vorticity.  Checks closed-form values, a
/// finite-difference oracle for the wall slip, harmonicity away from the
/// vortex centers, and the blob's peak and plane integral.

#include "test_support.hpp"
#include "vortexbl/euler.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

using namespace vbl;
using namespace vbltest;

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

// ============================================================================
// Test 1: wall slip velocity at analytic points
// ============================================================================
void test_freestream_values() {
    require_close(freestream_velocity(0.0), 3.0, 1e-15, "peak at x = 0");
    require_close(freestream_velocity(1.0), 1.0, 1e-15, "x = 1");
    require_close(freestream_velocity(2.0), -0.2, 1e-15, "x = 2");
    require_close(freestream_velocity(1e6), -1.0, 1e-11, "far field +");
    require_close(freestream_velocity(-1e6), -1.0, 1e-11, "far field -");
    require_close(freestream_velocity(0.5) - freestream_velocity(-0.5), 0.0, 1e-15,
                  "even in x");
    std::cout << "[PASS] wall slip velocity: 3 at the origin, -1 far away\n";
}

// ============================================================================
// Test 2: slip-velocity derivative and forcing
// ============================================================================
void test_freestream_derivative() {
    require_close(freestream_velocity_dx(0.0), 0.0, 1e-15, "stationary at the peak");
    require_close(freestream_velocity_dx(1.0), -2.0, 1e-14, "slope at x = 1");

    for (double x : {-2.0, -0.3, 0.7, 1.0, 3.0}) {
        double h = 1e-6;
        double fd = (freestream_velocity(x + h) - freestream_velocity(x - h)) / (2.0 * h);
        require_close(freestream_velocity_dx(x), fd, 1e-8, "derivative vs finite difference");
        require_close(freestream_forcing(x),
                      freestream_velocity(x) * freestream_velocity_dx(x), 1e-14,
                      "forcing is U * dU/dx");
    }
    std::cout << "[PASS] slip-velocity derivative matches finite differences\n";
}

// ============================================================================
// Test 3: streamfunction vanishes on the wall, slip velocity from its slope
// ============================================================================
void test_streamfunction_wall() {
    for (double x : {-3.0, -1.0, 0.0, 0.5, 2.0, 10.0})
        require_close(euler_streamfunction(x, 0.0), 0.0, 1e-14, "wall value");

    // d(psi)/dy at the wall equals the slip velocity: 3, 1, -0.2 at x = 0, 1, 2.
    const double h = 1e-5;
    for (double x : {0.0, 1.0, 2.0}) {
        double dpsidy =
            (euler_streamfunction(x, h) - euler_streamfunction(x, -h)) / (2.0 * h);
        require_close(dpsidy, freestream_velocity(x), 1e-7, "wall slope vs slip velocity");
    }
    std::cout << "[PASS] streamfunction: zero on the wall, slope gives (3, 1, -0.2)\n";
}

// ============================================================================
// Test 4: harmonic away from the vortex centers
// ============================================================================
void test_streamfunction_harmonic() {
    const double h = 1e-3;
    for (auto [x, y] : {std::pair{2.0, 2.0}, {0.5, 0.3}, {-1.0, 4.0}}) {
        double lap = (euler_streamfunction(x + h, y) + euler_streamfunction(x - h, y) +
                      euler_streamfunction(x, y + h) + euler_streamfunction(x, y - h) -
                      4.0 * euler_streamfunction(x, y)) /
                     (h * h);
        require_close(lap, 0.0, 1e-4, "discrete Laplacian near zero");
    }

    int caught = 0;
    for (double yc : {1.0, -1.0}) {
        try {
            euler_streamfunction(0.0, yc);
        } catch (const std::domain_error&) {
            ++caught;
        }
    }
    require(caught == 2, "vortex centers rejected");
    std::cout << "[PASS] streamfunction harmonic away from the centers\n";
}

// ============================================================================
// Test 5: vortex blob peak and decay
// ============================================================================
void test_blob_peak() {
    // Peak value by substitution: 4 pi / sigma^2 at the center, sigma = 0.05.
    require_rel(vortex_blob(0.0, 1.0, 0.05), 1600.0 * kPi, 1e-14, "peak value");
    require(vortex_blob(0.0, 0.0, 0.05) < 1e-100, "negligible at the wall");
    require_close(vortex_blob(0.3, 1.2, 0.05) - vortex_blob(-0.3, 1.2, 0.05), 0.0, 1e-18,
                  "even in x about the center");
    std::cout << "[PASS] blob peak 1600 pi = " << 1600.0 * kPi << "\n";
}

// ============================================================================
// Test 6: blob integrates to 4 pi^2 over the plane
// ============================================================================
void test_blob_integral() {
    // Trapezoid on [-0.5, 0.5] x [0.5, 1.5]; the blob is below 1e-27 outside.
    const int n = 401;
    const double h = 1.0 / (n - 1);
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
        double wy = (j == 0 || j == n - 1) ? 0.5 : 1.0;
        for (int i = 0; i < n; ++i) {
            double wx = (i == 0 || i == n - 1) ? 0.5 : 1.0;
            sum += wx * wy * vortex_blob(-0.5 + i * h, 0.5 + j * h, 0.05);
        }
    }
    sum *= h * h;
    require_rel(sum, 4.0 * kPi * kPi, 1e-3, "plane integral");
    std::cout << "[PASS] blob integral " << sum << " vs 4 pi^2 = " << 4.0 * kPi * kPi
              << "\n";
}

// ============================================================================

int main() {
    std::cout << "\n========================================================\n";
    std::cout << "  OUTER FLOW TEST SUITE\n";
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

    run_test("Freestream Values", test_freestream_values);
    run_test("Freestream Derivative", test_freestream_derivative);
    run_test("Streamfunction Wall", test_streamfunction_wall);
    run_test("Streamfunction Harmonic", test_streamfunction_harmonic);
    run_test("Blob Peak", test_blob_peak);
    run_test("Blob Integral", test_blob_integral);

    std::cout << "\n========================================================\n";
    std::cout << "Summary: " << passed << "/" << (passed + failed) << " tests passed\n";
    std::cout << "========================================================\n";

    return (failed == 0) ? 0 : 1;
}
