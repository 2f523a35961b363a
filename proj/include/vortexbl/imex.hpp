#pragma once

/// Additive (IMEX) Runge-Kutta midpoint scheme of type (2,3,3): two implicit
/// stages, three explicit stages, third order.  The explicit tableau treats
/// convection and forcing; the implicit one treats diffusion and is applied
/// with the same coefficient gamma in both stage solves, so one tridiagonal
/// factorization per step serves the whole grid.

#include <array>
#include <cmath>

namespace vbl {

struct ImexTableau {
    /// gamma = (3 + sqrt(3)) / 6.
    double gamma = (3.0 + std::sqrt(3.0)) / 6.0;

    /// Explicit stage abscissae and coefficients.
    std::array<double, 3> c_e() const { return {0.0, gamma, 1.0 - gamma}; }
    std::array<std::array<double, 3>, 3> a_e() const {
        return {{{0.0, 0.0, 0.0},
                 {gamma, 0.0, 0.0},
                 {gamma - 1.0, 2.0 * (1.0 - gamma), 0.0}}};
    }
    std::array<double, 3> b_e() const { return {0.0, 0.5, 0.5}; }

    /// Implicit coefficients, padded to three stages (stage 1 is explicit-only).
    std::array<double, 3> c_i() const { return {0.0, gamma, 1.0 - gamma}; }
    std::array<std::array<double, 3>, 3> a_i() const {
        return {{{0.0, 0.0, 0.0},
                 {0.0, gamma, 0.0},
                 {0.0, 1.0 - 2.0 * gamma, gamma}}};
    }
    std::array<double, 3> b_i() const { return {0.0, 0.5, 0.5}; }
};

}  // namespace vbl
