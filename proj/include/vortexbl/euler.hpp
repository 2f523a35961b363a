#pragma once

/// Outer (Euler) flow of a rectilinear vortex above a wall, written in the
/// frame that moves with the vortex: the wall slides at speed -1 and the
/// vortex pair (unit-height vortex plus its mirror image) stands still.

namespace vbl {

/// Slip velocity on the wall: U_inf(x) = -1 + 4 / (x^2 + 1).
double freestream_velocity(double x);

/// dU_inf/dx.
double freestream_velocity_dx(double x);

/// Streamwise pressure-gradient forcing U_inf * dU_inf/dx of the
/// boundary-layer momentum equation.
double freestream_forcing(double x);

/// psi_E(x, y) = -log((x^2 + (y-1)^2) / (x^2 + (y+1)^2)) - y.
/// Throws std::domain_error at the vortex centers (0, +-1).
double euler_streamfunction(double x, double y);

/// Mollified initial vorticity, formula as printed:
/// (4 pi / sigma^2) exp(-(x^2 + (y-1)^2)/sigma^2).  Integrates to 4 pi^2
/// over the plane; divide by pi for unit-consistent circulation 4 pi
/// (see NSConfig::mollifier_normalized).
double vortex_blob(double x, double y, double sigma);

}  // namespace vbl
