#include "vortexbl/euler.hpp"

#include <cmath>
#include <stdexcept>

namespace vbl {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double freestream_velocity(double x) {
    return -1.0 + 4.0 / (x * x + 1.0);
}

double freestream_velocity_dx(double x) {
    const double s = x * x + 1.0;
    return -8.0 * x / (s * s);
}

double freestream_forcing(double x) {
    return freestream_velocity(x) * freestream_velocity_dx(x);
}

double euler_streamfunction(double x, double y) {
    const double r1sq = x * x + (y - 1.0) * (y - 1.0);
    const double r2sq = x * x + (y + 1.0) * (y + 1.0);
    if (r1sq == 0.0 || r2sq == 0.0)
        throw std::domain_error("euler_streamfunction: evaluated at a vortex center");
    return -std::log(r1sq / r2sq) - y;
}

double vortex_blob(double x, double y, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("vortex_blob: sigma must be positive");
    const double r1sq = x * x + (y - 1.0) * (y - 1.0);
    return (4.0 * kPi / (sigma * sigma)) * std::exp(-r1sq / (sigma * sigma));
}

}  // namespace vbl
