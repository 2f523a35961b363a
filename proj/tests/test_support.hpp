#pragma once

/// Assertion helpers shared by the validation binaries.

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace vbltest {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw std::runtime_error(what);
}

/// |got - want| <= tol, or a message naming all three.
inline void require_close(double got, double want, double tol, const std::string& what) {
    if (!(std::abs(got - want) <= tol)) {
        std::ostringstream os;
        os.precision(12);
        os << what << ": got " << got << ", want " << want << " +- " << tol;
        throw std::runtime_error(os.str());
    }
}

/// Relative comparison with a floor for near-zero targets.
inline void require_rel(double got, double want, double rel, const std::string& what) {
    const double scale = std::max(std::abs(want), 1e-300);
    if (!(std::abs(got - want) <= rel * scale)) {
        std::ostringstream os;
        os.precision(12);
        os << what << ": got " << got << ", want " << want << " (rel tol " << rel << ")";
        throw std::runtime_error(os.str());
    }
}

inline void require_in(double got, double lo, double hi, const std::string& what) {
    if (!(got >= lo && got <= hi)) {
        std::ostringstream os;
        os.precision(12);
        os << what << ": got " << got << ", want within [" << lo << ", " << hi << "]";
        throw std::runtime_error(os.str());
    }
}

}  // namespace vbltest
