#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace hilfer {

/// Empirical constant of an inequality lhs <= C rhs, fitted as the sup of lhs/rhs.
/// `constant` is the sup over the declared sweep, `extended` the sup over a sweep pushed
/// further toward the critical end. A genuinely bounded ratio saturates, so the extended
/// sup stays within a small factor of the declared one.
struct BoundFit {
    double constant = 0.0;
    double extended = 0.0;
    std::size_t samples = 0;

    bool bounded(double growth = 1.5) const {
        return std::isfinite(constant) && std::isfinite(extended) && extended <= growth * constant;
    }
};

/// n points spaced geometrically from a to b inclusive (a, b > 0).
std::vector<double> log_sweep(double a, double b, std::size_t n);

} // namespace hilfer
