#pragma once

#include <cmath>
#include <cstdlib>

namespace emrsim {

/// Rounds to `decimals` places with decimal half-up semantics: 10.25 at one
/// decimal becomes 10.3. The tiny relative nudge compensates for binary
/// representation of decimal ties (1.0145 stores just below the tie point).
inline double round_half_up(double v, int decimals) {
    static const double pow10[] = {1.0,    10.0,    100.0,    1000.0,
                                   10000.0, 100000.0, 1000000.0};
    const double p = pow10[decimals < 0 ? 0 : (decimals > 6 ? 6 : decimals)];
    const double scaled = v * p;
    return std::floor(scaled + 0.5 + std::fabs(scaled) * 1e-12) / p;
}

}  // namespace emrsim
