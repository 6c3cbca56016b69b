#pragma once

#include <cmath>

#include "hpinn/net.hpp"

namespace hpinn::detail {

/// sigma and its first three derivatives at one pre-activation.
struct ActivationDerivs {
    double s0, s1, s2, s3;
};

inline ActivationDerivs activation_derivs(Activation act, double a) {
    switch (act) {
        case Activation::sin: {
            const double s = std::sin(a), c = std::cos(a);
            return {s, c, -s, -c};
        }
        case Activation::tanh: {
            const double t = std::tanh(a);
            const double d1 = 1.0 - t * t;
            return {t, d1, -2.0 * t * d1, d1 * (6.0 * t * t - 2.0)};
        }
        case Activation::sigmoid: {
            const double s = 1.0 / (1.0 + std::exp(-a));
            const double d1 = s * (1.0 - s);
            const double d2 = d1 * (1.0 - 2.0 * s);
            return {s, d1, d2, d2 * (1.0 - 2.0 * s) - 2.0 * d1 * d1};
        }
    }
    return {0.0, 0.0, 0.0, 0.0};
}

}  // namespace hpinn::detail
