#include "thief/transform.hpp"

#include <cmath>

#include "thief/kernels.hpp"

namespace thief {

TransformParams fit_params(std::span<const double> window) {
    const std::size_t n = window.size();
    if (n < 2) throw ValidationError(cat("fit_params: window length ", n, " < 2"));
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(window[i]))
            throw ValidationError(cat("fit_params: non-finite value at position ", i));

    TransformParams p;
    p.mu = kernels::sum(window.data(), n) / static_cast<double>(n);
    // Two-pass variance with the n-1 divisor.
    double ss = 0.0;
    for (const double v : window) {
        const double d = v - p.mu;
        ss += d * d;
    }
    p.sigma = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(p.sigma > kSigmaFloor)) {
        p.sigma = kSigmaFloor;
        p.floored = true;
    }
    return p;
}

double apply_transform(double y, const TransformParams& p) {
    if (!std::isfinite(y)) throw ValidationError("apply_transform: non-finite input");
    return std::asinh((y - p.mu) / p.sigma);
}

double invert_transform(double z, const TransformParams& p) {
    if (!std::isfinite(z)) throw ValidationError("invert_transform: non-finite input");
    return std::sinh(z) * p.sigma + p.mu;
}

}  // namespace thief
