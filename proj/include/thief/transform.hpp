#pragma once

#include <span>

#include "thief/common.hpp"

namespace thief {

// Moments of the fitting window for the asinh standardization.
// sigma uses the n-1 divisor; a window with (near) zero dispersion gets
// sigma floored at kSigmaFloor and `floored` set.
struct TransformParams {
    double mu = 0.0;
    double sigma = 1.0;
    bool floored = false;
};

inline constexpr double kSigmaFloor = 1e-8;

// Sample mean and standard deviation of the window. Throws on windows
// shorter than 2 or containing non-finite values.
TransformParams fit_params(std::span<const double> window);

// asinh((y - mu) / sigma); strictly increasing in y.
double apply_transform(double y, const TransformParams& p);

// sinh(z) * sigma + mu; inverse of apply_transform.
double invert_transform(double z, const TransformParams& p);

}  // namespace thief
