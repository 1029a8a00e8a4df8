#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>

#include "thief/features.hpp"
#include "thief/linalg.hpp"
#include "thief/transform.hpp"

namespace thief {

// ---------------------------------------------------------------------------
// ARX: linear expert model on the 20 transformed features, fit by OLS.
// ---------------------------------------------------------------------------

struct ArxModel {
    std::array<double, kNumFeatures> beta{};
    double residual_std = 0.0;  // sqrt(SSE / (n - p))
    double condition = 0.0;     // R-diagonal ratio from the QR factorization
};

// Least squares via Householder QR (never the normal equations).
// Requires at least 21 rows; rank deficiency beyond the dummy/constant
// structure raises RankDeficiencyError naming the offending columns.
ArxModel fit_arx(const Matrix& x, std::span<const double> y);

// Linear predictor in transformed space, mapped back to EUR/MWh.
double predict_arx(const ArxModel& model, const FeatureVector& x,
                   const TransformParams& target);

// ---------------------------------------------------------------------------
// NARX: ensemble of 10 single-hidden-layer tanh networks (5 neurons,
// linear output) trained by Levenberg-Marquardt with early stopping on a
// random 10% validation split. Member outputs are clipped to [-3, 3],
// inverse-transformed, and averaged in price space.
// ---------------------------------------------------------------------------

inline constexpr int kNarxHidden = 5;
inline constexpr int kNarxMembers = 10;
inline constexpr double kNarxClip = 3.0;
inline constexpr int kNarxWeightCount =
    kNarxHidden * kNumFeatures + kNarxHidden + kNarxHidden + 1;  // 111

// LM schedule: damping starts at 1e-3 and moves by a factor of 10 on
// accepted/rejected steps; training stops after 1000 iterations, when
// damping exceeds 1e10, or when validation MSE has not improved for 6
// consecutive iterations. Best-validation weights are kept.
inline constexpr double kNarxMuInit = 1e-3;
inline constexpr double kNarxMuFactor = 10.0;
inline constexpr double kNarxMuMax = 1e10;
inline constexpr int kNarxMaxIterations = 1000;
inline constexpr int kNarxPatience = 6;
inline constexpr double kNarxValidationShare = 0.10;

struct NarxMember {
    std::array<double, kNarxHidden * kNumFeatures> w_in{};  // hidden x input, row-major
    std::array<double, kNarxHidden> b_hidden{};
    std::array<double, kNarxHidden> w_out{};
    double b_out = 0.0;

    // Linear network output in transformed space (no clipping).
    double raw_output(std::span<const double, kNumFeatures> x) const;
};

struct NarxModel {
    std::array<NarxMember, kNarxMembers> members;
};

// Trains the 10 members from seeds derived from `seed`; deterministic
// given (x, y, seed). Requires at least 100 rows. A member whose loss
// turns non-finite is restarted once from a fresh initialization.
NarxModel fit_narx(const Matrix& x, std::span<const double> y, std::uint64_t seed);

// Per member: clip raw output to [-3, 3], inverse-transform, then
// average the 10 prices.
double predict_narx(const NarxModel& model, const FeatureVector& x,
                    const TransformParams& target);

// Flat CSV weight dumps for backtest checkpointing. ARX: one `beta,<20
// values>` row. NARX: per member, rows `member,w_in,<100>`, `member,
// b_hidden,<5>`, `member,w_out,<5>`, `member,b_out,<1>`.
void save_arx(const ArxModel& model, const std::filesystem::path& path);
ArxModel load_arx(const std::filesystem::path& path);
void save_narx(const NarxModel& model, const std::filesystem::path& path);
NarxModel load_narx(const std::filesystem::path& path);

}  // namespace thief
