#pragma once

#include <array>
#include <span>
#include <vector>

#include "thief/dataio.hpp"
#include "thief/hierarchy.hpp"
#include "thief/transform.hpp"

namespace thief {

inline constexpr int kNumFeatures = 20;
inline constexpr int kLagDays = 7;

// Feature vector layout (all non-dummy entries in transformed space):
//   [0..6]   lagged block prices for the previous 1..7 days
//   [7]      previous day's minimum hourly price
//   [8]      previous day's maximum hourly price
//   [9]      load forecast, mean over the target block's hours
//   [10]     wind forecast, mean over the target block's hours
//   [11]     API2 coal close from two days back
//   [12]     TTF gas close from two days back
//   [13..19] weekday dummies, Monday first
inline constexpr int kIdxLagStart = 0;
inline constexpr int kIdxMinPrev = 7;
inline constexpr int kIdxMaxPrev = 8;
inline constexpr int kIdxLoad = 9;
inline constexpr int kIdxWind = 10;
inline constexpr int kIdxApi2 = 11;
inline constexpr int kIdxTtf = 12;
inline constexpr int kIdxDummyStart = 13;

using FeatureVector = std::array<double, kNumFeatures>;

enum class PanelSeries { Price, Load, Wind };

// Per-day mean of the block's hours for the chosen series.
std::vector<double> block_series(const PanelData& panel, BlockId block,
                                 PanelSeries kind = PanelSeries::Price);

// Transform moments for every variable entering one block's features.
// `price` is shared by the seven lags and doubles as the target's params.
struct FeatureParams {
    TransformParams price;
    TransformParams pmin;
    TransformParams pmax;
    TransformParams load;
    TransformParams wind;
    TransformParams api2;
    TransformParams ttf;
};

// Precomputed per-block daily means plus daily price extremes. Avoids
// re-deriving block means for every (day, block) pair in the rolling
// loop; results are identical to the panel-only overloads below.
class BlockSeriesCache {
public:
    explicit BlockSeriesCache(const PanelData& panel);

    std::span<const double> series(BlockId block, PanelSeries kind) const;
    double at(std::size_t day, BlockId block, PanelSeries kind) const;
    double daily_min(std::size_t day) const { return pmin_[day]; }
    double daily_max(std::size_t day) const { return pmax_[day]; }
    const PanelData& panel() const { return *panel_; }

private:
    const PanelData* panel_;
    std::size_t days_;
    std::vector<double> price_, load_, wind_;  // kNumBlocks x days, row-major
    std::vector<double> pmin_, pmax_;
};

// Fits all seven parameter sets on the window [origin - window_len,
// origin - 1]. The window must lie inside the panel.
FeatureParams fit_feature_params(const PanelData& panel, std::size_t origin,
                                 std::size_t window_len, BlockId block);
FeatureParams fit_feature_params(const BlockSeriesCache& cache, std::size_t origin,
                                 std::size_t window_len, BlockId block);

// Builds the 20-entry regressor vector for (day, block). Needs seven
// days of price history; throws naming the earliest valid day otherwise.
// Reads prices up to day-1, fuels up to day-2, and the day's own
// load/wind forecasts (published before delivery).
FeatureVector build_features(const PanelData& panel, std::size_t day, BlockId block,
                             const FeatureParams& params);
FeatureVector build_features(const BlockSeriesCache& cache, std::size_t day, BlockId block,
                             const FeatureParams& params);

}  // namespace thief
