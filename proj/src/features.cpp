#include "thief/features.hpp"

#include <algorithm>
#include <cmath>

namespace thief {

namespace {

const std::array<double, kHoursPerDay>& day_row(const PanelData& panel, std::size_t day,
                                                PanelSeries kind) {
    switch (kind) {
        case PanelSeries::Load: return panel.load_fc[day];
        case PanelSeries::Wind: return panel.wind_fc[day];
        default: return panel.prices[day];
    }
}

double mean_of_block(const PanelData& panel, std::size_t day, BlockId block, PanelSeries kind) {
    return block_mean(day_row(panel, day, kind), block);
}

void check_window(std::size_t origin, std::size_t window_len, std::size_t days) {
    if (window_len < 2) throw ValidationError("fit_feature_params: window shorter than 2 days");
    if (origin > days) throw ValidationError("fit_feature_params: origin outside the panel");
    if (origin < window_len)
        throw ValidationError(cat("fit_feature_params: window of ", window_len,
                                  " days does not fit before day index ", origin));
}

void check_history(const PanelData& panel, std::size_t day) {
    if (day >= panel.days())
        throw ValidationError(cat("build_features: day index ", day, " outside the panel"));
    if (day < kLagDays)
        throw ValidationError(cat("build_features: ", panel.dates[day].to_string(),
                                  " lacks 7 days of history; earliest valid day is ",
                                  panel.dates[kLagDays].to_string()));
}

void fill_common(FeatureVector& x, const PanelData& panel, std::size_t day,
                 const FeatureParams& p) {
    x[kIdxApi2] = apply_transform(panel.api2_close[day - 2], p.api2);
    x[kIdxTtf] = apply_transform(panel.ttf_close[day - 2], p.ttf);
    for (int i = 0; i < 7; ++i) x[kIdxDummyStart + i] = 0.0;
    x[kIdxDummyStart + (panel.weekday[day] - 1)] = 1.0;
}

}  // namespace

std::vector<double> block_series(const PanelData& panel, BlockId block, PanelSeries kind) {
    if (!is_valid_block(block))
        throw ValidationError(cat("block_series: invalid block (", block.length, "H, index ",
                                  block.index, ")"));
    std::vector<double> out(panel.days());
    for (std::size_t d = 0; d < panel.days(); ++d) out[d] = mean_of_block(panel, d, block, kind);
    return out;
}

BlockSeriesCache::BlockSeriesCache(const PanelData& panel)
    : panel_(&panel), days_(panel.days()) {
    price_.resize(kNumBlocks * days_);
    load_.resize(kNumBlocks * days_);
    wind_.resize(kNumBlocks * days_);
    pmin_.resize(days_);
    pmax_.resize(days_);
    for (std::size_t d = 0; d < days_; ++d) {
        const auto& day = panel.prices[d];
        pmin_[d] = *std::min_element(day.begin(), day.end());
        pmax_[d] = *std::max_element(day.begin(), day.end());
    }
    for (int ord = 0; ord < kNumBlocks; ++ord) {
        const BlockId b = block_at(ord);
        for (std::size_t d = 0; d < days_; ++d) {
            price_[ord * days_ + d] = mean_of_block(panel, d, b, PanelSeries::Price);
            load_[ord * days_ + d] = mean_of_block(panel, d, b, PanelSeries::Load);
            wind_[ord * days_ + d] = mean_of_block(panel, d, b, PanelSeries::Wind);
        }
    }
}

std::span<const double> BlockSeriesCache::series(BlockId block, PanelSeries kind) const {
    const int ord = block_ordinal(block);
    const std::vector<double>& store =
        kind == PanelSeries::Load ? load_ : kind == PanelSeries::Wind ? wind_ : price_;
    return {store.data() + static_cast<std::size_t>(ord) * days_, days_};
}

double BlockSeriesCache::at(std::size_t day, BlockId block, PanelSeries kind) const {
    return series(block, kind)[day];
}

FeatureParams fit_feature_params(const PanelData& panel, std::size_t origin,
                                 std::size_t window_len, BlockId block) {
    check_window(origin, window_len, panel.days());
    const std::size_t w0 = origin - window_len;

    std::vector<double> buf(window_len);
    FeatureParams p;
    const auto fit_block_kind = [&](PanelSeries kind) {
        for (std::size_t t = 0; t < window_len; ++t)
            buf[t] = mean_of_block(panel, w0 + t, block, kind);
        return fit_params(buf);
    };
    p.price = fit_block_kind(PanelSeries::Price);
    p.load = fit_block_kind(PanelSeries::Load);
    p.wind = fit_block_kind(PanelSeries::Wind);

    for (std::size_t t = 0; t < window_len; ++t) {
        const auto& day = panel.prices[w0 + t];
        buf[t] = *std::min_element(day.begin(), day.end());
    }
    p.pmin = fit_params(buf);
    for (std::size_t t = 0; t < window_len; ++t) {
        const auto& day = panel.prices[w0 + t];
        buf[t] = *std::max_element(day.begin(), day.end());
    }
    p.pmax = fit_params(buf);

    p.api2 = fit_params(std::span(panel.api2_close).subspan(w0, window_len));
    p.ttf = fit_params(std::span(panel.ttf_close).subspan(w0, window_len));
    return p;
}

FeatureParams fit_feature_params(const BlockSeriesCache& cache, std::size_t origin,
                                 std::size_t window_len, BlockId block) {
    const PanelData& panel = cache.panel();
    check_window(origin, window_len, panel.days());
    const std::size_t w0 = origin - window_len;

    FeatureParams p;
    p.price = fit_params(cache.series(block, PanelSeries::Price).subspan(w0, window_len));
    p.load = fit_params(cache.series(block, PanelSeries::Load).subspan(w0, window_len));
    p.wind = fit_params(cache.series(block, PanelSeries::Wind).subspan(w0, window_len));

    std::vector<double> buf(window_len);
    for (std::size_t t = 0; t < window_len; ++t) buf[t] = cache.daily_min(w0 + t);
    p.pmin = fit_params(buf);
    for (std::size_t t = 0; t < window_len; ++t) buf[t] = cache.daily_max(w0 + t);
    p.pmax = fit_params(buf);

    p.api2 = fit_params(std::span(panel.api2_close).subspan(w0, window_len));
    p.ttf = fit_params(std::span(panel.ttf_close).subspan(w0, window_len));
    return p;
}

FeatureVector build_features(const PanelData& panel, std::size_t day, BlockId block,
                             const FeatureParams& params) {
    check_history(panel, day);

    FeatureVector x{};
    for (int i = 1; i <= kLagDays; ++i)
        x[kIdxLagStart + i - 1] =
            apply_transform(mean_of_block(panel, day - i, block, PanelSeries::Price), params.price);

    const auto& prev = panel.prices[day - 1];
    x[kIdxMinPrev] = apply_transform(*std::min_element(prev.begin(), prev.end()), params.pmin);
    x[kIdxMaxPrev] = apply_transform(*std::max_element(prev.begin(), prev.end()), params.pmax);
    x[kIdxLoad] = apply_transform(mean_of_block(panel, day, block, PanelSeries::Load), params.load);
    x[kIdxWind] = apply_transform(mean_of_block(panel, day, block, PanelSeries::Wind), params.wind);
    fill_common(x, panel, day, params);
    return x;
}

FeatureVector build_features(const BlockSeriesCache& cache, std::size_t day, BlockId block,
                             const FeatureParams& params) {
    const PanelData& panel = cache.panel();
    check_history(panel, day);

    FeatureVector x{};
    for (int i = 1; i <= kLagDays; ++i)
        x[kIdxLagStart + i - 1] =
            apply_transform(cache.at(day - i, block, PanelSeries::Price), params.price);
    x[kIdxMinPrev] = apply_transform(cache.daily_min(day - 1), params.pmin);
    x[kIdxMaxPrev] = apply_transform(cache.daily_max(day - 1), params.pmax);
    x[kIdxLoad] = apply_transform(cache.at(day, block, PanelSeries::Load), params.load);
    x[kIdxWind] = apply_transform(cache.at(day, block, PanelSeries::Wind), params.wind);
    fill_common(x, panel, day, params);
    return x;
}

}  // namespace thief
