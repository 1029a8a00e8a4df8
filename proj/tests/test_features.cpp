#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "thief/features.hpp"
#include "thief/rng.hpp"
#include "thief/synth.hpp"

using namespace thief;

namespace {

PanelData fixture_panel(std::uint64_t seed = 11, int days = 60) {
    return synth_panel(SynthConfig{.seed = seed, .days = days, .start = Date::from_ymd(2020, 6, 1)});
}

}  // namespace

TEST_SUITE_BEGIN("features");

TEST_CASE("block series equals hierarchy aggregation on every day") {
    const PanelData panel = fixture_panel();
    const SummingMatrix s = build_summing_matrix();
    for (int ord = 0; ord < kNumBlocks; ++ord) {
        const BlockId b = block_at(ord);
        const auto series = block_series(panel, b);
        for (std::size_t d = 0; d < panel.days(); ++d) {
            const HierarchyVector agg = aggregate(panel.prices[d], s);
            CHECK(series[d] == doctest::Approx(agg[ord]).epsilon(1e-12));
        }
    }
}

TEST_CASE("block series handles trivial cases") {
    PanelData panel = fixture_panel(1, 31);
    panel.prices[0].fill(77.0);
    CHECK(block_series(panel, BlockId{24, 0})[0] == doctest::Approx(77.0));

    panel.prices[3][0] = 10.0;
    panel.prices[3][1] = 20.0;
    CHECK(block_series(panel, BlockId{2, 0})[3] == doctest::Approx(15.0));
}

TEST_CASE("cached and panel-only paths agree everywhere") {
    const PanelData panel = fixture_panel(9, 50);
    const BlockSeriesCache cache(panel);
    Rng rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t day = 10 + rng.uniform_index(panel.days() - 10);
        const BlockId block = block_at(static_cast<int>(rng.uniform_index(kNumBlocks)));
        const auto p1 = fit_feature_params(panel, day, 10, block);
        const auto p2 = fit_feature_params(cache, day, 10, block);
        CHECK(p1.price.mu == p2.price.mu);
        CHECK(p1.price.sigma == p2.price.sigma);
        CHECK(p1.pmin.mu == p2.pmin.mu);
        CHECK(p1.api2.sigma == p2.api2.sigma);
        const FeatureVector f1 = build_features(panel, day, block, p1);
        const FeatureVector f2 = build_features(cache, day, block, p2);
        for (int j = 0; j < kNumFeatures; ++j) CHECK(f1[j] == f2[j]);
    }
}

TEST_CASE("feature vector matches an independent hand-rolled oracle") {
    const PanelData panel = fixture_panel(23, 45);
    const std::size_t day = 30;
    const BlockId block{3, 5};  // hours 15..17
    const std::size_t window = 20;
    const FeatureParams params = fit_feature_params(panel, day, window, block);
    const FeatureVector x = build_features(panel, day, block, params);

    // Oracle: recompute every entry with separate code straight from the
    // raw arrays.
    const auto mean_hours = [&](const std::array<double, 24>& row) {
        double acc = 0.0;
        for (int h = 15; h <= 17; ++h) acc += row[h];
        return acc / 3.0;
    };
    const auto asinh_std = [](double v, const TransformParams& p) {
        return std::log((v - p.mu) / p.sigma + std::sqrt(((v - p.mu) / p.sigma) * ((v - p.mu) / p.sigma) + 1.0));
    };
    for (int lag = 1; lag <= 7; ++lag) {
        const double raw = mean_hours(panel.prices[day - lag]);
        CHECK(x[lag - 1] == doctest::Approx(asinh_std(raw, params.price)).epsilon(1e-12));
    }
    const auto& prev = panel.prices[day - 1];
    CHECK(x[kIdxMinPrev] ==
          doctest::Approx(asinh_std(*std::min_element(prev.begin(), prev.end()), params.pmin))
              .epsilon(1e-12));
    CHECK(x[kIdxMaxPrev] ==
          doctest::Approx(asinh_std(*std::max_element(prev.begin(), prev.end()), params.pmax))
              .epsilon(1e-12));
    CHECK(x[kIdxLoad] ==
          doctest::Approx(asinh_std(mean_hours(panel.load_fc[day]), params.load)).epsilon(1e-12));
    CHECK(x[kIdxWind] ==
          doctest::Approx(asinh_std(mean_hours(panel.wind_fc[day]), params.wind)).epsilon(1e-12));
    CHECK(x[kIdxApi2] ==
          doctest::Approx(asinh_std(panel.api2_close[day - 2], params.api2)).epsilon(1e-12));
    CHECK(x[kIdxTtf] ==
          doctest::Approx(asinh_std(panel.ttf_close[day - 2], params.ttf)).epsilon(1e-12));

    // Oracle for the transform moments themselves (price group).
    double mu = 0.0;
    for (std::size_t t = day - window; t < day; ++t) mu += mean_hours(panel.prices[t]);
    mu /= window;
    double ss = 0.0;
    for (std::size_t t = day - window; t < day; ++t) {
        const double d = mean_hours(panel.prices[t]) - mu;
        ss += d * d;
    }
    CHECK(params.price.mu == doctest::Approx(mu).epsilon(1e-12));
    CHECK(params.price.sigma == doctest::Approx(std::sqrt(ss / (window - 1))).epsilon(1e-12));
}

TEST_CASE("exactly one weekday dummy is set, Monday first") {
    const PanelData panel = fixture_panel(2, 40);
    const FeatureParams params = fit_feature_params(panel, 20, 12, BlockId{1, 0});
    for (std::size_t day = 8; day < 20; ++day) {
        const FeatureVector x = build_features(panel, day, BlockId{1, 0}, params);
        int ones = 0;
        for (int i = 0; i < 7; ++i) {
            CHECK((x[kIdxDummyStart + i] == 0.0 || x[kIdxDummyStart + i] == 1.0));
            if (x[kIdxDummyStart + i] == 1.0) {
                ones++;
                CHECK(i == panel.weekday[day] - 1);
            }
        }
        CHECK(ones == 1);
        // Monday convention explicitly.
        if (panel.dates[day].iso_weekday() == 1) CHECK(x[kIdxDummyStart] == 1.0);
        // All non-dummy entries finite.
        for (int j = 0; j < kIdxDummyStart; ++j) CHECK(std::isfinite(x[j]));
    }
}

TEST_CASE("a zero-price panel maps lag and extreme features to zero") {
    PanelData panel = fixture_panel(4, 40);
    for (auto& day : panel.prices) day.fill(0.0);
    const FeatureParams params = fit_feature_params(panel, 30, 20, BlockId{24, 0});
    CHECK(params.price.floored);  // constant window
    const FeatureVector x = build_features(panel, 30, BlockId{24, 0}, params);
    for (int lag = 0; lag < 7; ++lag) CHECK(x[lag] == 0.0);
    CHECK(x[kIdxMinPrev] == 0.0);
    CHECK(x[kIdxMaxPrev] == 0.0);
}

TEST_CASE("insufficient history is rejected naming the earliest valid day") {
    const PanelData panel = fixture_panel(6, 40);
    const FeatureParams params = fit_feature_params(panel, 20, 10, BlockId{1, 3});
    try {
        build_features(panel, 4, BlockId{1, 3}, params);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find(panel.dates[7].to_string()) != std::string::npos);
    }
}

TEST_CASE("features for day d ignore perturbations of later days") {
    PanelData panel = fixture_panel(8, 50);
    const std::size_t day = 25;
    const BlockId block{2, 4};
    const FeatureParams params = fit_feature_params(panel, day, 15, block);
    const FeatureVector before = build_features(panel, day, block, params);

    for (std::size_t t = day + 1; t < panel.days(); ++t) {
        for (int h = 0; h < 24; ++h) {
            panel.prices[t][h] += 1e6;
            panel.load_fc[t][h] += 1e6;
            panel.wind_fc[t][h] += 1e6;
        }
        panel.api2_close[t] += 1e6;
        panel.ttf_close[t] += 1e6;
    }
    const FeatureParams params_after = fit_feature_params(panel, day, 15, block);
    const FeatureVector after = build_features(panel, day, block, params_after);
    for (int j = 0; j < kNumFeatures; ++j) CHECK(before[j] == after[j]);
}

TEST_SUITE_END();
