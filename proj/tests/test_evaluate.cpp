#include <cmath>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "thief/evaluate.hpp"
#include "thief/rng.hpp"

using namespace thief;

namespace {

std::vector<HierarchyVector> random_days(Rng& rng, std::size_t n) {
    std::vector<HierarchyVector> out(n);
    for (auto& day : out)
        for (auto& v : day) v = rng.uniform(-100.0, 300.0);
    return out;
}

std::vector<std::vector<double>> iid_errors(Rng& rng, std::size_t days, std::size_t width,
                                            double scale) {
    std::vector<std::vector<double>> e(days, std::vector<double>(width));
    for (auto& day : e)
        for (auto& v : day) v = scale * rng.normal();
    return e;
}

}  // namespace

TEST_SUITE_BEGIN("evaluate");

TEST_CASE("perfect forecasts give zero MAE and RMSE") {
    Rng rng(701);
    const auto actuals = random_days(rng, 10);
    const LevelMetrics m = level_metrics(actuals, actuals, 1);
    CHECK(m.mae == 0.0);
    CHECK(m.rmse == 0.0);
    CHECK(m.n_days == 10);
}

TEST_CASE("a constant +2 error gives MAE = RMSE = 2 at every level") {
    Rng rng(702);
    const auto actuals = random_days(rng, 8);
    auto forecasts = actuals;
    for (auto& day : forecasts)
        for (auto& v : day) v += 2.0;
    for (const int len : kBlockLengths) {
        const LevelMetrics m = level_metrics(forecasts, actuals, len);
        CHECK(m.mae == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(m.rmse == doctest::Approx(2.0).epsilon(1e-12));
    }
}

TEST_CASE("metrics match an independent per-cell loop oracle") {
    Rng rng(703);
    const auto actuals = random_days(rng, 25);
    const auto forecasts = random_days(rng, 25);
    for (const int len : {1, 4, 8, 24}) {
        const LevelMetrics m = level_metrics(forecasts, actuals, len);
        const int offset = level_offset(len);
        const int width = level_block_count(len);
        double abs_acc = 0.0, sq_acc = 0.0;
        int cells = 0;
        for (std::size_t d = 0; d < actuals.size(); ++d)
            for (int b = 0; b < width; ++b) {
                const double e = forecasts[d][offset + b] - actuals[d][offset + b];
                abs_acc += std::fabs(e);
                sq_acc += e * e;
                ++cells;
            }
        CHECK(m.mae == doctest::Approx(abs_acc / cells).epsilon(1e-12));
        CHECK(m.rmse == doctest::Approx(std::sqrt(sq_acc / cells)).epsilon(1e-12));
        CHECK(m.mae <= m.rmse + 1e-12);  // Jensen
    }
}

TEST_CASE("misaligned day lists are rejected") {
    Rng rng(704);
    const auto actuals = random_days(rng, 5);
    const auto forecasts = random_days(rng, 6);
    CHECK_THROWS_AS(level_metrics(forecasts, actuals, 1), ValidationError);
}

TEST_CASE("pct_gain reproduces the reported ARX hourly gain") {
    // Base MAE 26.93 with a 2.8% reported gain implies 26.176 reconciled.
    CHECK(pct_gain(26.93, 26.176) == doctest::Approx(2.8).epsilon(1e-3));
    CHECK(pct_gain(20.0, 10.0) == doctest::Approx(50.0));
    CHECK(pct_gain(5.0, 5.0) == 0.0);
    CHECK_THROWS_AS(pct_gain(0.0, 1.0), ValidationError);
}

TEST_CASE("pct_gain antisymmetry identity") {
    // gain(a, b) = -gain(b, a) * b / a
    Rng rng(705);
    for (int rep = 0; rep < 100; ++rep) {
        const double a = rng.uniform(1.0, 50.0);
        const double b = rng.uniform(1.0, 50.0);
        CHECK(pct_gain(a, b) == doctest::Approx(-pct_gain(b, a) * b / a).epsilon(1e-10));
    }
}

TEST_CASE("identical error series give statistic 0 and p 0.5") {
    Rng rng(706);
    const auto e = iid_errors(rng, 100, 24, 1.0);
    const DmResult r = dm_test(e, e, DmLoss::L1);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == 0.5);
}

TEST_CASE("halved errors are detected as significantly better") {
    Rng rng(707);
    const auto e_a = iid_errors(rng, 200, 24, 2.0);
    auto e_b = e_a;
    for (auto& day : e_b)
        for (auto& v : day) v *= 0.5;
    for (const DmLoss loss : {DmLoss::L1, DmLoss::L2}) {
        const DmResult r = dm_test(e_a, e_b, loss);
        CHECK(r.statistic > 3.0);
        CHECK(r.p_value < 0.01);
    }
}

TEST_CASE("dm statistic is invariant to common positive rescaling") {
    Rng rng(708);
    const auto e_a = iid_errors(rng, 150, 12, 1.5);
    const auto e_b = iid_errors(rng, 150, 12, 1.2);
    const DmResult base = dm_test(e_a, e_b, DmLoss::L2);
    auto sa = e_a;
    auto sb = e_b;
    for (auto& day : sa)
        for (auto& v : day) v *= 37.0;
    for (auto& day : sb)
        for (auto& v : day) v *= 37.0;
    const DmResult scaled = dm_test(sa, sb, DmLoss::L2);
    CHECK(std::fabs(scaled.statistic - base.statistic) <= 1e-9 * std::fabs(base.statistic));
}

TEST_CASE("short series and degenerate differentials are rejected") {
    Rng rng(709);
    const auto e_a = iid_errors(rng, 29, 24, 1.0);
    const auto e_b = iid_errors(rng, 29, 24, 1.0);
    CHECK_THROWS_AS(dm_test(e_a, e_b, DmLoss::L1), ValidationError);

    // Constant nonzero differential: zero variance but nonzero mean.
    std::vector<std::vector<double>> a(50, std::vector<double>(4, 2.0));
    std::vector<std::vector<double>> b(50, std::vector<double>(4, 1.0));
    CHECK_THROWS_AS(dm_test(a, b, DmLoss::L1), NumericError);
}

TEST_CASE("dm test holds its nominal size under equal accuracy") {
    // 1000 replications of T = 1461 equal-accuracy days; the one-sided
    // rejection rate at 5% must stay within [3%, 7%].
    Rng rng(710);
    const std::size_t t_len = 1461;
    int rejections = 0;
    const int reps = 1000;
    for (int rep = 0; rep < reps; ++rep) {
        std::vector<std::vector<double>> a(t_len, std::vector<double>(1)),
            b(t_len, std::vector<double>(1));
        for (std::size_t t = 0; t < t_len; ++t) {
            a[t][0] = rng.normal();
            b[t][0] = rng.normal();
        }
        const DmResult r = dm_test(a, b, DmLoss::L2);
        if (r.p_value < 0.05) ++rejections;
    }
    const double rate = static_cast<double>(rejections) / reps;
    CHECK(rate >= 0.03);
    CHECK(rate <= 0.07);
}

TEST_CASE("report writer emits the two documented layouts") {
    const auto dir = std::filesystem::temp_directory_path();
    ReportRow row;
    row.model = "ARX";
    row.block_length = 1;
    row.mae_base = 26.93;
    row.rmse_base = 39.83;
    row.mae_recon = 26.176;
    row.rmse_recon = 38.75;
    row.mae_gain_pct = 2.8;
    row.rmse_gain_pct = 2.7;
    row.dm_p_l1 = 0.01;
    row.dm_p_l2 = 0.02;

    write_report(std::span(&row, 1), dir / "thief_report_full.csv", true);
    std::ifstream full(dir / "thief_report_full.csv");
    std::string header, data;
    std::getline(full, header);
    std::getline(full, data);
    CHECK(header ==
          "model,level,mae_base,mae_recon,mae_gain_pct,rmse_base,rmse_recon,rmse_gain_pct,"
          "dm_p_l1,dm_p_l2");
    CHECK(data.find("ARX,1H,26.93,26.176,2.8,") == 0);

    write_report(std::span(&row, 1), dir / "thief_report_base.csv", false);
    std::ifstream base_only(dir / "thief_report_base.csv");
    std::getline(base_only, header);
    CHECK(header == "model,level,mae_base,rmse_base");
    std::filesystem::remove(dir / "thief_report_full.csv");
    std::filesystem::remove(dir / "thief_report_base.csv");
}

TEST_SUITE_END();
