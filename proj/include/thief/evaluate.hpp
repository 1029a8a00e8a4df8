#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thief/hierarchy.hpp"

namespace thief {

// Accuracy of one model at one hierarchy level over the test window.
struct LevelMetrics {
    int block_length = 0;  // level label (1, 2, ..., 24)
    double mae = 0.0;      // EUR/MWh
    double rmse = 0.0;     // EUR/MWh
    std::size_t n_days = 0;
};

// MAE/RMSE over all (day, block-in-level) cells.
LevelMetrics level_metrics(std::span<const HierarchyVector> forecasts,
                           std::span<const HierarchyVector> actuals, int block_length);

// 100 * (base - reconciled) / base. Positive means reconciliation helped.
double pct_gain(double base_metric, double reconciled_metric);

enum class DmLoss { L1, L2 };

struct DmResult {
    double statistic = 0.0;  // standardized mean loss differential
    double p_value = 0.5;    // one-sided; small favors forecaster b
    DmLoss loss = DmLoss::L1;
};

// Multivariate Diebold-Mariano test on daily loss differentials
//   d_t = ||errors_a[t]|| - ||errors_b[t]||
// with the L1 or L2 vector norm over the day's blocks. The long-run
// variance uses a Bartlett kernel with lag floor(T^(1/3)). Requires at
// least 30 days; identical series give statistic 0, p 0.5; otherwise a
// zero-variance differential is an error.
DmResult dm_test(std::span<const std::vector<double>> errors_a,
                 std::span<const std::vector<double>> errors_b, DmLoss loss);

// One report.csv row (per model and level).
struct ReportRow {
    std::string model;
    int block_length = 0;
    double mae_base = 0.0;
    double rmse_base = 0.0;
    std::optional<double> mae_recon;
    std::optional<double> rmse_recon;
    std::optional<double> mae_gain_pct;
    std::optional<double> rmse_gain_pct;
    std::optional<double> dm_p_l1;
    std::optional<double> dm_p_l2;
};

// Writes the Table-style report. With reconciled columns present the
// header is model,level,mae_base,mae_recon,mae_gain_pct,rmse_base,
// rmse_recon,rmse_gain_pct,dm_p_l1,dm_p_l2; without them it shrinks to
// model,level,mae_base,rmse_base.
void write_report(std::span<const ReportRow> rows, const std::filesystem::path& path,
                  bool with_reconciled);

}  // namespace thief
