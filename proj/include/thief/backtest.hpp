#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "thief/dataio.hpp"
#include "thief/evaluate.hpp"
#include "thief/reconcile.hpp"

namespace thief {

enum class ModelKind { Arx, Narx, External };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct BacktestConfig {
    std::size_t train_window = 1092;  // days; also the error-history capacity
    Date test_start;
    Date test_end;
    ModelKind model = ModelKind::Arx;
    std::optional<std::filesystem::path> external_file;
    std::uint64_t seed = 0;
    bool reconcile = true;
    // Strict bootstrap refits the model before every in-sample day
    // instead of once on the whole window (orders of magnitude slower).
    bool strict_bootstrap = false;
    // Streamed per-day forecasts; an existing consistent file resumes an
    // interrupted run.
    std::optional<std::filesystem::path> checkpoint_file;
    // Per-day W and lambda dumps.
    std::optional<std::filesystem::path> w_diag_dir;
    int threads = 0;  // 0: THIEF_THREADS env var, then hardware concurrency
};

struct BacktestReport {
    std::string model_name;
    std::vector<Date> test_dates;
    std::vector<HierarchyVector> base;
    std::vector<HierarchyVector> reconciled;  // empty when reconcile is off
    std::vector<HierarchyVector> actuals;
    std::vector<ReportRow> rows;  // one per hierarchy level, finest first
    double wall_seconds = 0.0;    // informational; not part of determinism
    std::size_t resumed_days = 0;
};

// Seeds the error history with base-forecast errors over the initial
// training window. Fast mode (default) fits each block once on the full
// window and uses in-sample residuals; strict mode refits before every
// in-sample day. For external forecasts the file's pre-test days are
// used instead (at least 2 required).
ErrorHistory bootstrap_error_history(const PanelData& panel, const BacktestConfig& config);

// Rolling-origin experiment: per test day, fit transforms and models on
// the trailing window, forecast all 60 blocks, reconcile with W from the
// current error history, then fold the day's base errors into the
// history. Nothing for day d reads panel data after d except d's own
// day-ahead load/wind forecasts.
BacktestReport run(const PanelData& panel, const BacktestConfig& config);

// Flat key-value config file (key = value, '#' comments). Keys: prices,
// load, wind, fuels, test_start, test_end (required); train_window,
// model, external_file, seed, reconcile, strict_bootstrap, out_dir,
// threads, w_diag_dir (optional).
struct BacktestRunSpec {
    std::filesystem::path prices, load, wind, fuels;
    BacktestConfig config;
    std::filesystem::path out_dir = ".";
};

BacktestRunSpec load_run_spec(const std::filesystem::path& path);

}  // namespace thief
