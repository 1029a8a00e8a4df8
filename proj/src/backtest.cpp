#include "thief/backtest.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "thief/features.hpp"
#include "thief/forecast.hpp"
#include "thief/rng.hpp"

namespace thief {

namespace {

constexpr std::size_t kMinTrainWindow = 30;
constexpr std::uint64_t kBootstrapTag = 0x626f6f74ULL;
constexpr std::uint64_t kDailyTag = 0x6461696cULL;

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("THIEF_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(0..n-1) on `threads` workers; rethrows the first failure.
template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// Training design for one (origin day, block): rows for every window day
// with full lag history, targets in transformed space.
struct TrainingSet {
    Matrix x;
    std::vector<double> y;
    std::vector<std::size_t> days;  // panel index per row
};

TrainingSet assemble_training(const BlockSeriesCache& cache, std::size_t origin,
                              std::size_t window, BlockId block, const FeatureParams& params) {
    const std::size_t t0 = origin - window;
    const std::size_t t_lo = std::max<std::size_t>(t0, kLagDays);
    if (t_lo >= origin) throw ValidationError("assemble_training: empty training range");

    TrainingSet set;
    const std::size_t rows = origin - t_lo;
    set.x = Matrix(rows, kNumFeatures);
    set.y.resize(rows);
    set.days.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = t_lo + r;
        const FeatureVector fv = build_features(cache, t, block, params);
        std::copy(fv.begin(), fv.end(), set.x.row(r));
        set.y[r] = apply_transform(cache.at(t, block, PanelSeries::Price), params.price);
        set.days[r] = t;
    }
    return set;
}

double fit_and_predict(const BlockSeriesCache& cache, std::size_t target_day,
                       std::size_t window, BlockId block, ModelKind model,
                       std::uint64_t fit_seed) {
    const FeatureParams params = fit_feature_params(cache, target_day, window, block);
    const TrainingSet set = assemble_training(cache, target_day, window, block, params);
    const FeatureVector x_new = build_features(cache, target_day, block, params);
    if (model == ModelKind::Narx) {
        const NarxModel net = fit_narx(set.x, set.y, fit_seed);
        return predict_narx(net, x_new, params.price);
    }
    const ArxModel arx = fit_arx(set.x, set.y);
    return predict_arx(arx, x_new, params.price);
}

struct ExternalAligned {
    std::string model_name;
    const ExternalBaseForecasts* data;
};

HierarchyVector external_vector(const ExternalBaseForecasts& ext, Date date) {
    const auto idx = ext.index_of(date);
    if (!idx)
        throw ValidationError(cat("external base forecasts: no entry for ", date.to_string()));
    return ext.forecasts[*idx];
}

void check_config(const PanelData& panel, const BacktestConfig& config, std::size_t& i_start,
                  std::size_t& i_end) {
    if (config.train_window < kMinTrainWindow)
        throw ValidationError(cat("backtest: train_window must be at least ", kMinTrainWindow,
                                  " days, got ", config.train_window));
    if (config.model == ModelKind::External && !config.external_file)
        throw ValidationError("backtest: external model requires external_file");
    const auto s = panel.index_of(config.test_start);
    const auto e = panel.index_of(config.test_end);
    if (!s || !e)
        throw ValidationError(cat("backtest: test range ", config.test_start.to_string(), "..",
                                  config.test_end.to_string(), " not inside the panel ",
                                  panel.dates.front().to_string(), "..",
                                  panel.dates.back().to_string()));
    if (*e < *s) throw ValidationError("backtest: test_end before test_start");
    if (*s < config.train_window)
        throw ValidationError(cat("backtest: needs ", config.train_window,
                                  " training days before ", config.test_start.to_string(),
                                  "; panel provides ", *s));
    const std::size_t t_lo = std::max<std::size_t>(*s - config.train_window, kLagDays);
    const std::size_t usable = *s - t_lo;
    const std::size_t needed = config.model == ModelKind::Narx ? 100 : kNumFeatures + 1;
    if (usable < needed)
        throw ValidationError(cat("backtest: window yields ", usable,
                                  " usable training rows; model needs ", needed));
    i_start = *s;
    i_end = *e;
}

ErrorHistory bootstrap_impl(const BlockSeriesCache& cache, const PanelData& panel,
                            const BacktestConfig& config, std::size_t i_start) {
    ErrorHistory history(config.train_window);

    if (config.model == ModelKind::External) {
        const ExternalBaseForecasts ext = load_external_base_forecasts(*config.external_file);
        const SummingMatrix s = build_summing_matrix();
        std::size_t used = 0;
        for (std::size_t t = i_start > config.train_window ? i_start - config.train_window : 0;
             t < i_start; ++t) {
            const auto idx = ext.index_of(panel.dates[t]);
            if (!idx) continue;
            const HierarchyVector actual = aggregate(panel.prices[t], s);
            HierarchyVector err{};
            for (int b = 0; b < kNumBlocks; ++b) err[b] = ext.forecasts[*idx][b] - actual[b];
            history.append(err);
            ++used;
        }
        if (used < 2)
            throw ValidationError(
                cat("backtest: external bootstrap found ", used, " forecast days before ",
                    config.test_start.to_string(),
                    "; include at least 2 pre-test days (ideally the training window) in the "
                    "external file"));
        return history;
    }

    const std::size_t window = config.train_window;
    const std::size_t t0 = i_start - window;
    const std::size_t t_lo = std::max<std::size_t>(t0, kLagDays);
    const std::size_t n_days = i_start - t_lo;
    const int threads = resolve_threads(config.threads);

    // errors[day][block], filled per block then folded row-wise.
    Matrix errors(n_days, kNumBlocks);

    if (!config.strict_bootstrap) {
        // Single fit on the full window; in-sample residuals in price space.
        parallel_for(kNumBlocks, threads, [&](int ord) {
            const BlockId block = block_at(ord);
            try {
                const FeatureParams params = fit_feature_params(cache, i_start, window, block);
                const TrainingSet set = assemble_training(cache, i_start, window, block, params);
                const auto predict_row = [&](std::size_t r) {
                    FeatureVector fv{};
                    std::copy_n(set.x.row(r), kNumFeatures, fv.begin());
                    return fv;
                };
                if (config.model == ModelKind::Narx) {
                    const NarxModel net =
                        fit_narx(set.x, set.y, derive_seed(config.seed, kBootstrapTag, ord));
                    for (std::size_t r = 0; r < set.days.size(); ++r) {
                        const double price = predict_narx(net, predict_row(r), params.price);
                        errors(set.days[r] - t_lo, ord) =
                            price - cache.at(set.days[r], block, PanelSeries::Price);
                    }
                } else {
                    const ArxModel arx = fit_arx(set.x, set.y);
                    for (std::size_t r = 0; r < set.days.size(); ++r) {
                        const double price = predict_arx(arx, predict_row(r), params.price);
                        errors(set.days[r] - t_lo, ord) =
                            price - cache.at(set.days[r], block, PanelSeries::Price);
                    }
                }
            } catch (const Error& e) {
                throw Error(cat("bootstrap block (", block.length, "H, index ", block.index,
                                "): ", e.what()));
            }
        });
    } else {
        // Refit before every in-sample day on the trailing data available
        // inside the panel, mirroring the daily loop.
        const std::size_t min_rows = config.model == ModelKind::Narx ? 100 : kNumFeatures + 1;
        parallel_for(kNumBlocks, threads, [&](int ord) {
            const BlockId block = block_at(ord);
            try {
                for (std::size_t t = t_lo; t < i_start; ++t) {
                    const std::size_t win =
                        std::min<std::size_t>(window, t);  // trailing days available
                    const std::size_t rows_avail = t - std::max<std::size_t>(t - win, kLagDays);
                    if (win < 2 || rows_avail < min_rows) {
                        // Too little history to fit: mark as zero error so the
                        // row count stays aligned; these early rows age out of
                        // the rolling history quickly.
                        errors(t - t_lo, ord) = 0.0;
                        continue;
                    }
                    const double price =
                        fit_and_predict(cache, t, win, block, config.model,
                                        derive_seed(config.seed, kBootstrapTag, t, ord));
                    errors(t - t_lo, ord) = price - cache.at(t, block, PanelSeries::Price);
                }
            } catch (const Error& e) {
                throw Error(cat("strict bootstrap block (", block.length, "H, index ",
                                block.index, "): ", e.what()));
            }
        });
    }

    for (std::size_t r = 0; r < n_days; ++r) {
        HierarchyVector row{};
        std::copy_n(errors.row(r), kNumBlocks, row.begin());
        history.append(row);
    }
    return history;
}

class CheckpointWriter {
public:
    CheckpointWriter(const std::optional<std::filesystem::path>& path, bool append)
        : enabled_(path.has_value()) {
        if (!enabled_) return;
        file_ = std::fopen(path->string().c_str(), append ? "a" : "w");
        if (file_ == nullptr) throw ValidationError(cat("cannot write ", path->string()));
        if (!append) std::fprintf(file_, "date,block_length,block_index,base,reconciled\n");
    }
    ~CheckpointWriter() {
        if (file_ != nullptr) std::fclose(file_);
    }
    CheckpointWriter(const CheckpointWriter&) = delete;
    CheckpointWriter& operator=(const CheckpointWriter&) = delete;

    void write_day(Date date, const HierarchyVector& base, const HierarchyVector* recon) {
        if (!enabled_) return;
        const std::string ds = date.to_string();
        for (int ord = 0; ord < kNumBlocks; ++ord) {
            const BlockId b = block_at(ord);
            if (recon != nullptr)
                std::fprintf(file_, "%s,%d,%d,%.17g,%.17g\n", ds.c_str(), b.length, b.index,
                             base[ord], (*recon)[ord]);
            else
                std::fprintf(file_, "%s,%d,%d,%.17g,\n", ds.c_str(), b.length, b.index, base[ord]);
        }
        std::fflush(file_);
    }

private:
    bool enabled_;
    std::FILE* file_ = nullptr;
};

}  // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Arx: return "arx";
        case ModelKind::Narx: return "narx";
        default: return "external";
    }
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "arx" || name == "ARX") return ModelKind::Arx;
    if (name == "narx" || name == "NARX") return ModelKind::Narx;
    if (name == "external" || name == "EXTERNAL") return ModelKind::External;
    throw ValidationError(cat("unknown model '", name, "' (expected arx, narx or external)"));
}

ErrorHistory bootstrap_error_history(const PanelData& panel, const BacktestConfig& config) {
    std::size_t i_start = 0, i_end = 0;
    check_config(panel, config, i_start, i_end);
    const BlockSeriesCache cache(panel);
    return bootstrap_impl(cache, panel, config, i_start);
}

BacktestReport run(const PanelData& panel, const BacktestConfig& config) {
    const auto t_begin = std::chrono::steady_clock::now();
    std::size_t i_start = 0, i_end = 0;
    check_config(panel, config, i_start, i_end);

    const BlockSeriesCache cache(panel);
    const SummingMatrix s = build_summing_matrix();
    const int threads = resolve_threads(config.threads);
    const std::size_t n_test = i_end - i_start + 1;

    std::optional<ExternalBaseForecasts> external;
    if (config.model == ModelKind::External)
        external = load_external_base_forecasts(*config.external_file);

    BacktestReport report;
    report.model_name = config.model == ModelKind::External
                            ? external->model_name
                            : (config.model == ModelKind::Narx ? "NARX" : "ARX");
    report.test_dates.reserve(n_test);
    report.base.reserve(n_test);
    report.actuals.reserve(n_test);

    ErrorHistory history = bootstrap_impl(cache, panel, config, i_start);

    // Resume: fold the checkpoint's completed days back in.
    std::size_t resume_days = 0;
    if (config.checkpoint_file && std::filesystem::exists(*config.checkpoint_file)) {
        const auto done = load_forecasts(*config.checkpoint_file);
        for (const DayForecasts& day : done) {
            const std::size_t expect = i_start + resume_days;
            if (expect > i_end || panel.dates[expect] != day.date)
                throw ValidationError(
                    cat("checkpoint ", config.checkpoint_file->string(), ": day ",
                        day.date.to_string(), " does not match the configured test range; ",
                        "delete the file to restart"));
            if (day.reconciled.has_value() != config.reconcile)
                throw ValidationError(cat("checkpoint ", config.checkpoint_file->string(),
                                          ": reconciled columns do not match the config; ",
                                          "delete the file to restart"));
            const HierarchyVector actual = aggregate(panel.prices[expect], s);
            HierarchyVector err{};
            for (int b = 0; b < kNumBlocks; ++b) err[b] = day.base[b] - actual[b];
            report.test_dates.push_back(day.date);
            report.base.push_back(day.base);
            if (day.reconciled) report.reconciled.push_back(*day.reconciled);
            report.actuals.push_back(actual);
            update_daily(history, err);
            ++resume_days;
        }
    }
    report.resumed_days = resume_days;
    CheckpointWriter checkpoint(config.checkpoint_file, resume_days > 0);

    for (std::size_t day = i_start + resume_days; day <= i_end; ++day) {
        const Date date = panel.dates[day];
        HierarchyVector base{};

        if (config.model == ModelKind::External) {
            base = external_vector(*external, date);
        } else {
            parallel_for(kNumBlocks, threads, [&](int ord) {
                const BlockId block = block_at(ord);
                try {
                    base[ord] = fit_and_predict(cache, day, config.train_window, block,
                                                config.model,
                                                derive_seed(config.seed, kDailyTag, day, ord));
                } catch (const Error& e) {
                    throw Error(cat("backtest day ", date.to_string(), " block (", block.length,
                                    "H, index ", block.index, "): ", e.what()));
                }
            });
        }

        std::optional<HierarchyVector> recon;
        if (config.reconcile) {
            const ShrunkCovariance w = estimate_covariance(history);
            try {
                recon = reconcile(base, w, s);
            } catch (const Error& e) {
                throw Error(cat("backtest day ", date.to_string(), ": ", e.what()));
            }
            if (config.w_diag_dir)
                append_covariance_diagnostics(*config.w_diag_dir, date.to_string(), w);
        }

        const HierarchyVector actual = aggregate(panel.prices[day], s);
        checkpoint.write_day(date, base, recon ? &*recon : nullptr);

        HierarchyVector err{};
        for (int b = 0; b < kNumBlocks; ++b) err[b] = base[b] - actual[b];
        update_daily(history, err);

        report.test_dates.push_back(date);
        report.base.push_back(base);
        if (recon) report.reconciled.push_back(*recon);
        report.actuals.push_back(actual);
    }

    // Per-level metrics, gains and DM significance (finest level first).
    for (auto it = kBlockLengths.rbegin(); it != kBlockLengths.rend(); ++it) {
        const int len = *it;
        ReportRow row;
        row.model = report.model_name;
        row.block_length = len;
        const LevelMetrics base_m = level_metrics(report.base, report.actuals, len);
        row.mae_base = base_m.mae;
        row.rmse_base = base_m.rmse;
        if (config.reconcile) {
            const LevelMetrics rec_m = level_metrics(report.reconciled, report.actuals, len);
            row.mae_recon = rec_m.mae;
            row.rmse_recon = rec_m.rmse;
            // A perfect base forecast leaves nothing to gain; report 0.
            row.mae_gain_pct = base_m.mae > 0.0 ? pct_gain(base_m.mae, rec_m.mae) : 0.0;
            row.rmse_gain_pct = base_m.rmse > 0.0 ? pct_gain(base_m.rmse, rec_m.rmse) : 0.0;
            if (report.test_dates.size() >= 30) {
                const int offset = level_offset(len);
                const int width = level_block_count(len);
                std::vector<std::vector<double>> err_base(report.test_dates.size()),
                    err_rec(report.test_dates.size());
                for (std::size_t d = 0; d < report.test_dates.size(); ++d) {
                    err_base[d].resize(width);
                    err_rec[d].resize(width);
                    for (int b = 0; b < width; ++b) {
                        err_base[d][b] = report.base[d][offset + b] - report.actuals[d][offset + b];
                        err_rec[d][b] =
                            report.reconciled[d][offset + b] - report.actuals[d][offset + b];
                    }
                }
                try {
                    row.dm_p_l1 = dm_test(err_base, err_rec, DmLoss::L1).p_value;
                    row.dm_p_l2 = dm_test(err_base, err_rec, DmLoss::L2).p_value;
                } catch (const NumericError&) {
                    // Degenerate differential (e.g. constant); leave blank.
                }
            }
        }
        report.rows.push_back(std::move(row));
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    return report;
}

BacktestRunSpec load_run_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(cat("cannot open config ", path.string()));

    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError(cat(path.string(), " line ", line_no, ": expected key = value"));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ValidationError(cat(path.string(), " line ", line_no, ": empty key or value"));
        if (kv.count(key))
            throw ValidationError(cat(path.string(), ": duplicate key '", key, "'"));
        kv[key] = value;
    }

    const auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    const auto require = [&](const char* key) {
        auto v = take(key);
        if (!v) throw ValidationError(cat(path.string(), ": missing required key '", key, "'"));
        return *v;
    };
    const auto parse_bool = [&](const std::string& v, const char* key) {
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ValidationError(cat(path.string(), ": key '", key, "' must be true or false"));
    };

    // Relative paths resolve against the config file's directory.
    const auto resolve = [&](const std::string& p) {
        const std::filesystem::path fp(p);
        return fp.is_absolute() ? fp : path.parent_path() / fp;
    };

    BacktestRunSpec spec;
    spec.prices = resolve(require("prices"));
    spec.load = resolve(require("load"));
    spec.wind = resolve(require("wind"));
    spec.fuels = resolve(require("fuels"));
    spec.config.test_start = Date::parse(require("test_start"));
    spec.config.test_end = Date::parse(require("test_end"));
    if (auto v = take("train_window")) spec.config.train_window = std::stoul(*v);
    if (auto v = take("model")) spec.config.model = model_kind_from_string(*v);
    if (auto v = take("external_file")) spec.config.external_file = resolve(*v);
    if (auto v = take("seed")) spec.config.seed = std::stoull(*v);
    if (auto v = take("reconcile")) spec.config.reconcile = parse_bool(*v, "reconcile");
    if (auto v = take("strict_bootstrap"))
        spec.config.strict_bootstrap = parse_bool(*v, "strict_bootstrap");
    if (auto v = take("out_dir")) spec.out_dir = resolve(*v);
    if (auto v = take("threads")) spec.config.threads = std::stoi(*v);
    if (auto v = take("w_diag_dir")) spec.config.w_diag_dir = resolve(*v);
    if (!kv.empty())
        throw ValidationError(cat(path.string(), ": unknown key '", kv.begin()->first, "'"));
    return spec;
}

}  // namespace thief
