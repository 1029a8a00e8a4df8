#include "thief/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "thief/kernels.hpp"

namespace thief {

namespace {

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

LevelMetrics level_metrics(std::span<const HierarchyVector> forecasts,
                           std::span<const HierarchyVector> actuals, int block_length) {
    if (forecasts.size() != actuals.size())
        throw ValidationError(cat("level_metrics: ", forecasts.size(), " forecast days vs ",
                                  actuals.size(), " actual days"));
    if (forecasts.empty()) throw ValidationError("level_metrics: no days");
    const int offset = level_offset(block_length);
    const int width = level_block_count(block_length);

    double abs_acc = 0.0;
    double sq_acc = 0.0;
    for (std::size_t d = 0; d < forecasts.size(); ++d) {
        abs_acc += kernels::abs_diff_sum(forecasts[d].data() + offset,
                                         actuals[d].data() + offset, width);
        sq_acc += kernels::sq_diff_sum(forecasts[d].data() + offset,
                                       actuals[d].data() + offset, width);
    }
    const double cells = static_cast<double>(forecasts.size()) * width;

    LevelMetrics m;
    m.block_length = block_length;
    m.mae = abs_acc / cells;
    m.rmse = std::sqrt(sq_acc / cells);
    m.n_days = forecasts.size();
    return m;
}

double pct_gain(double base_metric, double reconciled_metric) {
    if (!(base_metric > 0.0))
        throw ValidationError(cat("pct_gain: base metric must be positive, got ", base_metric));
    return 100.0 * (base_metric - reconciled_metric) / base_metric;
}

DmResult dm_test(std::span<const std::vector<double>> errors_a,
                 std::span<const std::vector<double>> errors_b, DmLoss loss) {
    const std::size_t t_len = errors_a.size();
    if (t_len != errors_b.size())
        throw ValidationError("dm_test: series lengths differ");
    if (t_len < 30)
        throw ValidationError(cat("dm_test: needs at least 30 days, got ", t_len));

    std::vector<double> d(t_len);
    for (std::size_t t = 0; t < t_len; ++t) {
        const auto& ea = errors_a[t];
        const auto& eb = errors_b[t];
        if (ea.size() != eb.size() || ea.empty())
            throw ValidationError(cat("dm_test: day ", t, " has mismatched error vectors"));
        double na, nb;
        if (loss == DmLoss::L1) {
            na = kernels::abs_sum(ea.data(), ea.size());
            nb = kernels::abs_sum(eb.data(), eb.size());
        } else {
            na = std::sqrt(kernels::sumsq(ea.data(), ea.size()));
            nb = std::sqrt(kernels::sumsq(eb.data(), eb.size()));
        }
        d[t] = na - nb;
    }

    const double tn = static_cast<double>(t_len);
    const double mean = kernels::sum(d.data(), t_len) / tn;

    // Long-run variance: Bartlett kernel, lag floor(T^(1/3)).
    const auto autocov = [&](std::size_t k) {
        double acc = 0.0;
        for (std::size_t t = k; t < t_len; ++t) acc += (d[t] - mean) * (d[t - k] - mean);
        return acc / tn;
    };
    const std::size_t max_lag = static_cast<std::size_t>(std::floor(std::cbrt(tn)));
    double lrv = autocov(0);
    for (std::size_t k = 1; k <= max_lag; ++k) {
        const double weight = 1.0 - static_cast<double>(k) / static_cast<double>(max_lag + 1);
        lrv += 2.0 * weight * autocov(k);
    }

    DmResult res;
    res.loss = loss;
    if (lrv <= 0.0) {
        const bool all_zero =
            std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; });
        if (all_zero) return res;  // identical forecasts: statistic 0, p 0.5
        throw NumericError("dm_test: loss differential has zero long-run variance");
    }
    res.statistic = mean / std::sqrt(lrv / tn);
    res.p_value = 1.0 - standard_normal_cdf(res.statistic);
    return res;
}

void write_report(std::span<const ReportRow> rows, const std::filesystem::path& path,
                  bool with_reconciled) {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (f == nullptr) throw ValidationError(cat("cannot write ", path.string()));
    const auto opt = [&](const std::optional<double>& v) {
        if (v) std::fprintf(f, ",%.6g", *v);
        else std::fprintf(f, ",");
    };
    if (with_reconciled) {
        std::fprintf(f,
                     "model,level,mae_base,mae_recon,mae_gain_pct,rmse_base,rmse_recon,"
                     "rmse_gain_pct,dm_p_l1,dm_p_l2\n");
        for (const ReportRow& r : rows) {
            std::fprintf(f, "%s,%dH,%.6g", r.model.c_str(), r.block_length, r.mae_base);
            opt(r.mae_recon);
            opt(r.mae_gain_pct);
            std::fprintf(f, ",%.6g", r.rmse_base);
            opt(r.rmse_recon);
            opt(r.rmse_gain_pct);
            opt(r.dm_p_l1);
            opt(r.dm_p_l2);
            std::fprintf(f, "\n");
        }
    } else {
        std::fprintf(f, "model,level,mae_base,rmse_base\n");
        for (const ReportRow& r : rows)
            std::fprintf(f, "%s,%dH,%.6g,%.6g\n", r.model.c_str(), r.block_length, r.mae_base,
                         r.rmse_base);
    }
    std::fclose(f);
}

}  // namespace thief
