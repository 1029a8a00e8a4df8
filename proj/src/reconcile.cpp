#include "thief/reconcile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string_view>

#include "thief/kernels.hpp"

namespace thief {

namespace {

constexpr double kVarianceFloor = 1e-8;
constexpr double kConditionLimit = 1e12;

}  // namespace

ErrorHistory::ErrorHistory(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw ValidationError("ErrorHistory: capacity must be positive");
}

void ErrorHistory::append(const HierarchyVector& errors) {
    for (int b = 0; b < kNumBlocks; ++b)
        if (!std::isfinite(errors[b]))
            throw ValidationError(cat("ErrorHistory: non-finite error at block ordinal ", b));
    rows_.push_back(errors);
    if (rows_.size() > capacity_) rows_.pop_front();
}

void update_daily(ErrorHistory& state, const HierarchyVector& new_errors) {
    state.append(new_errors);
}

ShrunkCovariance estimate_covariance(const ErrorHistory& errors) {
    const std::size_t n = errors.size();
    if (n < 2)
        throw ValidationError(cat("estimate_covariance: needs at least 2 error rows, got ", n));
    const double dn = static_cast<double>(n);

    std::array<double, kNumBlocks> mean{};
    for (std::size_t t = 0; t < n; ++t)
        for (int b = 0; b < kNumBlocks; ++b) mean[b] += errors.row(t)[b];
    for (int b = 0; b < kNumBlocks; ++b) mean[b] /= dn;

    // Centered rows; sample covariance S = XᵀX / (n-1).
    Matrix centered(n, kNumBlocks);
    for (std::size_t t = 0; t < n; ++t)
        for (int b = 0; b < kNumBlocks; ++b) centered(t, b) = errors.row(t)[b] - mean[b];
    Matrix sample = crossprod(centered);
    for (int j = 0; j < kNumBlocks; ++j)
        for (int k = 0; k < kNumBlocks; ++k) sample(j, k) /= dn - 1.0;

    // Sampling variance of each off-diagonal entry (Ledoit-Wolf style):
    //   var(s_jk) = n / (n-1)^3 * sum_t (w_tjk - wbar_jk)^2,
    // with w_tjk the cross products of centered rows. The shrinkage
    // intensity is sum var(s_jk) / sum s_jk^2 over j != k.
    // sum_t (w - wbar)^2 = sum_t w^2 - n wbar^2, with the squares taken
    // from transposed (contiguous) copies.
    Matrix sq(kNumBlocks, n);
    for (std::size_t t = 0; t < n; ++t)
        for (int b = 0; b < kNumBlocks; ++b) {
            const double c = centered(t, b);
            sq(b, t) = c * c;
        }
    double var_sum = 0.0;
    double sq_sum = 0.0;
    const double var_scale = dn / ((dn - 1.0) * (dn - 1.0) * (dn - 1.0));
    for (int j = 0; j < kNumBlocks; ++j) {
        for (int k = j + 1; k < kNumBlocks; ++k) {
            const double wbar = sample(j, k) * (dn - 1.0) / dn;
            const double sum_w2 = kernels::dot(sq.row(j), sq.row(k), n);
            const double dev = std::max(0.0, sum_w2 - dn * wbar * wbar);
            var_sum += 2.0 * var_scale * dev;
            sq_sum += 2.0 * sample(j, k) * sample(j, k);
        }
    }

    ShrunkCovariance out;
    out.lambda = sq_sum > 0.0 ? std::clamp(var_sum / sq_sum, 0.0, 1.0) : 0.0;

    out.target.resize(kNumBlocks);
    for (int b = 0; b < kNumBlocks; ++b) {
        double v = sample(b, b);
        if (v < kVarianceFloor) {
            v = kVarianceFloor;
            out.variance_floored = true;
        }
        out.target[b] = v;
    }

    out.w = Matrix(kNumBlocks, kNumBlocks);
    for (int j = 0; j < kNumBlocks; ++j) {
        for (int k = 0; k < kNumBlocks; ++k) {
            if (j == k)
                out.w(j, k) = out.target[j];
            else
                out.w(j, k) = (1.0 - out.lambda) * sample(j, k);
        }
    }
    return out;
}

HierarchyVector reconcile(const HierarchyVector& base, const ShrunkCovariance& w,
                          const SummingMatrix& s) {
    if (s.rows() != kNumBlocks || s.entries.cols() != kHoursPerDay)
        throw ValidationError("reconcile: expected the canonical 60x24 summing matrix");
    if (w.w.rows() != kNumBlocks || w.w.cols() != kNumBlocks)
        throw ValidationError("reconcile: W must be 60x60");
    for (int b = 0; b < kNumBlocks; ++b)
        if (!std::isfinite(base[b]))
            throw ValidationError(cat("reconcile: non-finite base forecast at block ordinal ", b));

    // P̃ = S (Sᵀ W⁻¹ S)⁻¹ Sᵀ W⁻¹ P̄ via W = L Lᵀ:
    //   U = L⁻¹ S, v = L⁻¹ P̄, G = Uᵀ U, solve G b = Uᵀ v, P̃ = S b.
    const auto advise = [](const char* what) {
        return NumericError(cat("reconcile: ", what,
                                "; increase shrinkage (more/regularized error history) or check "
                                "the base forecasts"));
    };

    Matrix u = s.entries;
    std::vector<double> v(base.begin(), base.end());
    try {
        const Cholesky lw = Cholesky::factor(w.w);
        lw.forward_solve_matrix(u);
        lw.forward_solve(v);
    } catch (const NumericError&) {
        throw advise("W is not positive definite");
    }

    Matrix gram = crossprod(u);
    std::vector<double> rhs(kHoursPerDay, 0.0);
    for (int t = 0; t < kNumBlocks; ++t) kernels::axpy(v[t], u.row(t), rhs.data(), kHoursPerDay);

    try {
        const Cholesky lg = Cholesky::factor(gram);
        if (lg.condition_estimate() > kConditionLimit)
            throw advise("SᵀW⁻¹S is numerically singular");
        lg.solve(rhs);
    } catch (const NumericError& e) {
        if (std::string_view(e.what()).starts_with("reconcile:")) throw;
        throw advise("SᵀW⁻¹S is numerically singular");
    }

    HierarchyVector out{};
    kernels::matvec(s.entries.data(), kNumBlocks, kHoursPerDay, rhs.data(), out.data());
    return out;
}

void append_covariance_diagnostics(const std::filesystem::path& dir, const std::string& date,
                                   const ShrunkCovariance& w) {
    std::filesystem::create_directories(dir);
    const auto lambda_path = dir / "lambda.csv";
    const bool fresh = !std::filesystem::exists(lambda_path);
    std::ofstream lam(lambda_path, std::ios::app);
    if (!lam) throw ValidationError(cat("cannot write ", lambda_path.string()));
    if (fresh) lam << "date,lambda\n";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", w.lambda);
    lam << date << ',' << buf << '\n';

    std::FILE* f = std::fopen((dir / ("W_" + date + ".csv")).string().c_str(), "w");
    if (f == nullptr) throw ValidationError(cat("cannot write W_", date, ".csv"));
    for (int j = 0; j < kNumBlocks; ++j) {
        for (int k = 0; k < kNumBlocks; ++k)
            std::fprintf(f, k ? ",%.17g" : "%.17g", w.w(j, k));
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

}  // namespace thief
