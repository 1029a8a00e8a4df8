#pragma once

#include <cstddef>
#include <deque>
#include <filesystem>
#include <span>

#include "thief/hierarchy.hpp"
#include "thief/linalg.hpp"

namespace thief {

// Rolling window of daily base-forecast errors (forecast - actual,
// EUR/MWh, canonical block order). Oldest rows are evicted once the
// capacity is reached.
class ErrorHistory {
public:
    explicit ErrorHistory(std::size_t capacity = 1092);

    std::size_t size() const { return rows_.size(); }
    std::size_t capacity() const { return capacity_; }
    const HierarchyVector& row(std::size_t i) const { return rows_[i]; }

    // Appends one day of errors, evicting the oldest row at capacity.
    void append(const HierarchyVector& errors);

private:
    std::size_t capacity_;
    std::deque<HierarchyVector> rows_;
};

// Base-error covariance shrunk toward its diagonal:
//   W = (1 - lambda) * SampleCov + lambda * diag(SampleCov).
struct ShrunkCovariance {
    Matrix w;                    // 60 x 60 symmetric
    double lambda = 0.0;         // shrinkage intensity in [0, 1]
    std::vector<double> target;  // diagonal of the sample covariance
    bool variance_floored = false;
};

// Ledoit-Wolf-style closed form with the diagonal target: lambda is the
// ratio of the summed sampling variances of the off-diagonal covariance
// estimates to the summed squared off-diagonal covariances, clamped to
// [0, 1]. Sample covariance uses the n-1 divisor. Diagonal entries of a
// zero-variance block are floored at 1e-8 (flagged).
ShrunkCovariance estimate_covariance(const ErrorHistory& errors);

// THieF projection of the base vector onto the coherent subspace,
// weighted by W^{-1}. Computed via Cholesky factorizations of W and of
// the 24x24 Gram matrix; no explicit inverses. Throws NumericError with
// shrinkage advice when the system is numerically singular.
HierarchyVector reconcile(const HierarchyVector& base, const ShrunkCovariance& w,
                          const SummingMatrix& s);

// Appends the day's errors. Same as ErrorHistory::append; kept as a free
// function so call sites read like the daily update they implement.
void update_daily(ErrorHistory& state, const HierarchyVector& new_errors);

// Diagnostics dump: date,lambda plus the full W matrix per day.
void append_covariance_diagnostics(const std::filesystem::path& dir, const std::string& date,
                                   const ShrunkCovariance& w);

}  // namespace thief
