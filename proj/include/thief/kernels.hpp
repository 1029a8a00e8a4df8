#pragma once

#include <cstddef>
#include <string_view>

// Dense inner-loop kernels used by the numerics above them (regression,
// covariance estimation, reconciliation, metrics). Every kernel has a
// scalar reference implementation; on x86-64 an AVX2/FMA variant is
// compiled into a separate translation unit and selected at runtime via
// cpuid. The dispatched entry points in thief::kernels are what library
// code calls. Set THIEF_SIMD=scalar (or avx2) to pin the backend.
//
// The SIMD variants reorder reductions (multiple accumulators, FMA), so
// agreement with the scalar reference is to rounding error, not bitwise;
// the equivalence suite checks a ~1e-13 relative bound.

namespace thief::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
double sumsq(const double* x, std::size_t n);
double abs_sum(const double* x, std::size_t n);
double abs_diff_sum(const double* a, const double* b, std::size_t n);
double sq_diff_sum(const double* a, const double* b, std::size_t n);
// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);
// y = A x for row-major A (rows x cols)
void matvec(const double* a, std::size_t rows, std::size_t cols,
            const double* x, double* y);
// C += Xᵀ X for row-major X (n x p); only the upper triangle (j <= k) of
// the row-major p x p matrix C is touched. Caller mirrors if needed.
void crossprod_upper(const double* x, std::size_t n, std::size_t p, double* c);

}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
double sumsq(const double* x, std::size_t n);
double abs_sum(const double* x, std::size_t n);
double abs_diff_sum(const double* a, const double* b, std::size_t n);
double sq_diff_sum(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void matvec(const double* a, std::size_t rows, std::size_t cols,
            const double* x, double* y);
void crossprod_upper(const double* x, std::size_t n, std::size_t p, double* c);

}  // namespace avx2
#endif

// Runtime-dispatched entry points.
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
double sumsq(const double* x, std::size_t n);
double abs_sum(const double* x, std::size_t n);
double abs_diff_sum(const double* a, const double* b, std::size_t n);
double sq_diff_sum(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void matvec(const double* a, std::size_t rows, std::size_t cols,
            const double* x, double* y);
void crossprod_upper(const double* x, std::size_t n, std::size_t p, double* c);

// Name of the backend behind the dispatched entry points ("scalar" or "avx2").
std::string_view active_backend();

}  // namespace thief::kernels
