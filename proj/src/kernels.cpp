#include "thief/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

namespace thief::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sum(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double sumsq(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

double abs_sum(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::fabs(x[i]);
    return acc;
}

double abs_diff_sum(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::fabs(a[i] - b[i]);
    return acc;
}

double sq_diff_sum(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void matvec(const double* a, std::size_t rows, std::size_t cols,
            const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot(a + r * cols, x, cols);
}

void crossprod_upper(const double* x, std::size_t n, std::size_t p, double* c) {
    for (std::size_t t = 0; t < n; ++t) {
        const double* row = x + t * p;
        for (std::size_t j = 0; j < p; ++j) {
            const double v = row[j];
            if (v == 0.0) continue;
            double* cj = c + j * p;
            for (std::size_t k = j; k < p; ++k) cj[k] += v * row[k];
        }
    }
}

}  // namespace scalar

namespace {

struct Table {
    double (*dot)(const double*, const double*, std::size_t);
    double (*sum)(const double*, std::size_t);
    double (*sumsq)(const double*, std::size_t);
    double (*abs_sum)(const double*, std::size_t);
    double (*abs_diff_sum)(const double*, const double*, std::size_t);
    double (*sq_diff_sum)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*matvec)(const double*, std::size_t, std::size_t, const double*, double*);
    void (*crossprod_upper)(const double*, std::size_t, std::size_t, double*);
    const char* name;
};

constexpr Table kScalarTable = {
    scalar::dot,      scalar::sum,          scalar::sumsq,
    scalar::abs_sum,  scalar::abs_diff_sum, scalar::sq_diff_sum,
    scalar::axpy,     scalar::matvec,       scalar::crossprod_upper,
    "scalar",
};

#if defined(THIEF_HAVE_AVX2)
constexpr Table kAvx2Table = {
    avx2::dot,      avx2::sum,          avx2::sumsq,
    avx2::abs_sum,  avx2::abs_diff_sum, avx2::sq_diff_sum,
    avx2::axpy,     avx2::matvec,       avx2::crossprod_upper,
    "avx2",
};

bool cpu_has_avx2_fma() {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const Table& select_table() {
    const char* pin = std::getenv("THIEF_SIMD");
#if defined(THIEF_HAVE_AVX2)
    if (pin != nullptr) {
        if (std::strcmp(pin, "scalar") == 0) return kScalarTable;
        if (std::strcmp(pin, "avx2") == 0 && cpu_has_avx2_fma()) return kAvx2Table;
        return kScalarTable;
    }
    if (cpu_has_avx2_fma()) return kAvx2Table;
#else
    (void)pin;
#endif
    return kScalarTable;
}

const Table& table() {
    static const Table& t = select_table();
    return t;
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
    return table().dot(a, b, n);
}
double sum(const double* x, std::size_t n) { return table().sum(x, n); }
double sumsq(const double* x, std::size_t n) { return table().sumsq(x, n); }
double abs_sum(const double* x, std::size_t n) { return table().abs_sum(x, n); }
double abs_diff_sum(const double* a, const double* b, std::size_t n) {
    return table().abs_diff_sum(a, b, n);
}
double sq_diff_sum(const double* a, const double* b, std::size_t n) {
    return table().sq_diff_sum(a, b, n);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
    table().axpy(alpha, x, y, n);
}
void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x,
            double* y) {
    table().matvec(a, rows, cols, x, y);
}
void crossprod_upper(const double* x, std::size_t n, std::size_t p, double* c) {
    table().crossprod_upper(x, n, p, c);
}

std::string_view active_backend() { return table().name; }

}  // namespace thief::kernels
