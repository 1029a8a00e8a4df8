#include "thief/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thief/kernels.hpp"

namespace thief {

std::vector<double> matvec(const Matrix& a, std::span<const double> x) {
    if (x.size() != a.cols()) throw Error("matvec: dimension mismatch");
    std::vector<double> y(a.rows());
    kernels::matvec(a.data(), a.rows(), a.cols(), x.data(), y.data());
    return y;
}

Matrix crossprod(const Matrix& a) {
    Matrix c(a.cols(), a.cols());
    kernels::crossprod_upper(a.data(), a.rows(), a.cols(), c.data());
    for (std::size_t j = 0; j < c.rows(); ++j)
        for (std::size_t k = j + 1; k < c.cols(); ++k) c(k, j) = c(j, k);
    return c;
}

Cholesky Cholesky::factor(const Matrix& a) {
    if (a.rows() != a.cols()) throw Error("cholesky: matrix not square");
    const std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j) - kernels::sumsq(l.row(j), j);
        if (!(d > 0.0) || !std::isfinite(d))
            throw NumericError(
                cat("cholesky: matrix not positive definite at pivot ", j,
                    " (value ", d, ")"));
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        const double inv = 1.0 / ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            const double s = a(i, j) - kernels::dot(l.row(i), l.row(j), j);
            l(i, j) = s * inv;
        }
    }
    Cholesky chol(std::move(l));
    chol.min_pivot_ = std::numeric_limits<double>::infinity();
    chol.max_pivot_ = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        chol.min_pivot_ = std::min(chol.min_pivot_, chol.l_(j, j));
        chol.max_pivot_ = std::max(chol.max_pivot_, chol.l_(j, j));
    }
    return chol;
}

double Cholesky::condition_estimate() const {
    const double r = max_pivot_ / min_pivot_;
    return r * r;
}

void Cholesky::forward_solve(std::span<double> b) const {
    const std::size_t n = l_.rows();
    for (std::size_t i = 0; i < n; ++i) {
        const double s = b[i] - kernels::dot(l_.row(i), b.data(), i);
        b[i] = s / l_(i, i);
    }
}

void Cholesky::backward_solve(std::span<double> b) const {
    const std::size_t n = l_.rows();
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l_(k, ii) * b[k];
        b[ii] = s / l_(ii, ii);
    }
}

void Cholesky::solve(std::span<double> b) const {
    forward_solve(b);
    backward_solve(b);
}

void Cholesky::forward_solve_matrix(Matrix& b) const {
    const std::size_t n = l_.rows();
    if (b.rows() != n) throw Error("forward_solve_matrix: dimension mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k)
            kernels::axpy(-l_(i, k), b.row(k), b.row(i), b.cols());
        const double inv = 1.0 / l_(i, i);
        double* ri = b.row(i);
        for (std::size_t j = 0; j < b.cols(); ++j) ri[j] *= inv;
    }
}

LeastSquaresFit qr_least_squares(const Matrix& x, std::span<const double> y) {
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    if (y.size() != n) throw Error("qr_least_squares: length of y != rows of X");
    if (n < p) throw Error(cat("qr_least_squares: fewer rows (", n,
                               ") than columns (", p, ")"));

    // Householder QR, factoring X in place; reflections applied to y as well.
    Matrix qr = x;
    std::vector<double> rhs(y.begin(), y.end());
    std::vector<double> rdiag(p);
    for (std::size_t k = 0; k < p; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < n; ++i) norm = std::hypot(norm, qr(i, k));
        if (norm == 0.0) {
            rdiag[k] = 0.0;
            continue;
        }
        if (qr(k, k) < 0.0) norm = -norm;
        for (std::size_t i = k; i < n; ++i) qr(i, k) /= norm;
        qr(k, k) += 1.0;
        for (std::size_t j = k + 1; j < p; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < n; ++i) s += qr(i, k) * qr(i, j);
            s = -s / qr(k, k);
            for (std::size_t i = k; i < n; ++i) qr(i, j) += s * qr(i, k);
        }
        double s = 0.0;
        for (std::size_t i = k; i < n; ++i) s += qr(i, k) * rhs[i];
        s = -s / qr(k, k);
        for (std::size_t i = k; i < n; ++i) rhs[i] += s * qr(i, k);
        rdiag[k] = -norm;
    }

    double max_diag = 0.0;
    for (std::size_t k = 0; k < p; ++k) max_diag = std::max(max_diag, std::fabs(rdiag[k]));
    const double tol = max_diag * 1e-10;
    std::vector<std::size_t> deficient;
    for (std::size_t k = 0; k < p; ++k)
        if (std::fabs(rdiag[k]) <= tol) deficient.push_back(k);
    if (!deficient.empty()) {
        std::string msg = "qr_least_squares: rank-deficient design matrix, columns {";
        for (std::size_t i = 0; i < deficient.size(); ++i)
            msg += (i ? ", " : "") + std::to_string(deficient[i]);
        msg += "}";
        throw RankDeficiencyError(std::move(msg), std::move(deficient));
    }

    LeastSquaresFit fit;
    fit.beta.assign(p, 0.0);
    for (std::size_t kk = p; kk-- > 0;) {
        double s = rhs[kk];
        for (std::size_t j = kk + 1; j < p; ++j) s -= qr(kk, j) * fit.beta[j];
        fit.beta[kk] = s / rdiag[kk];
    }

    double min_diag = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < p; ++k) min_diag = std::min(min_diag, std::fabs(rdiag[k]));
    fit.condition = max_diag / min_diag;

    // Residual sum of squares equals the squared tail of the rotated rhs.
    double sse = 0.0;
    for (std::size_t i = p; i < n; ++i) sse += rhs[i] * rhs[i];
    fit.residual_std = n > p ? std::sqrt(sse / static_cast<double>(n - p)) : 0.0;
    return fit;
}

}  // namespace thief
