#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "thief/common.hpp"

namespace thief {

// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// y = A x
std::vector<double> matvec(const Matrix& a, std::span<const double> x);

// C = Aᵀ A (full symmetric matrix).
Matrix crossprod(const Matrix& a);

// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
// factor() throws NumericError when a pivot is not strictly positive.
class Cholesky {
public:
    static Cholesky factor(const Matrix& a);

    const Matrix& lower() const { return l_; }
    double min_pivot() const { return min_pivot_; }
    double max_pivot() const { return max_pivot_; }

    // Squared pivot ratio; cheap stand-in for the 2-norm condition number.
    double condition_estimate() const;

    // Solves L y = b in place.
    void forward_solve(std::span<double> b) const;
    // Solves Lᵀ x = b in place.
    void backward_solve(std::span<double> b) const;
    // Solves (L Lᵀ) x = b in place.
    void solve(std::span<double> b) const;
    // Solves L Y = B in place, column blocks of a row-major matrix.
    void forward_solve_matrix(Matrix& b) const;

private:
    explicit Cholesky(Matrix l) : l_(std::move(l)) {}
    Matrix l_;
    double min_pivot_ = 0.0;
    double max_pivot_ = 0.0;
};

// Least-squares fit by Householder QR. Thrown RankDeficiencyError carries
// the offending column indices.
struct RankDeficiencyError : NumericError {
    RankDeficiencyError(std::string msg, std::vector<std::size_t> cols)
        : NumericError(std::move(msg)), columns(std::move(cols)) {}
    std::vector<std::size_t> columns;
};

struct LeastSquaresFit {
    std::vector<double> beta;
    double residual_std = 0.0;  // sqrt(SSE / (n - p))
    double condition = 0.0;     // max |R_kk| / min |R_kk|
};

LeastSquaresFit qr_least_squares(const Matrix& x, std::span<const double> y);

}  // namespace thief
