#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mismatchlab {

/// Dense row-major matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::vector<double> column(std::size_t j) const;
    Matrix transposed() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Symmetric matrix stored as its lower triangle; (i, j) and (j, i) address
/// the same element, so the matrix equals its transpose exactly.
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(std::size_t n) : n_(n), packed_(n * (n + 1) / 2, 0.0) {}

    std::size_t size() const { return n_; }

    double operator()(std::size_t i, std::size_t j) const { return packed_[index(i, j)]; }
    double& operator()(std::size_t i, std::size_t j) { return packed_[index(i, j)]; }

    /// y = M x
    std::vector<double> multiply(std::span<const double> x) const;
    /// x^T M x
    double quadratic_form(std::span<const double> x) const;
    double frobenius_norm() const;
    Matrix to_dense() const;

private:
    static std::size_t index(std::size_t i, std::size_t j) {
        return i >= j ? i * (i + 1) / 2 + j : j * (j + 1) / 2 + i;
    }

    std::size_t n_ = 0;
    std::vector<double> packed_;
};

/// Eigenvalues in descending order; column k of `vectors` belongs to values[k].
/// `vectors` is empty when only eigenvalues were requested.
struct EigenDecomposition {
    std::vector<double> values;
    Matrix vectors;
};

/// Full eigendecomposition by Householder tridiagonalisation and implicit-shift
/// QL. Throws EigensolverFailure if an eigenvalue needs more than 30 n sweeps,
/// InvalidParameter on non-finite input.
EigenDecomposition symmetric_eig(const SymmetricMatrix& m);

/// Eigenvalues only (descending); skips the O(n^3) vector accumulation.
std::vector<double> symmetric_eigvals(const SymmetricMatrix& m);

}  // namespace mismatchlab
