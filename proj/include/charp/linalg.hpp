#pragma once

// Dense matrices over a finite field, with Gauss-Jordan elimination.

#include <optional>
#include <vector>

#include "charp/ffield.hpp"

namespace charp {

class Matrix {
   public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, 0) {}
    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    Code& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    Code operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
    Code* row(std::size_t i) { return a_.data() + i * cols_; }
    const Code* row(std::size_t i) const { return a_.data() + i * cols_; }

    Matrix transpose() const;
    friend bool operator==(const Matrix&, const Matrix&) = default;

   private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Code> a_;
};

Matrix multiply(const Field& f, const Matrix& a, const Matrix& b);

struct Echelon {
    Matrix reduced;                   // reduced row echelon form
    std::vector<std::size_t> pivots;  // pivot column of each nonzero row
    std::size_t rank() const noexcept { return pivots.size(); }
};

/// Gauss-Jordan elimination; pivots are chosen in column order, the first nonzero row wins.
Echelon row_reduce(const Field& f, Matrix m);
std::size_t rank(const Field& f, const Matrix& m);
std::optional<Matrix> inverse(const Field& f, const Matrix& m);
/// Basis of {v : m v = 0}, one vector per row of the result (cols() == m.cols()).
Matrix kernel(const Field& f, const Matrix& m);
/// Basis of {u : u m = 0}, one vector per row (cols() == m.rows()).
Matrix left_kernel(const Field& f, const Matrix& m);

}  // namespace charp
