#include "charp/linalg.hpp"

namespace charp {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix multiply(const Field& f, const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw PreconditionError("matrix dimensions do not match");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t l = 0; l < a.cols(); ++l) {
            const Code x = a(i, l);
            if (x == 0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j)
                if (b(l, j)) c(i, j) = f.add(c(i, j), f.mul(x, b(l, j)));
        }
    return c;
}

Echelon row_reduce(const Field& f, Matrix m) {
    Echelon out;
    const std::size_t R = m.rows(), C = m.cols();
    std::size_t r = 0;
    for (std::size_t c = 0; c < C && r < R; ++c) {
        std::size_t piv = r;
        while (piv < R && m(piv, c) == 0) ++piv;
        if (piv == R) continue;
        if (piv != r)
            for (std::size_t j = 0; j < C; ++j) std::swap(m(piv, j), m(r, j));
        const Code inv = f.inv(m(r, c));
        Code* pr = m.row(r);
        for (std::size_t j = c; j < C; ++j)
            if (pr[j]) pr[j] = f.mul(pr[j], inv);
        for (std::size_t i = 0; i < R; ++i) {
            if (i == r) continue;
            Code* pi = m.row(i);
            const Code factor = pi[c];
            if (factor == 0) continue;
            for (std::size_t j = c; j < C; ++j)
                if (pr[j]) pi[j] = f.sub(pi[j], f.mul(factor, pr[j]));
        }
        out.pivots.push_back(c);
        ++r;
    }
    out.reduced = std::move(m);
    return out;
}

std::size_t rank(const Field& f, const Matrix& m) { return row_reduce(f, m).rank(); }

std::optional<Matrix> inverse(const Field& f, const Matrix& m) {
    if (m.rows() != m.cols()) throw PreconditionError("inverse of a non-square matrix");
    const std::size_t n = m.rows();
    Matrix aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
        aug(i, n + i) = 1;
    }
    Echelon e = row_reduce(f, std::move(aug));
    if (e.rank() < n || e.pivots[n - 1] != n - 1) return std::nullopt;
    Matrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv(i, j) = e.reduced(i, n + j);
    return inv;
}

Matrix kernel(const Field& f, const Matrix& m) {
    const Echelon e = row_reduce(f, m);
    const std::size_t C = m.cols();
    std::vector<bool> is_pivot(C, false);
    for (auto c : e.pivots) is_pivot[c] = true;
    Matrix k(C - e.rank(), C);
    std::size_t row = 0;
    for (std::size_t free = 0; free < C; ++free) {
        if (is_pivot[free]) continue;
        k(row, free) = 1;
        for (std::size_t i = 0; i < e.rank(); ++i) k(row, e.pivots[i]) = f.neg(e.reduced(i, free));
        ++row;
    }
    return k;
}

Matrix left_kernel(const Field& f, const Matrix& m) { return kernel(f, m.transpose()); }

}  // namespace charp
