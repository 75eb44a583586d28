#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hqm {

template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows_(r), cols_(c), v_(r * c, T(0)) {}
    Matrix(std::size_t r, std::size_t c, const T& fill) : rows_(r), cols_(c), v_(r * c, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    T& operator()(std::size_t i, std::size_t j) { return v_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return v_[i * cols_ + j]; }
    const std::vector<T>& data() const { return v_; }

    std::vector<T> col(std::size_t j) const {
        std::vector<T> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }
    void set_col(std::size_t j, const std::vector<T>& c) {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    bool is_zero() const {
        for (const auto& x : v_)
            if (!hqm_is_zero(x)) return false;
        return true;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw std::invalid_argument("matrix shape mismatch");
        Matrix r(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T& x = a(i, k);
                if (hqm_is_zero(x)) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    const T& y = b(k, j);
                    if (!hqm_is_zero(y)) r(i, j) += x * y;
                }
            }
        return r;
    }
    friend Matrix operator+(Matrix a, const Matrix& b) {
        for (std::size_t i = 0; i < a.v_.size(); ++i) a.v_[i] += b.v_[i];
        return a;
    }
    friend Matrix operator-(Matrix a, const Matrix& b) {
        for (std::size_t i = 0; i < a.v_.size(); ++i) a.v_[i] -= b.v_[i];
        return a;
    }
    Matrix scaled(const T& s) const {
        Matrix r = *this;
        for (auto& x : r.v_) x *= s;
        return r;
    }
    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.v_ == b.v_;
    }
    friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

    std::vector<T> apply(const std::vector<T>& x) const {
        std::vector<T> y(rows_, T(0));
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if (!hqm_is_zero(x[j]) && !hqm_is_zero((*this)(i, j))) y[i] += (*this)(i, j) * x[j];
        return y;
    }

private:
    template <class U>
    static bool hqm_is_zero(const U& x) {
        if constexpr (requires { x.is_zero(); }) return x.is_zero();
        else return sgn(x) == 0;
    }

    std::size_t rows_ = 0, cols_ = 0;
    std::vector<T> v_;
};

namespace linalg {

template <class T>
bool zero(const T& x) {
    if constexpr (requires { x.is_zero(); }) return x.is_zero();
    else return sgn(x) == 0;
}

// In-place reduced row echelon form; returns pivot columns.
template <class T>
std::vector<std::size_t> rref(Matrix<T>& m) {
    std::vector<std::size_t> piv;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t p = r;
        while (p < m.rows() && zero(m(p, c))) ++p;
        if (p == m.rows()) continue;
        if (p != r)
            for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
        T inv = T(1) / m(r, c);
        for (std::size_t j = c; j < m.cols(); ++j)
            if (!zero(m(r, j))) m(r, j) *= inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == r || zero(m(i, c))) continue;
            T f = m(i, c);
            for (std::size_t j = c; j < m.cols(); ++j)
                if (!zero(m(r, j))) m(i, j) -= f * m(r, j);
        }
        piv.push_back(c);
        ++r;
    }
    return piv;
}

template <class T>
std::size_t rank(Matrix<T> m) {
    return rref(m).size();
}

// Basis of the right kernel {x : m x = 0}, as columns of the result.
template <class T>
Matrix<T> kernel(Matrix<T> m) {
    auto piv = rref(m);
    std::vector<bool> is_piv(m.cols(), false);
    for (auto c : piv) is_piv[c] = true;
    std::vector<std::size_t> free;
    for (std::size_t c = 0; c < m.cols(); ++c)
        if (!is_piv[c]) free.push_back(c);
    Matrix<T> k(m.cols(), free.size());
    for (std::size_t f = 0; f < free.size(); ++f) {
        k(free[f], f) = T(1);
        for (std::size_t r = 0; r < piv.size(); ++r) k(piv[r], f) = -m(r, free[f]);
    }
    return k;
}

template <class T>
std::optional<Matrix<T>> try_inverse(const Matrix<T>& a) {
    std::size_t n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("inverse of non-square matrix");
    Matrix<T> aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
        aug(i, n + i) = T(1);
    }
    auto piv = rref(aug);
    if (piv.size() < n || piv[n - 1] != n - 1) return std::nullopt;
    Matrix<T> inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
    return inv;
}

template <class T>
Matrix<T> inverse(const Matrix<T>& a) {
    auto r = try_inverse(a);
    if (!r) throw std::domain_error("singular matrix");
    return *r;
}

// Solve a x = b for x (b with possibly several columns); nullopt if inconsistent.
// Free variables are set to zero.
template <class T>
std::optional<Matrix<T>> solve(const Matrix<T>& a, const Matrix<T>& b) {
    std::size_t n = a.cols();
    Matrix<T> aug(a.rows(), n + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
        for (std::size_t j = 0; j < b.cols(); ++j) aug(i, n + j) = b(i, j);
    }
    auto piv = rref(aug);
    for (auto c : piv)
        if (c >= n) return std::nullopt;
    Matrix<T> x(n, b.cols());
    for (std::size_t r = 0; r < piv.size(); ++r)
        for (std::size_t j = 0; j < b.cols(); ++j) x(piv[r], j) = aug(r, n + j);
    return x;
}

template <class T>
T determinant(Matrix<T> m) {
    std::size_t n = m.rows();
    T det(1);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && zero(m(p, c))) ++p;
        if (p == n) return T(0);
        if (p != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
            det = -det;
        }
        det *= m(c, c);
        T inv = T(1) / m(c, c);
        for (std::size_t i = c + 1; i < n; ++i) {
            if (zero(m(i, c))) continue;
            T f = m(i, c) * inv;
            for (std::size_t j = c; j < n; ++j) m(i, j) -= f * m(c, j);
        }
    }
    return det;
}

// Greedy selection: indices of columns that increase the rank, in order.
template <class T>
std::vector<std::size_t> independent_columns(const Matrix<T>& m) {
    Matrix<T> c = m;
    auto piv = rref(c);
    return piv;
}

}  // namespace linalg

}  // namespace hqm
