#pragma once

#include <cstddef>
#include <vector>

#include "adelica/rational.hpp"

namespace adelica {

// Dense exact matrices, row-major. Sizes here are desk scale; no attempt at
// sparse or asymptotically optimal algorithms.
template <typename T>
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    bool operator==(const Mat& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

    bool is_zero() const {
        for (const auto& x : a_)
            if (x != 0) return false;
        return true;
    }

    Mat operator*(const Mat& o) const {
        Mat r(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const T& aik = (*this)(i, k);
                if (aik == 0) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += aik * o(k, j);
            }
        return r;
    }

    Mat operator+(const Mat& o) const {
        Mat r(rows_, cols_);
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
        return r;
    }

    Mat operator-(const Mat& o) const {
        Mat r(rows_, cols_);
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
        return r;
    }

    Mat scaled(const T& c) const {
        Mat r(rows_, cols_);
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] * c;
        return r;
    }

    std::vector<T> apply(const std::vector<T>& v) const {
        std::vector<T> r(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if ((*this)(i, j) != 0) r[i] += (*this)(i, j) * v[j];
        return r;
    }

    void swap_rows(std::size_t i, std::size_t j) {
        for (std::size_t k = 0; k < cols_; ++k) std::swap((*this)(i, k), (*this)(j, k));
    }
    void swap_cols(std::size_t i, std::size_t j) {
        for (std::size_t k = 0; k < rows_; ++k) std::swap((*this)(k, i), (*this)(k, j));
    }

    Mat transposed() const {
        Mat r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<T> a_;
};

using ZMat = Mat<ZZ>;
using QMat = Mat<QQ>;

inline QMat to_rational(const ZMat& m) {
    QMat r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = QQ(m(i, j));
    return r;
}

// Clears denominators columnwise-globally: returns (N, A) with N > 0 and m = A / N.
inline std::pair<ZZ, ZMat> clear_denominators(const QMat& m) {
    ZZ n = 1;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) n = zz_lcm(n, m(i, j).get_den());
    ZMat a(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            QQ s = m(i, j) * QQ(n);
            a(i, j) = s.get_num();
        }
    return {n, a};
}

struct SmithForm {
    ZMat u;  // rows() x rows(), unimodular
    ZMat d;  // diagonal, nonnegative, successively dividing
    ZMat v;  // cols() x cols(), unimodular
    std::size_t rank = 0;

    std::vector<ZZ> diagonal() const {
        std::vector<ZZ> r;
        std::size_t n = std::min(d.rows(), d.cols());
        for (std::size_t i = 0; i < n; ++i) r.push_back(d(i, i));
        return r;
    }
};

// Smith normal form over Z with unimodular transforms: u * m * v = d.
SmithForm smith_normal_form(const ZMat& m);

// Determinant of a square integer matrix (Bareiss).
ZZ zdet(const ZMat& m);

// Rank of a rational matrix via fraction-free Bareiss elimination on the
// denominator-cleared integer matrix.
std::size_t qrank(const QMat& m);

// Basis of the integer kernel {x : m x = 0}, columns of the result.
ZMat zkernel(const ZMat& m);

// Basis of the rational kernel as columns, entries integer and columnwise primitive.
QMat qkernel(const QMat& m);

// One solution of m x = b over Q, if any.
std::optional<std::vector<QQ>> qsolve(const QMat& m, const std::vector<QQ>& b);

// One solution of m x = b over Z, if any.
std::optional<std::vector<ZZ>> zsolve(const ZMat& m, const std::vector<ZZ>& b);

// Divides out the gcd of each column, keeping the sign of the leading entry positive.
void make_columns_primitive(ZMat& m);

}  // namespace adelica
