#include "adelica/matrix.hpp"

#include <algorithm>
#include <cstdlib>

namespace adelica {

namespace {

// Position of the nonzero entry of least absolute value in m at or after (t, t).
bool find_pivot(const ZMat& m, std::size_t t, std::size_t& pi, std::size_t& pj) {
    bool found = false;
    ZZ best;
    for (std::size_t i = t; i < m.rows(); ++i)
        for (std::size_t j = t; j < m.cols(); ++j) {
            if (m(i, j) == 0) continue;
            ZZ a = abs(m(i, j));
            if (!found || a < best) {
                best = a;
                pi = i;
                pj = j;
                found = true;
            }
        }
    return found;
}

}  // namespace

SmithForm smith_normal_form(const ZMat& m) {
    SmithForm f;
    f.d = m;
    f.u = ZMat::identity(m.rows());
    f.v = ZMat::identity(m.cols());
    ZMat& d = f.d;
    std::size_t n = std::min(m.rows(), m.cols());

    for (std::size_t t = 0; t < n; ++t) {
        std::size_t pi = t, pj = t;
        if (!find_pivot(d, t, pi, pj)) break;
        d.swap_rows(t, pi);
        f.u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        f.v.swap_cols(t, pj);

        bool clean = false;
        while (!clean) {
            clean = true;
            // Clear the pivot column.
            for (std::size_t i = t + 1; i < d.rows(); ++i) {
                if (d(i, t) == 0) continue;
                ZZ q = d(i, t) / d(t, t);  // GMP: truncated division
                if (q != 0) {
                    for (std::size_t k = 0; k < d.cols(); ++k) d(i, k) -= q * d(t, k);
                    for (std::size_t k = 0; k < f.u.cols(); ++k) f.u(i, k) -= q * f.u(t, k);
                }
                if (d(i, t) != 0) {
                    // Remainder became the smaller pivot: swap up and restart.
                    d.swap_rows(t, i);
                    f.u.swap_rows(t, i);
                    clean = false;
                }
            }
            // Clear the pivot row.
            for (std::size_t j = t + 1; j < d.cols(); ++j) {
                if (d(t, j) == 0) continue;
                ZZ q = d(t, j) / d(t, t);
                if (q != 0) {
                    for (std::size_t k = 0; k < d.rows(); ++k) d(k, j) -= q * d(k, t);
                    for (std::size_t k = 0; k < f.v.rows(); ++k) f.v(k, j) -= q * f.v(k, t);
                }
                if (d(t, j) != 0) {
                    d.swap_cols(t, j);
                    f.v.swap_cols(t, j);
                    clean = false;
                }
            }
        }

        // Fold in any entry the pivot does not divide, to get the divisibility chain.
        bool redo = false;
        for (std::size_t i = t + 1; i < d.rows() && !redo; ++i)
            for (std::size_t j = t + 1; j < d.cols() && !redo; ++j) {
                if (d(i, j) % d(t, t) != 0) {
                    for (std::size_t k = 0; k < d.rows(); ++k) d(k, t) += d(k, j);
                    for (std::size_t k = 0; k < f.v.rows(); ++k) f.v(k, t) += f.v(k, j);
                    redo = true;
                }
            }
        if (redo) {
            --t;
            continue;
        }

        if (d(t, t) < 0) {
            for (std::size_t k = 0; k < d.cols(); ++k) d(t, k) = -d(t, k);
            for (std::size_t k = 0; k < f.u.cols(); ++k) f.u(t, k) = -f.u(t, k);
        }
    }

    for (std::size_t i = 0; i < n; ++i)
        if (f.d(i, i) != 0) ++f.rank;
    return f;
}

ZZ zdet(const ZMat& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("zdet: not square");
    std::size_t n = m.rows();
    if (n == 0) return 1;
    ZMat a = m;
    ZZ prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            std::size_t s = k + 1;
            while (s < n && a(s, k) == 0) ++s;
            if (s == n) return 0;
            a.swap_rows(k, s);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                ZZ num = a(k, k) * a(i, j) - a(i, k) * a(k, j);
                a(i, j) = num / prev;  // exact by Bareiss
            }
        prev = a(k, k);
    }
    return sign > 0 ? a(n - 1, n - 1) : -a(n - 1, n - 1);
}

std::size_t qrank(const QMat& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    auto [den, a] = clear_denominators(m);
    (void)den;
    // Fraction-free Bareiss elimination with row and column pivoting.
    std::size_t rows = a.rows(), cols = a.cols();
    std::size_t r = 0;
    ZZ prev = 1;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t s = r;
        while (s < rows && a(s, c) == 0) ++s;
        if (s == rows) continue;
        if (s != r) a.swap_rows(r, s);
        for (std::size_t i = r + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j) {
                ZZ num = a(r, c) * a(i, j) - a(i, c) * a(r, j);
                a(i, j) = num / prev;
            }
            a(i, c) = 0;
        }
        prev = a(r, c);
        ++r;
    }
    return r;
}

ZMat zkernel(const ZMat& m) {
    SmithForm f = smith_normal_form(m);
    std::size_t k = m.cols() - f.rank;
    ZMat ker(m.cols(), k);
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < m.cols(); ++i) ker(i, j) = f.v(i, f.rank + j);
    return ker;
}

QMat qkernel(const QMat& m) {
    auto [den, a] = clear_denominators(m);
    (void)den;
    ZMat ker = zkernel(a);
    make_columns_primitive(ker);
    return to_rational(ker);
}

std::optional<std::vector<QQ>> qsolve(const QMat& m, const std::vector<QQ>& b) {
    // Gauss-Jordan on the augmented matrix; plain rational arithmetic.
    std::size_t rows = m.rows(), cols = m.cols();
    QMat a(rows, cols + 1);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) a(i, j) = m(i, j);
        a(i, cols) = b[i];
    }
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t s = r;
        while (s < rows && a(s, c) == 0) ++s;
        if (s == rows) continue;
        a.swap_rows(r, s);
        QQ inv = 1 / a(r, c);
        for (std::size_t j = c; j <= cols; ++j) a(r, j) *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a(i, c) == 0) continue;
            QQ f = a(i, c);
            for (std::size_t j = c; j <= cols; ++j) a(i, j) -= f * a(r, j);
        }
        pivot_col.push_back(c);
        ++r;
    }
    for (std::size_t i = r; i < rows; ++i)
        if (a(i, cols) != 0) return std::nullopt;
    std::vector<QQ> x(cols);
    for (std::size_t i = 0; i < pivot_col.size(); ++i) x[pivot_col[i]] = a(i, cols);
    return x;
}

std::optional<std::vector<ZZ>> zsolve(const ZMat& m, const std::vector<ZZ>& b) {
    SmithForm f = smith_normal_form(m);
    std::vector<ZZ> ub(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.rows(); ++j) ub[i] += f.u(i, j) * b[j];
    std::vector<ZZ> y(m.cols());
    std::size_t n = std::min(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        ZZ di = (i < n) ? f.d(i, i) : ZZ(0);
        if (di == 0) {
            if (ub[i] != 0) return std::nullopt;
        } else {
            if (ub[i] % di != 0) return std::nullopt;
            y[i] = ub[i] / di;
        }
    }
    std::vector<ZZ> x(m.cols());
    for (std::size_t i = 0; i < m.cols(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) x[i] += f.v(i, j) * y[j];
    return x;
}

void make_columns_primitive(ZMat& m) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
        ZZ g = 0;
        for (std::size_t i = 0; i < m.rows(); ++i) g = zz_gcd(g, m(i, j));
        if (g <= 1) g = 1;
        std::size_t lead = m.rows();
        for (std::size_t i = 0; i < m.rows(); ++i)
            if (m(i, j) != 0) {
                lead = i;
                break;
            }
        if (lead < m.rows() && m(lead, j) < 0) g = -g;
        if (g != 1)
            for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) /= g;
    }
}

}  // namespace adelica
