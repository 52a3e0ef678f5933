#include "doctest.h"

#include <cstdlib>

#include "adelica/matrix.hpp"

using namespace adelica;

namespace {

ZMat make(std::size_t r, std::size_t c, std::initializer_list<long> vals) {
    ZMat m(r, c);
    auto it = vals.begin();
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = ZZ(*it++);
    return m;
}

// independent oracle: plain rational Gauss elimination rank
std::size_t gauss_rank(QMat a) {
    std::size_t r = 0;
    for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
        std::size_t s = r;
        while (s < a.rows() && a(s, c) == 0) ++s;
        if (s == a.rows()) continue;
        a.swap_rows(r, s);
        for (std::size_t i = r + 1; i < a.rows(); ++i) {
            if (a(i, c) == 0) continue;
            QQ f = a(i, c) / a(r, c);
            for (std::size_t j = c; j < a.cols(); ++j) a(i, j) -= f * a(r, j);
        }
        ++r;
    }
    return r;
}

ZMat random_zmat(std::size_t r, std::size_t c, unsigned seed) {
    std::srand(seed);
    ZMat m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = (std::rand() % 21) - 10;
    return m;
}

}  // namespace

TEST_CASE("smith normal form of [[2,4],[6,8]]") {
    // oracle: d1 = gcd of entries = 2; d1*d2 = gcd of 2x2 minors = |2*8-4*6| = 8,
    // so the diagonal is (2, 4).
    ZMat m = make(2, 2, {2, 4, 6, 8});
    SmithForm f = smith_normal_form(m);
    CHECK(f.d(0, 0) == 2);
    CHECK(f.d(1, 1) == 4);
    CHECK(f.rank == 2);
    CHECK(f.u * m * f.v == f.d);
    CHECK(abs(zdet(f.u)) == 1);
    CHECK(abs(zdet(f.v)) == 1);
}

TEST_CASE("smith normal form fixes the identity and the zero matrix") {
    ZMat id = ZMat::identity(3);
    SmithForm f = smith_normal_form(id);
    CHECK(f.d == id);
    ZMat z(2, 3);
    SmithForm g = smith_normal_form(z);
    CHECK(g.d.is_zero());
    CHECK(g.rank == 0);
}

TEST_CASE("smith normal form invariants on seeded random matrices") {
    for (unsigned seed = 1; seed <= 40; ++seed) {
        std::size_t r = 1 + seed % 5, c = 1 + (seed * 7) % 5;
        ZMat m = random_zmat(r, c, seed);
        SmithForm f = smith_normal_form(m);
        CHECK(f.u * m * f.v == f.d);
        CHECK(abs(zdet(f.u)) == 1);
        CHECK(abs(zdet(f.v)) == 1);
        for (std::size_t i = 0; i + 1 < std::min(r, c); ++i) {
            CHECK(f.d(i, i) >= 0);
            if (f.d(i + 1, i + 1) != 0) CHECK(f.d(i + 1, i + 1) % (f.d(i, i) == 0 ? 1 : f.d(i, i).get_si()) == 0);
        }
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j)
                if (i != j) CHECK(f.d(i, j) == 0);
    }
}

TEST_CASE("bareiss rank agrees with plain gauss elimination") {
    for (unsigned seed = 1; seed <= 30; ++seed) {
        std::size_t r = 1 + seed % 6, c = 1 + (seed * 3) % 6;
        QMat m = to_rational(random_zmat(r, c, 100 + seed));
        CHECK(qrank(m) == gauss_rank(m));
    }
}

TEST_CASE("integer kernel and solve") {
    ZMat m = make(2, 3, {1, 2, 3, 2, 4, 6});
    ZMat k = zkernel(m);
    CHECK(k.cols() == 2);
    CHECK((m * k).is_zero());

    std::vector<ZZ> b = {ZZ(6), ZZ(12)};
    auto x = zsolve(m, b);
    REQUIRE(x.has_value());
    ZZ r0 = (*x)[0] + 2 * (*x)[1] + 3 * (*x)[2];
    CHECK(r0 == 6);

    std::vector<ZZ> bad = {ZZ(1), ZZ(1)};
    CHECK(!zsolve(m, bad).has_value());
}

TEST_CASE("rational solve") {
    QMat m = to_rational(make(2, 2, {2, 0, 0, 3}));
    std::vector<QQ> b = {QQ(1), QQ(1)};
    auto x = qsolve(m, b);
    REQUIRE(x.has_value());
    CHECK((*x)[0] == QQ(1, 2));
    CHECK((*x)[1] == QQ(1, 3));
}

TEST_CASE("valuations") {
    CHECK(zz_valuation(ZZ(24), ZZ(2)) == 3);
    CHECK(qq_valuation(QQ(7, 4), ZZ(2)) == -2);
    CHECK(qq_p_integral(QQ(3, 5), ZZ(2)));
    CHECK(!qq_p_integral(QQ(3, 10), ZZ(2)));
}
