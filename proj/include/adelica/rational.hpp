#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace adelica {

using ZZ = mpz_class;
using QQ = mpq_class;

inline ZZ zz_gcd(const ZZ& a, const ZZ& b) {
    ZZ g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

inline ZZ zz_lcm(const ZZ& a, const ZZ& b) {
    ZZ l;
    mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return l;
}

inline ZZ zz_pow(const ZZ& base, unsigned long e) {
    ZZ r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

// Exact p-adic valuation of a nonzero integer.
inline long zz_valuation(ZZ n, const ZZ& p) {
    if (n == 0) throw std::invalid_argument("valuation of zero");
    long v = 0;
    while (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) {
        n /= p;
        ++v;
    }
    return v;
}

// v_p(q) for nonzero rational q.
inline long qq_valuation(const QQ& q, const ZZ& p) {
    if (q == 0) throw std::invalid_argument("valuation of zero");
    return zz_valuation(q.get_num(), p) - zz_valuation(q.get_den(), p);
}

inline bool qq_p_integral(const QQ& q, const ZZ& p) {
    if (q == 0) return true;
    return zz_valuation(q.get_den(), p) == 0;
}

// Parses "a" or "a/b" into an exact rational.
inline std::optional<QQ> parse_rational(const std::string& s) {
    try {
        QQ q(s);
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

inline std::string rational_str(const QQ& q) { return q.get_str(); }

}  // namespace adelica
