#pragma once

#include <stdexcept>
#include <string>

#include "adelica/rational.hpp"

namespace adelica {

// Raised when a comparison or valuation cannot be decided at the stored
// precision (digit cancellation consumed the window).
struct InsufficientPrecision : std::runtime_error {
    explicit InsufficientPrecision(const std::string& what) : std::runtime_error(what) {}
};

// Truncated p-adic number: p^v * m known mod p^(v+k), with m in [0, p^k) and
// p not dividing m unless the element is exactly zero. k == 0 means "zero at
// the available precision" -- any use that needs a valuation raises.
class PAdic {
public:
    PAdic() = default;

    static PAdic exact_zero(const ZZ& p, long precision);
    static PAdic from_rational(const QQ& q, const ZZ& p, long precision);
    // value p^v * mantissa, mantissa taken mod p^k; normalizes.
    static PAdic make(const ZZ& p, long v, const ZZ& mantissa, long k);

    const ZZ& prime() const { return p_; }
    bool is_exact_zero() const { return exact_zero_; }
    // Number of known significant base-p digits.
    long precision() const { return k_; }

    long valuation() const;
    // Sum of the negative-power digits, as an exact rational.
    QQ principal_part() const;
    // v_p(x) >= 0, decided at the stored precision.
    bool is_integral() const;

    PAdic operator+(const PAdic& o) const;
    PAdic operator-() const;
    PAdic operator-(const PAdic& o) const { return *this + (-o); }
    PAdic operator*(const PAdic& o) const;

    PAdic add_rational(const QQ& q) const;

    // Known-digit agreement with an exact rational.
    bool matches_rational(const QQ& q) const;

    std::string str() const;

private:
    ZZ p_ = 2;
    bool exact_zero_ = true;
    long v_ = 0;
    long k_ = 0;
    ZZ m_ = 0;  // unit mantissa in [0, p^k), p does not divide m when k > 0
};

}  // namespace adelica
