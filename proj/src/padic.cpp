#include "adelica/padic.hpp"

#include <algorithm>

namespace adelica {

namespace {

ZZ ppow(const ZZ& p, long e) {
    if (e < 0) throw std::logic_error("ppow: negative exponent");
    return zz_pow(p, static_cast<unsigned long>(e));
}

}  // namespace

PAdic PAdic::exact_zero(const ZZ& p, long precision) {
    PAdic x;
    x.p_ = p;
    x.exact_zero_ = true;
    x.k_ = precision;
    return x;
}

PAdic PAdic::make(const ZZ& p, long v, const ZZ& mantissa, long k) {
    PAdic x;
    x.p_ = p;
    if (k < 0) k = 0;
    ZZ m = mantissa;
    if (k > 0) {
        ZZ mod = ppow(p, k);
        m %= mod;
        if (m < 0) m += mod;
    }
    // normalize: strip p from the mantissa, shrinking the known window
    while (k > 0 && m != 0 && m % p == 0) {
        m /= p;
        ++v;
        --k;
    }
    if (k <= 0 || m == 0) {
        // all known digits are zero: zero at the available precision, not exactly zero
        x.exact_zero_ = false;
        x.k_ = 0;
        x.v_ = v + (m == 0 ? k : 0);
        x.m_ = 0;
        return x;
    }
    x.exact_zero_ = false;
    x.v_ = v;
    x.k_ = k;
    x.m_ = m;
    return x;
}

PAdic PAdic::from_rational(const QQ& q, const ZZ& p, long precision) {
    if (q == 0) return exact_zero(p, precision);
    long v = qq_valuation(q, p);
    QQ unit = (v >= 0) ? QQ(q / QQ(ppow(p, v))) : QQ(q * QQ(ppow(p, -v)));
    ZZ num = unit.get_num(), den = unit.get_den();
    ZZ mod = ppow(p, precision);
    ZZ deninv;
    if (mpz_invert(deninv.get_mpz_t(), den.get_mpz_t(), mod.get_mpz_t()) == 0)
        throw std::logic_error("padic: denominator not invertible");
    ZZ m = (num % mod) * deninv % mod;
    if (m < 0) m += mod;
    return make(p, v, m, precision);
}

long PAdic::valuation() const {
    if (exact_zero_) throw std::invalid_argument("valuation of exact zero");
    if (k_ <= 0)
        throw InsufficientPrecision("valuation undetermined: all known digits are zero");
    return v_;
}

QQ PAdic::principal_part() const {
    if (exact_zero_) return QQ(0);
    if (k_ <= 0) {
        if (v_ >= 0) return QQ(0);  // zero to below the integral line
        throw InsufficientPrecision("principal part undetermined");
    }
    if (v_ >= 0) return QQ(0);
    long neg = -v_;
    if (k_ < neg)
        throw InsufficientPrecision("principal part needs more digits than stored");
    ZZ digits = m_ % ppow(p_, neg);
    return QQ(digits) / QQ(ppow(p_, neg));
}

bool PAdic::is_integral() const {
    if (exact_zero_) return true;
    if (k_ <= 0) {
        if (v_ >= 0) return true;
        throw InsufficientPrecision("integrality undetermined at stored precision");
    }
    return v_ >= 0;
}

PAdic PAdic::operator+(const PAdic& o) const {
    if (p_ != o.p_) throw std::invalid_argument("padic: prime mismatch");
    if (exact_zero_) return o;
    if (o.exact_zero_) return *this;
    long va = v_, vb = o.v_;
    long ha = va + k_, hb = vb + o.k_;  // digits known up to these heights
    long v = std::min(va, vb);
    long h = std::min(ha, hb);
    long k = h - v;
    if (k <= 0) {
        PAdic x;
        x.p_ = p_;
        x.exact_zero_ = false;
        x.k_ = 0;
        x.v_ = h;
        return x;
    }
    ZZ mod = ppow(p_, k);
    ZZ ma = (k_ > 0 ? m_ : ZZ(0)) * ppow(p_, va - v);
    ZZ mb = (o.k_ > 0 ? o.m_ : ZZ(0)) * ppow(p_, vb - v);
    return make(p_, v, (ma + mb) % mod, k);
}

PAdic PAdic::operator-() const {
    if (exact_zero_ || k_ <= 0) return *this;
    PAdic x = *this;
    ZZ mod = ppow(p_, k_);
    x.m_ = (mod - m_) % mod;
    return x;
}

PAdic PAdic::operator*(const PAdic& o) const {
    if (p_ != o.p_) throw std::invalid_argument("padic: prime mismatch");
    if (exact_zero_ || o.exact_zero_) return exact_zero(p_, std::min(k_, o.k_));
    if (k_ <= 0 || o.k_ <= 0) {
        PAdic x;
        x.p_ = p_;
        x.exact_zero_ = false;
        x.k_ = 0;
        x.v_ = v_ + o.v_;
        return x;
    }
    long k = std::min(k_, o.k_);
    ZZ mod = ppow(p_, k);
    return make(p_, v_ + o.v_, (m_ * o.m_) % mod, k);
}

PAdic PAdic::add_rational(const QQ& q) const {
    long prec = std::max(k_ + std::abs(v_) + 4, 8L);
    return *this + from_rational(q, p_, prec);
}

bool PAdic::matches_rational(const QQ& q) const {
    PAdic d = *this + from_rational(-q, p_, std::max(k_ + std::abs(v_) + 4, 8L));
    if (d.exact_zero_) return true;
    return d.k_ <= 0;  // zero across every known digit
}

std::string PAdic::str() const {
    if (exact_zero_) return "0 (exact)";
    if (k_ <= 0) return "O(" + p_.get_str() + "^" + std::to_string(v_) + ")";
    return m_.get_str() + "*" + p_.get_str() + "^" + std::to_string(v_) + " + O(" + p_.get_str() +
           "^" + std::to_string(v_ + k_) + ")";
}

}  // namespace adelica
