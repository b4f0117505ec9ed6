#pragma once

#include <compare>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "padiccf/rational.hpp"

namespace padiccf {

// A p-adic valuation: an integer extended with +infinity for the valuation
// of zero. Infinity participates in comparisons and in addition (inf + n =
// inf), which lets the engine predicates treat vanished coefficients
// uniformly instead of special-casing zero everywhere.
class Valuation {
   public:
    constexpr Valuation() : v_(0), inf_(false) {}
    constexpr Valuation(long v) : v_(v), inf_(false) {}

    static constexpr Valuation infinity() {
        Valuation v;
        v.inf_ = true;
        return v;
    }

    constexpr bool is_infinite() const { return inf_; }

    constexpr long finite() const {
        if (inf_) throw std::logic_error("finite() on an infinite valuation");
        return v_;
    }

    friend constexpr bool operator==(Valuation a, Valuation b) {
        return a.inf_ == b.inf_ && (a.inf_ || a.v_ == b.v_);
    }

    friend constexpr std::strong_ordering operator<=>(Valuation a, Valuation b) {
        if (a.inf_ && b.inf_) return std::strong_ordering::equal;
        if (a.inf_) return std::strong_ordering::greater;
        if (b.inf_) return std::strong_ordering::less;
        return a.v_ <=> b.v_;
    }

    friend constexpr Valuation operator+(Valuation a, Valuation b) {
        if (a.inf_ || b.inf_) return infinity();
        return Valuation(a.v_ + b.v_);
    }

    friend constexpr Valuation operator+(Valuation a, long n) { return a + Valuation(n); }

    // a - n for a finite shift n; infinity absorbs the shift.
    friend constexpr Valuation operator-(Valuation a, long n) {
        if (a.inf_) return infinity();
        return Valuation(a.v_ - n);
    }

    friend std::ostream& operator<<(std::ostream& os, Valuation v) {
        if (v.inf_) return os << "+inf";
        return os << v.v_;
    }

   private:
    long v_;
    bool inf_;
};

// vp of a nonzero integer with respect to the prime p: the exponent of p in n.
inline long integer_valuation(const Integer& n, const Integer& p) {
    if (n == 0) throw std::logic_error("integer_valuation of zero");
    Integer reduced;
    return static_cast<long>(mpz_remove(reduced.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t()));
}

// vp of a rational; vp(0) = +infinity.
inline Valuation valuation(const Rational& q, const Integer& p) {
    if (q == 0) return Valuation::infinity();
    return Valuation(integer_valuation(q.get_num(), p) - integer_valuation(q.get_den(), p));
}

// Splits q as p^v * u with u a p-adic unit (numerator and denominator of u
// both coprime to p). Requires q != 0.
struct UnitDecomposition {
    long v;
    Integer unit_num;  // coprime to p
    Integer unit_den;  // coprime to p, positive
};

inline UnitDecomposition unit_decomposition(const Rational& q, const Integer& p) {
    if (q == 0) throw std::logic_error("unit_decomposition of zero");
    UnitDecomposition d;
    long vn = static_cast<long>(
        mpz_remove(d.unit_num.get_mpz_t(), q.get_num().get_mpz_t(), p.get_mpz_t()));
    long vd = static_cast<long>(
        mpz_remove(d.unit_den.get_mpz_t(), q.get_den().get_mpz_t(), p.get_mpz_t()));
    d.v = vn - vd;
    return d;
}

// p^e as a rational for any integer exponent e.
inline Rational pow_p(const Integer& p, long e) {
    Integer num = 1, den = 1;
    if (e >= 0)
        mpz_pow_ui(num.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(e));
    else
        mpz_pow_ui(den.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(-e));
    return Rational(num, den);
}

}  // namespace padiccf
