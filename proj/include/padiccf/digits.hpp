#pragma once

#include <utility>
#include <vector>

#include "padiccf/context.hpp"
#include "padiccf/rational.hpp"
#include "padiccf/valuation.hpp"

namespace padiccf {

// A finite window of consecutive p-adic digits: digits[i] multiplies
// p^(start+i). A window is either empty (the number is zero, or nothing is
// known) or begins with a nonzero digit, so `start` is the valuation of any
// completion. Digits follow the context's convention.
struct PadicDigits {
    Integer p;
    DigitConvention convention = DigitConvention::Ruban;
    long start = 0;
    std::vector<Integer> digits;

    bool empty() const { return digits.empty(); }
    long length() const { return static_cast<long>(digits.size()); }

    Valuation start_valuation() const {
        return empty() ? Valuation::infinity() : Valuation(start);
    }

    // The rational with exactly these digits and nothing below.
    Rational value() const {
        Rational acc = 0;
        for (long i = 0; i < length(); ++i)
            acc += Rational(digits[static_cast<size_t>(i)]) * pow_p(p, start + i);
        return acc;
    }

    // Keeps the first n digits (or fewer if the window is shorter).
    PadicDigits truncated(long n) const {
        PadicDigits w = *this;
        if (n <= 0)
            w.digits.clear();
        else if (n < w.length())
            w.digits.resize(static_cast<size_t>(n));
        return w;
    }
};

namespace detail {

// Digits of the p-adic unit u modulo p^count, least significant first,
// in the standard alphabet {0, ..., p-1}.
inline std::vector<Integer> standard_digits(Integer u, const Integer& p, long count) {
    std::vector<Integer> out;
    out.reserve(static_cast<size_t>(count));
    Integer q, r;
    for (long i = 0; i < count; ++i) {
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), u.get_mpz_t(), p.get_mpz_t());
        out.push_back(r);
        u = q;
    }
    return out;
}

// Rewrites standard digits into the balanced alphabet {-(p-1)/2, ...,
// (p-1)/2}. Each oversized digit borrows one unit of carry from the next
// position, so the first `count` balanced digits depend only on the first
// `count` standard ones.
inline void balance_digits(std::vector<Integer>& digits, const Integer& p) {
    const Integer half = (p - 1) / 2;
    Integer carry = 0;
    for (auto& d : digits) {
        d += carry;
        if (d > half) {
            d -= p;
            carry = 1;
        } else {
            carry = 0;
        }
    }
}

}  // namespace detail

// The first `count` digits of q, starting at vp(q). Exact modular
// arithmetic: q = p^v * num/den with num, den units, and the digits are
// those of num * den^(-1) modulo p^count.
inline PadicDigits digits_of_rational(const Rational& q, const PadicContext& ctx, long count) {
    PadicDigits w{ctx.p(), ctx.convention(), 0, {}};
    if (q == 0 || count <= 0) return w;

    UnitDecomposition d = unit_decomposition(q, ctx.p());
    Integer modulus;
    mpz_pow_ui(modulus.get_mpz_t(), ctx.p().get_mpz_t(), static_cast<unsigned long>(count));
    Integer den_inv;
    if (mpz_invert(den_inv.get_mpz_t(), d.unit_den.get_mpz_t(), modulus.get_mpz_t()) == 0)
        throw std::logic_error("denominator not invertible modulo p^count");
    Integer u = d.unit_num * den_inv;
    mpz_fdiv_r(u.get_mpz_t(), u.get_mpz_t(), modulus.get_mpz_t());

    w.start = d.v;
    w.digits = detail::standard_digits(u, ctx.p(), count);
    if (ctx.balanced()) detail::balance_digits(w.digits, ctx.p());
    return w;
}

namespace detail {

// Shared floor kernel: the digits of q from vp(q) up to exponent `top`
// (inclusive), summed back into a rational. Zero when vp(q) > top.
inline Rational floor_up_to(const Rational& q, const Integer& p, DigitConvention conv, long top) {
    if (q == 0) return Rational(0);
    Valuation v = valuation(q, p);
    if (v > Valuation(top)) return Rational(0);
    long count = top - v.finite() + 1;
    PadicContext ctx(p, conv);
    return digits_of_rational(q, ctx, count).value();
}

}  // namespace detail

// Integer-part maps. All three project a rational onto the finite digit
// sums that serve as partial quotients: Ruban and s keep exponents up to 0,
// t strictly below 0.
inline Rational floor_ruban(const Rational& q, const Integer& p) {
    return detail::floor_up_to(q, p, DigitConvention::Ruban, 0);
}

inline Rational floor_s(const Rational& q, const Integer& p) {
    return detail::floor_up_to(q, p, DigitConvention::BrowkinS, 0);
}

inline Rational floor_t(const Rational& q, const Integer& p) {
    return detail::floor_up_to(q, p, DigitConvention::BrowkinT, -1);
}

inline Rational floor_of(const Rational& q, const PadicContext& ctx) {
    switch (ctx.convention()) {
        case DigitConvention::Ruban: return floor_ruban(q, ctx.p());
        case DigitConvention::BrowkinS: return floor_s(q, ctx.p());
        case DigitConvention::BrowkinT: return floor_t(q, ctx.p());
    }
    throw std::logic_error("unreachable");
}

// Floor of a partially known number. The window must reach the end of the
// integer-part range (exponent 0, or -1 for BrowkinT); otherwise the floor
// is not yet pinned down and we refuse rather than guess.
inline Rational floor_of_window(const PadicDigits& w) {
    long top = w.convention == DigitConvention::BrowkinT ? -1 : 0;
    if (w.empty()) return Rational(0);  // exact zero has floor zero
    if (w.start > top) return Rational(0);
    if (w.start + w.length() - 1 < top)
        throw InsufficientPrecision("digit window too short to determine the floor");
    return w.truncated(top - w.start + 1).value();
}

// Membership in the representative set of the convention: exactly the
// numbers that equal their own floor. These are the legal partial quotients.
inline bool is_representative(const Rational& q, const PadicContext& ctx) {
    return floor_of(q, ctx) == q;
}

}  // namespace padiccf
