#pragma once

#include <algorithm>
#include <string>

#include "padiccf/context.hpp"
#include "padiccf/digits.hpp"
#include "padiccf/rational.hpp"
#include "padiccf/valuation.hpp"

namespace padiccf {

// How many digits of a derived quantity are pinned down by finite digit
// windows of its inputs, and what those digits are. `count` always equals
// window.length(); zero means nothing survives (every digit can be altered
// by some completion of the inputs).
struct PropagationResult {
    PadicDigits window;
    long count = 0;
};

namespace detail {

inline void require_window(const PadicDigits& w, const char* who) {
    if (w.empty()) throw InvalidInput(std::string(who) + ": empty digit window");
}

inline PropagationResult propagated(const Rational& known, long end, const PadicContext& ctx) {
    // `known` matches the true value up to (not including) exponent `end`.
    PropagationResult r;
    r.window = PadicDigits{ctx.p(), ctx.convention(), 0, {}};
    if (known == 0) return r;  // only a valuation bound survives, no digits
    Valuation v = ctx.vp(known);
    long k = end - v.finite();
    if (k <= 0) return r;
    r.window = digits_of_rational(known, ctx, k);
    r.count = k;
    return r;
}

}  // namespace detail

// Digits of 1/alpha from h digits of alpha: the full window length carries
// over, mirrored to valuation -start. Inverting the known part is enough
// because vp(1/a - 1/w) = vp(w - a) - 2*start >= -start + h.
inline PropagationResult invert_window(const PadicDigits& w, const PadicContext& ctx) {
    detail::require_window(w, "invert_window");
    Rational known = w.value();
    return detail::propagated(1 / known, -w.start + w.length(), ctx);
}

// Digits of alpha * beta: min(h_alpha, h_beta) digits starting at the sum of
// the valuations.
inline PropagationResult multiply_windows(const PadicDigits& a, const PadicDigits& b,
                                          const PadicContext& ctx) {
    detail::require_window(a, "multiply_windows");
    detail::require_window(b, "multiply_windows");
    long end = a.start + b.start + std::min(a.length(), b.length());
    return detail::propagated(a.value() * b.value(), end, ctx);
}

// Digits of alpha + beta: the sum of the known parts is trusted up to the
// earlier window end; leading cancellation eats into the count and can take
// it to zero.
inline PropagationResult add_windows(const PadicDigits& a, const PadicDigits& b,
                                     const PadicContext& ctx) {
    detail::require_window(a, "add_windows");
    detail::require_window(b, "add_windows");
    long end = std::min(a.start + a.length(), b.start + b.length());
    return detail::propagated(a.value() + b.value(), end, ctx);
}

// Digits of x * alpha + y for exactly known rationals x != 0, y.
inline PropagationResult affine_window(const Rational& x, const Rational& y,
                                       const PadicDigits& w, const PadicContext& ctx) {
    detail::require_window(w, "affine_window");
    if (x == 0) throw InvalidInput("affine_window: x must be nonzero");
    long end = ctx.vp(x).finite() + w.start + w.length();
    return detail::propagated(x * w.value() + y, end, ctx);
}

// The one partial quotient a for which knowing a alone says nothing about
// x * alpha + y: the representative with vp(x*a + y) >= vp(x) + 1, i.e. the
// floor of -y/x. Any other representative pins vp(x*a + y) = vp(x + ...) to
// at most vp(x). For the BrowkinT convention the analogous threshold is
// vp(x*a + y) >= vp(x), met by the t-floor of -y/x.
inline Rational unique_bad_quotient(const Rational& x, const Rational& y,
                                    const PadicContext& ctx) {
    if (x == 0) throw InvalidInput("unique_bad_quotient: x must be nonzero");
    return floor_of(Rational(-y / x), ctx);
}

}  // namespace padiccf
