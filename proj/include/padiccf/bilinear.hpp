#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "padiccf/moebius.hpp"
#include "padiccf/propagation.hpp"

namespace padiccf {

// Coefficients of gamma = (x*ab + y*a + z*b + t) / (e*ab + f*a + g*b + h)
// in two stream variables a (alpha) and b (beta).
struct Bilinear {
    Rational x, y, z, t;
    Rational e, f, g, h;

    // gmp arithmetic and exact comparison need canonical operands.
    void canonicalize() {
        for (Rational* q : {&x, &y, &z, &t, &e, &f, &g, &h}) q->canonicalize();
    }
};

// A valid state has coefficient rank 2: some 2x2 minor is nonzero.
inline bool rank_two(const Bilinear& st) {
    const Rational* num[4] = {&st.x, &st.y, &st.z, &st.t};
    const Rational* den[4] = {&st.e, &st.f, &st.g, &st.h};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (*num[i] * *den[j] - *num[j] * *den[i] != 0) return true;
    return false;
}

// alpha = a + 1/alpha' regroups the form in (alpha', beta).
inline Bilinear alpha_input(const Bilinear& st, const Rational& a) {
    return {st.x * a + st.z, st.y * a + st.t, st.x, st.y,
            st.e * a + st.g, st.f * a + st.h, st.e, st.f};
}

// beta = b + 1/beta' regroups the form in (alpha, beta').
inline Bilinear beta_input(const Bilinear& st, const Rational& b) {
    return {st.x * b + st.y, st.x, st.z * b + st.t, st.z,
            st.e * b + st.f, st.e, st.g * b + st.h, st.g};
}

// Emitting l continues with 1/(gamma - l).
inline Bilinear bilinear_output(const Bilinear& st, const Rational& l) {
    return {st.e,            st.f,            st.g,            st.h,
            st.x - l * st.e, st.y - l * st.f, st.z - l * st.g, st.t - l * st.h};
}

// Before any alpha digit is in play, beta alone must dominate in the four
// coefficient pairs it multiplies into. A pair that is zero altogether
// contributes nothing and passes vacuously.
inline bool good_beta(const Bilinear& st, const Rational& b, const Integer& p) {
    Valuation vb = valuation(b, p);
    auto pair_ok = [&](const Rational& c1, const Rational& c2) {
        if (c1 == 0 && c2 == 0) return true;
        return valuation(c1, p) + vb < valuation(c2, p);
    };
    return pair_ok(st.x, st.y) && pair_ok(st.z, st.t) && pair_ok(st.e, st.f) &&
           pair_ok(st.g, st.h);
}

// Full dominance: the ab term outweighs every other term in both rows.
inline bool good_case_bilinear(const Bilinear& st, const Rational& a, const Rational& b,
                               const Integer& p) {
    Valuation va = valuation(a, p), vb = valuation(b, p);
    Valuation nab = valuation(st.x, p) + va + vb;
    Valuation dab = valuation(st.e, p) + va + vb;
    return nab < valuation(st.y, p) + va && nab < valuation(st.z, p) + vb &&
           nab < valuation(st.t, p) && dab < valuation(st.f, p) + va &&
           dab < valuation(st.g, p) + vb && dab < valuation(st.h, p);
}

// Trusted digit window of x*A*B + y*A + z*B + t when A and B are known only
// through the digit windows wa and wb. Each term is trusted up to its
// coefficient valuation plus the absolute precision of its variable part;
// a product of two windows is trusted to the shorter relative precision.
inline PropagationResult bilinear_digit_count(const Rational& x, const Rational& y,
                                              const Rational& z, const Rational& t,
                                              const PadicDigits& wa, const PadicDigits& wb,
                                              const PadicContext& ctx) {
    if (wa.empty() || wb.empty())
        throw InvalidInput("bilinear_digit_count requires nonempty digit windows");
    if (x == 0 && y == 0 && z == 0)
        throw InvalidInput("bilinear_digit_count requires a stream-dependent row");
    const Integer& p = ctx.p();
    long sa = wa.start, sb = wb.start;
    long ha = wa.length(), hb = wb.length();
    Valuation end = valuation(x, p) + Valuation(sa + sb + std::min(ha, hb));
    end = std::min(end, valuation(y, p) + Valuation(sa + ha));
    end = std::min(end, valuation(z, p) + Valuation(sb + hb));
    Rational va = wa.value(), vb = wb.value();
    Rational known = x * va * vb + y * va + z * vb + t;
    return detail::propagated(known, end.finite(), ctx);
}

struct BilinearFloorDecision {
    bool determinable = false;
    Rational value;  // meaningful when determinable
    Valuation v1, v2;
    Valuation k_num, k_den;  // trusted digit counts, 0 when no digit is seen
};

namespace detail {

// Trusted absolute precision of one row evaluated at full floors fa, fb
// (windows reaching the convention's top exponent).
inline Valuation row_end(const Rational& x, const Rational& y, const Rational& z,
                         const Rational& fa, const Rational& fb, long top, const Integer& p) {
    long ra = -valuation(fa, p).finite(), rb = -valuation(fb, p).finite();
    long ha = top + ra + 1, hb = top + rb + 1;
    Valuation end = valuation(x, p) + Valuation(-ra - rb + std::min(ha, hb));
    end = std::min(end, valuation(y, p) + Valuation(-ra + ha));
    end = std::min(end, valuation(z, p) + Valuation(-rb + hb));
    return end;
}

}  // namespace detail

// Decides floor(gamma) from the floors of alpha and beta alone. The floor is
// pinned down when the result is stable under every completion of the two
// floors: the perturbation of num/den must fall beyond the floor's last
// digit, which needs v1 - v2 + min(k_num, k_den) - 1 >= 0 digits of margin
// (one more for conventions whose floor includes the exponent-0 digit).
inline BilinearFloorDecision decide_floor_bilinear(const Bilinear& st, const Rational& fa,
                                                   const Rational& fb, const PadicContext& ctx) {
    if (fa == 0 || fb == 0) throw InvalidInput("decide_floor_bilinear requires nonzero floors");
    const Integer& p = ctx.p();
    long top = ctx.convention() == DigitConvention::BrowkinT ? -1 : 0;
    BilinearFloorDecision d;
    Rational num = st.x * fa * fb + st.y * fa + st.z * fb + st.t;
    Rational den = st.e * fa * fb + st.f * fa + st.g * fb + st.h;
    d.v1 = valuation(num, p);
    d.v2 = valuation(den, p);
    Valuation end_num = detail::row_end(st.x, st.y, st.z, fa, fb, top, p);
    Valuation end_den = detail::row_end(st.e, st.f, st.g, fa, fb, top, p);
    d.k_num = d.v1 < end_num ? end_num - d.v1.finite() : Valuation(0);
    d.k_den = d.v2 < end_den ? end_den - d.v2.finite() : Valuation(0);

    // The true denominator valuation is only visible when at least one of
    // its digits is.
    if (!(d.v2 < end_den)) return d;
    long v2 = d.v2.finite();
    // gamma differs from num/den by at most p^w with
    // w = min(end_num - v2, v1 + end_den - 2*v2).
    Valuation w = std::min(end_num - v2, d.v1 + (end_den - v2) - v2);
    if (w >= Valuation(top + 1)) {
        d.determinable = true;
        d.value = floor_of(num / den, ctx);
    }
    return d;
}

namespace detail {

// One stream plus the event tag its consumptions are logged under. Tags
// follow the physical stream across role swaps.
struct TaggedStream {
    CFStream* s;
    EngineEvent::Kind tag;
};

// Same scale freedom as the one-variable engine: a global p-power leaves all
// decisions and outputs unchanged and keeps denominators from accumulating.
inline void strip_p_content(Bilinear& st, const Integer& p) {
    Valuation lo = Valuation::infinity();
    for (const Rational* q : {&st.x, &st.y, &st.z, &st.t, &st.e, &st.f, &st.g, &st.h})
        if (*q != 0) lo = std::min(lo, valuation(*q, p));
    if (lo.is_infinite() || lo.finite() == 0) return;
    Rational scale = pow_p(p, -lo.finite());
    for (Rational* q : {&st.x, &st.y, &st.z, &st.t, &st.e, &st.f, &st.g, &st.h}) *q *= scale;
}

}  // namespace detail

// Streams the continued fraction of a bilinear form in two stream variables.
// Role note: "alpha"/"beta" below mean the current roles, which a swap
// exchanges; the event log keeps the original identities.
inline RunTrace run_bilinear(Bilinear st, CFStream& alpha_stream, CFStream& beta_stream,
                             const EngineOptions& opt = {}) {
    if (&alpha_stream == &beta_stream)
        throw InvalidInput("the two inputs must be distinct streams (share a quotient cache instead)");
    st.canonicalize();
    if (!rank_two(st)) throw InvalidInput("coefficient matrix must have rank 2");
    if (alpha_stream.algorithm() == Algorithm::MR || beta_stream.algorithm() == Algorithm::MR)
        throw InvalidInput("the two-variable engine runs on ruban or browkin1 streams");
    if (alpha_stream.p() != beta_stream.p() ||
        alpha_stream.algorithm() != beta_stream.algorithm())
        throw InvalidInput("input streams must share prime and algorithm");

    const Integer p = alpha_stream.p();
    Algorithm algo = alpha_stream.algorithm();
    PadicContext ctx(p, convention_for(algo, 0));

    detail::EngineContext ec{opt, {}};
    detail::TaggedStream alpha{&alpha_stream, EngineEvent::Kind::ConsumedAlphaInput};
    detail::TaggedStream beta{&beta_stream, EngineEvent::Kind::ConsumedBetaInput};
    size_t swaps = 0;

    auto consume = [&](detail::TaggedStream& ts, bool is_alpha) -> bool {
        if (!ec.can_consume()) return false;
        size_t idx = ts.s->index();
        Rational q = *ts.s->next();
        st = is_alpha ? alpha_input(st, q) : beta_input(st, q);
        ec.consumed(ts.tag, idx, q);
        return true;
    };

    // Collapse helpers: when one variable's stream ends, the remaining value
    // is a one-variable fraction in the other.
    auto finish_in_beta = [&]() {
        ec.trace.status = detail::moebius_loop({st.x, st.y, st.e, st.f}, *beta.s, ec, beta.tag);
    };
    auto finish_in_alpha = [&]() {
        ec.trace.status = detail::moebius_loop({st.x, st.z, st.e, st.g}, *alpha.s, ec, alpha.tag);
    };

    while (true) {
        detail::strip_p_content(st, p);
        if (!ec.can_emit()) {
            ec.trace.status = RunStatus::OutputBudgetReached;
            return ec.trace;
        }
        if (alpha.s->exhausted()) {
            finish_in_beta();
            return ec.trace;
        }
        if (beta.s->exhausted()) {
            finish_in_alpha();
            return ec.trace;
        }

        // Seek dominance of the beta head, then take one more beta input so
        // the incoming alpha digit meets an already settled beta tail.
        if (!good_beta(st, *beta.s->peek(), p)) {
            if (!consume(beta, false)) break;
            continue;
        }
        if (!consume(beta, false)) break;
        if (alpha.s->exhausted() || beta.s->exhausted()) continue;

        // The alpha head must not cancel against the coefficients it lands
        // on; otherwise exchange the roles and retry.
        const Rational& a = *alpha.s->peek();
        bool no_cancel =
            valuation(st.x * a + st.z, p) ==
                std::min(valuation(st.x, p) + valuation(a, p), valuation(st.z, p)) &&
            valuation(st.e * a + st.g, p) ==
                std::min(valuation(st.e, p) + valuation(a, p), valuation(st.g, p));
        if (!no_cancel) {
            std::swap(st.y, st.z);
            std::swap(st.f, st.g);
            std::swap(alpha, beta);
            if (++swaps > opt.max_swaps) {
                ec.trace.status = RunStatus::SwapLimitReached;
                return ec.trace;
            }
            continue;
        }
        if (!consume(alpha, true)) break;
        if (alpha.s->exhausted() || beta.s->exhausted()) continue;
        // Dominance normally holds now; rows that still carry zero
        // coefficients need further inputs first.
        if (!good_case_bilinear(st, *alpha.s->peek(), *beta.s->peek(), p)) continue;

        // u is the valuation drop of gamma.
        long u = valuation(st.e, p).finite() - valuation(st.x, p).finite();
        if (u < 0) {
            ec.emitted(Rational(0));
            st = bilinear_output(st, Rational(0));
            continue;
        }

        // Wait until both heads carry at least u digits below exponent 0.
        bool stalled = false, rewound = false;
        for (auto* ts : {&alpha, &beta}) {
            bool is_alpha = ts == &alpha;
            while (true) {
                if (ts->s->exhausted()) {
                    rewound = true;  // loop top collapses
                    break;
                }
                if (-valuation(*ts->s->peek(), p).finite() >= u) break;
                if (!consume(*ts, is_alpha)) {
                    stalled = true;
                    break;
                }
            }
            if (stalled || rewound) break;
        }
        if (stalled) break;
        if (rewound) continue;

        BilinearFloorDecision d =
            decide_floor_bilinear(st, *alpha.s->peek(), *beta.s->peek(), ctx);
        if (!d.determinable)
            throw std::logic_error("bilinear good case with deep heads must be determinable");
        ec.emitted(d.value);
        st = bilinear_output(st, d.value);
    }

    ec.mark(EngineEvent::Kind::InputBudgetExhausted);
    ec.trace.status = RunStatus::InputBudgetExhausted;
    return ec.trace;
}

}  // namespace padiccf
