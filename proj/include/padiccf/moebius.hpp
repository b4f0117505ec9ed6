#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "padiccf/context.hpp"
#include "padiccf/digits.hpp"
#include "padiccf/stream.hpp"

namespace padiccf {

// Coefficients of gamma = (x*alpha + y) / (z*alpha + t), updated in place as
// quotients of alpha are consumed and quotients of gamma emitted.
struct Moebius {
    Rational x, y, z, t;

    Rational determinant() const { return x * t - y * z; }

    // gmp arithmetic and exact comparison need canonical operands.
    void canonicalize() {
        x.canonicalize();
        y.canonicalize();
        z.canonicalize();
        t.canonicalize();
    }
};

// Consuming the head quotient a of alpha rewrites gamma in terms of the next
// complete quotient: alpha = a + 1/alpha'. The determinant flips sign.
inline Moebius input_transform(const Moebius& f, const Rational& a) {
    return {f.x * a + f.y, f.x, f.z * a + f.t, f.z};
}

// Emitting a quotient l of gamma continues with gamma' = 1/(gamma - l).
inline Moebius output_transform(const Moebius& f, const Rational& l) {
    return {f.z, f.t, f.x - l * f.z, f.y - l * f.t};
}

// The dominance condition that makes the floor of gamma computable from the
// floor of alpha alone: in both rows the alpha-coefficient term outweighs
// the constant.
inline bool good_case(const Moebius& f, const Rational& a, const Integer& p) {
    Valuation va = valuation(a, p);
    return valuation(f.x, p) + va < valuation(f.y, p) &&
           valuation(f.z, p) + va < valuation(f.t, p);
}

enum class FloorReason { Exact, Pathological, ConditionFailed, OK };

// Verdict on whether floor(gamma) is pinned down by floor(alpha).
struct FloorDecision {
    bool determinable = false;
    Rational value;  // meaningful when determinable
    Valuation v1, v2;
    Valuation m;
    FloorReason reason = FloorReason::ConditionFailed;
};

// Decides floor((x*alpha + y)/(z*alpha + t)) from floor(alpha) alone.
// When `exact` is set, alpha IS floor_alpha and everything is computable.
// Otherwise: the decision is negative if either row's valuation jumps above
// its coefficient's (the one bad quotient), and positive exactly when the
// digit budget m covers the valuation gap v2 - v1.
inline FloorDecision decide_floor(const Moebius& f, const Rational& floor_alpha,
                                  const PadicContext& ctx, bool exact = false) {
    const Integer& p = ctx.p();
    FloorDecision d;
    Rational num = f.x * floor_alpha + f.y;
    Rational den = f.z * floor_alpha + f.t;
    d.v1 = valuation(num, p);
    d.v2 = valuation(den, p);

    if (exact) {
        if (den == 0) throw DivisionByZero("transformation undefined at the exact input");
        d.determinable = true;
        d.reason = FloorReason::Exact;
        d.m = Valuation::infinity();
        d.value = floor_of(num / den, ctx);
        return d;
    }

    if (d.v1 >= valuation(f.x, p) + 1 || d.v2 >= valuation(f.z, p) + 1) {
        d.reason = FloorReason::Pathological;
        return d;
    }
    // Non-pathological rows have finite valuations here: a zero row value
    // forces the pathological branch above (x = y = 0 or z = t = 0 cannot
    // happen for a nonsingular matrix).
    long v1 = d.v1.finite(), v2 = d.v2.finite();
    d.m = std::min(valuation(f.x, p) - v1, valuation(f.z, p) - v2);
    if (d.m >= Valuation(v2 - v1)) {
        d.determinable = true;
        d.reason = FloorReason::OK;
        d.value = floor_of(num / den, ctx);
    }
    return d;
}

// Floor decisions for the alternating s/t algorithm. Knowledge of s(alpha)
// pins r+1 digits, knowledge of t(alpha) only r, which shifts the
// pathological guard and the two determinability thresholds by one.
struct MRFloorDecision {
    FloorDecision s;  // verdict on s(gamma)
    FloorDecision t;  // verdict on t(gamma)
};

inline MRFloorDecision decide_floor_mr(const Moebius& f, const Rational& known, bool from_s,
                                       const Integer& p, bool exact = false) {
    MRFloorDecision d;
    Rational num = f.x * known + f.y;
    Rational den = f.z * known + f.t;
    PadicContext s_ctx(p, DigitConvention::BrowkinS);
    PadicContext t_ctx(p, DigitConvention::BrowkinT);
    d.s.v1 = d.t.v1 = valuation(num, p);
    d.s.v2 = d.t.v2 = valuation(den, p);

    if (exact) {
        if (den == 0) throw DivisionByZero("transformation undefined at the exact input");
        d.s.determinable = d.t.determinable = true;
        d.s.reason = d.t.reason = FloorReason::Exact;
        d.s.m = d.t.m = Valuation::infinity();
        d.s.value = floor_s(num / den, p);
        d.t.value = floor_t(num / den, p);
        return d;
    }

    // The t-floor knows one digit less, so its bad case already starts at
    // vp(x) rather than vp(x) + 1.
    long guard = from_s ? 1 : 0;
    if (d.s.v1 >= valuation(f.x, p) + guard || d.s.v2 >= valuation(f.z, p) + guard) {
        d.s.reason = d.t.reason = FloorReason::Pathological;
        return d;
    }
    long v1 = d.s.v1.finite(), v2 = d.s.v2.finite();
    d.s.m = d.t.m = std::min(valuation(f.x, p) - v1, valuation(f.z, p) - v2);

    long s_threshold = v2 - v1 + (from_s ? 0 : 1);
    long t_threshold = v2 - v1 + (from_s ? -1 : 0);
    if (d.s.m >= Valuation(s_threshold)) {
        d.s.determinable = true;
        d.s.reason = FloorReason::OK;
        d.s.value = floor_s(num / den, p);
    }
    if (d.t.m >= Valuation(t_threshold)) {
        d.t.determinable = true;
        d.t.reason = FloorReason::OK;
        d.t.value = floor_t(num / den, p);
    }
    return d;
}

enum class RunStatus { Finished, InputBudgetExhausted, OutputBudgetReached, SwapLimitReached };

inline const char* name_of(RunStatus s) {
    switch (s) {
        case RunStatus::Finished: return "finished";
        case RunStatus::InputBudgetExhausted: return "input-budget-exhausted";
        case RunStatus::OutputBudgetReached: return "output-budget-reached";
        case RunStatus::SwapLimitReached: return "swap-limit-reached";
    }
    return "?";
}

struct EngineEvent {
    enum class Kind {
        ConsumedInput,
        ConsumedAlphaInput,
        ConsumedBetaInput,
        EmittedOutput,
        SwitchedToExactTail,
        Finished,
        InputBudgetExhausted
    };
    Kind kind;
    size_t index = 0;   // input index within its stream, or output index
    Rational quotient;  // the consumed or emitted quotient
};

inline const char* name_of(EngineEvent::Kind k) {
    switch (k) {
        case EngineEvent::Kind::ConsumedInput: return "ConsumedInput";
        case EngineEvent::Kind::ConsumedAlphaInput: return "ConsumedAlphaInput";
        case EngineEvent::Kind::ConsumedBetaInput: return "ConsumedBetaInput";
        case EngineEvent::Kind::EmittedOutput: return "EmittedOutput";
        case EngineEvent::Kind::SwitchedToExactTail: return "SwitchedToExactTail";
        case EngineEvent::Kind::Finished: return "Finished";
        case EngineEvent::Kind::InputBudgetExhausted: return "InputBudgetExhausted";
    }
    return "?";
}

struct EngineOptions {
    size_t max_inputs = 100000;
    size_t max_outputs = 1000;
    // After this many consecutive pathological consumes on a row, ask the
    // stream for an exact tail and test the row symbolically for zero.
    size_t pathological_window = 30;
    size_t max_swaps = 64;  // role swaps in the two-variable engine
};

struct RunTrace {
    std::vector<EngineEvent> events;
    RunStatus status = RunStatus::Finished;
    size_t inputs_consumed = 0;
    size_t outputs_emitted = 0;
};

inline std::vector<Rational> outputs_of(const RunTrace& trace) {
    std::vector<Rational> out;
    for (const auto& e : trace.events)
        if (e.kind == EngineEvent::Kind::EmittedOutput) out.push_back(e.quotient);
    return out;
}

namespace detail {

// Counters and the event log shared between the engine phases (and between
// the two-variable engine and the one-variable engine it collapses into).
struct EngineContext {
    EngineOptions opt;
    RunTrace trace;

    bool can_consume() const { return trace.inputs_consumed < opt.max_inputs; }
    bool can_emit() const { return trace.outputs_emitted < opt.max_outputs; }

    void consumed(EngineEvent::Kind kind, size_t index, const Rational& q) {
        trace.events.push_back({kind, index, q});
        ++trace.inputs_consumed;
    }

    void emitted(const Rational& q) {
        trace.events.push_back({EngineEvent::Kind::EmittedOutput, trace.outputs_emitted, q});
        ++trace.outputs_emitted;
    }

    void mark(EngineEvent::Kind kind) { trace.events.push_back({kind, 0, Rational(0)}); }
};

// Emits the expansion of an exactly known tail value, up to the output
// budget. Used once a stream ends: the remaining transformation value is a
// rational and is expanded directly.
inline RunStatus emit_exact_value(const Rational& value, const Integer& p, Algorithm algo,
                                  EngineContext& ec) {
    ec.mark(EngineEvent::Kind::SwitchedToExactTail);
    CFStream tail = CFStream::from_rational(value, p, algo);
    while (true) {
        if (!ec.can_emit()) return RunStatus::OutputBudgetReached;
        auto q = tail.next();
        if (!q) {
            ec.mark(EngineEvent::Kind::Finished);
            return RunStatus::Finished;
        }
        ec.emitted(*q);
    }
}

// Scaling all entries by a power of p changes neither the emitted quotients
// nor any decision in the loop (both depend only on valuation differences and
// entry ratios). Keeping the minimum entry valuation at zero stops quotient
// denominators from piling up p-powers over long runs, which would otherwise
// make every rational operation pay for a huge gcd.
inline void strip_p_content(Moebius& f, const Integer& p) {
    Valuation lo = Valuation::infinity();
    for (const Rational* q : {&f.x, &f.y, &f.z, &f.t})
        if (*q != 0) lo = std::min(lo, valuation(*q, p));
    if (lo.is_infinite() || lo.finite() == 0) return;
    Rational scale = pow_p(p, -lo.finite());
    for (Rational* q : {&f.x, &f.y, &f.z, &f.t}) *q *= scale;
}

// The one-variable engine loop. Consumes from `stream` while the head
// quotient leaves the floor of gamma undetermined, emits whenever the
// dominance condition and the digit budget allow, and switches to exact
// expansion when the stream ends. Accepts a singular matrix only because
// the two-variable engine can collapse into one (the value is then constant).
inline RunStatus moebius_loop(Moebius f, CFStream& stream, EngineContext& ec,
                              EngineEvent::Kind consume_tag) {
    const Integer p = stream.p();
    Algorithm algo = stream.algorithm();
    PadicContext ctx(p, convention_for(algo, 0));

    if (f.determinant() == 0) {
        // Constant value: rows are proportional.
        if (f.z != 0) return emit_exact_value(f.x / f.z, p, algo, ec);
        if (f.t != 0) return emit_exact_value(f.y / f.t, p, algo, ec);
        throw DivisionByZero("transformation with identically zero denominator");
    }

    size_t num_streak = 0, den_streak = 0;

    auto consume = [&]() -> bool {
        if (!ec.can_consume()) return false;
        size_t idx = stream.index();
        Rational a = *stream.next();
        // Track how long each row has been pathological in a row; a long
        // streak plus an exact tail means we can settle the row symbolically.
        num_streak = valuation(f.x * a + f.y, p) >= valuation(f.x, p) + 1 ? num_streak + 1 : 0;
        den_streak = valuation(f.z * a + f.t, p) >= valuation(f.z, p) + 1 ? den_streak + 1 : 0;
        f = input_transform(f, a);
        ec.consumed(consume_tag, idx, a);
        return true;
    };

    while (true) {
        strip_p_content(f, p);
        if (!ec.can_emit()) return RunStatus::OutputBudgetReached;
        if (stream.exhausted()) {
            // The consumed prefix was exact: the remaining value is x/z.
            // A zero z after at least one output means the previous output
            // was the exact floor and the expansion is complete.
            if (f.z == 0) {
                if (ec.trace.outputs_emitted == 0)
                    throw DivisionByZero("transformation undefined at the input value");
                ec.mark(EngineEvent::Kind::Finished);
                return RunStatus::Finished;
            }
            return emit_exact_value(f.x / f.z, p, algo, ec);
        }

        if (num_streak >= ec.opt.pathological_window || den_streak >= ec.opt.pathological_window) {
            TailValue tv = stream.tail_value();
            if (tv.kind == TailKind::RationalValue) {
                if (f.z * tv.value + f.t == 0) {
                    // The current value is infinite: either the input is
                    // outside the transformation's domain, or the expansion
                    // ended exactly at the previous output.
                    if (ec.trace.outputs_emitted == 0)
                        throw DivisionByZero("transformation undefined at the input value");
                    ec.mark(EngineEvent::Kind::Finished);
                    return RunStatus::Finished;
                }
                if (f.x * tv.value + f.y == 0) {
                    // gamma is exactly zero from here on; true floors keep
                    // later complete quotients nonzero, so only possible
                    // before the first output.
                    if (ec.trace.outputs_emitted > 0)
                        throw std::logic_error("zero numerator after an emitted output");
                    return emit_exact_value(Rational(0), p, algo, ec);
                }
            }
            num_streak = den_streak = 0;  // inconclusive or ruled out; move on
        }

        const Rational& a = *stream.peek();
        if (!good_case(f, a, p)) {
            if (!consume()) break;
            continue;
        }

        // In the good case both x and z are nonzero; u is the valuation drop
        // of gamma.
        long u = valuation(f.z, p).finite() - valuation(f.x, p).finite();
        if (u < 0) {
            ec.emitted(Rational(0));
            f = output_transform(f, Rational(0));
            continue;
        }
        long r = -valuation(a, p).finite();
        if (r < u) {
            if (!consume()) break;
            continue;
        }

        FloorDecision d = decide_floor(f, a, ctx, false);
        if (!d.determinable)
            throw std::logic_error("good case with r >= u must be determinable");
        ec.emitted(d.value);
        f = output_transform(f, d.value);
    }

    ec.mark(EngineEvent::Kind::InputBudgetExhausted);
    return RunStatus::InputBudgetExhausted;
}

}  // namespace detail

// Streams the continued fraction of (x*alpha + y)/(z*alpha + t) from the
// continued fraction of alpha. Stops at the input or output budget,
// whichever is hit first, or ends exactly.
inline RunTrace run_moebius(Moebius f, CFStream& stream, const EngineOptions& opt = {}) {
    if (stream.algorithm() == Algorithm::MR)
        throw InvalidInput("the one-variable engine runs on ruban or browkin1 streams");
    f.canonicalize();
    if (f.determinant() == 0)
        throw InvalidInput("coefficient matrix is singular");
    detail::EngineContext ec{opt, {}};
    ec.trace.status = detail::moebius_loop(f, stream, ec, EngineEvent::Kind::ConsumedInput);
    return ec.trace;
}

}  // namespace padiccf
