// End-to-end acceptance suite. Each check prints one PASS/FAIL line and the
// binary exits nonzero if any check fails. Checks pin exact values, exhaustive
// enumerations, or explicit statistical tolerances, and each has a wall-clock
// budget that is enforced.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "padiccf/bilinear.hpp"
#include "padiccf/metrics.hpp"

using namespace padiccf;

namespace {

int g_failures = 0;

// A check body returns an empty string on success and a reason on failure;
// `info` may carry a short annotation for the PASS line.
void run_check(int id, const char* label, double limit_s,
               const std::function<std::string(std::string&)>& body) {
    using clock = std::chrono::steady_clock;
    std::string info, failure;
    auto t0 = clock::now();
    try {
        failure = body(info);
    } catch (const std::exception& e) {
        failure = std::string("exception: ") + e.what();
    }
    double dt = std::chrono::duration<double>(clock::now() - t0).count();
    if (failure.empty() && limit_s > 0 && dt > limit_s)
        failure = "time limit exceeded";

    char timing[48];
    if (limit_s > 0)
        std::snprintf(timing, sizeof(timing), "%6.2fs/%gs", dt, limit_s);
    else
        std::snprintf(timing, sizeof(timing), "%6.2fs", dt);
    std::printf("check %02d: %s  %-14s %s", id, failure.empty() ? "PASS" : "FAIL", timing, label);
    if (!info.empty()) std::printf(" [%s]", info.c_str());
    std::printf("\n");
    if (!failure.empty()) {
        std::printf("          %s\n", failure.c_str());
        ++g_failures;
    }
    std::fflush(stdout);
}

Rational rational_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

// |observed - expected| <= tol * expected, all exact.
bool within_tolerance(const Rational& observed, const Rational& expected, const Rational& tol) {
    return rational_abs(Rational(observed - expected)) <= Rational(tol * expected);
}

std::vector<long> digit_alphabet(const Integer& p, DigitConvention conv) {
    long pl = p.get_si();
    std::vector<long> out;
    if (conv == DigitConvention::Ruban) {
        for (long c = 0; c < pl; ++c) out.push_back(c);
    } else {
        for (long c = -(pl - 1) / 2; c <= (pl - 1) / 2; ++c) out.push_back(c);
    }
    return out;
}

// Representative-set elements whose leading digit sits exactly at exponent -r.
std::vector<Rational> reps_of_valuation(const Integer& p, DigitConvention conv, long r) {
    long top = conv == DigitConvention::BrowkinT ? -1 : 0;
    std::vector<long> alphabet = digit_alphabet(p, conv);
    std::vector<Rational> out;
    long n = top + r + 1;
    if (n <= 0) return out;
    std::vector<size_t> idx(static_cast<size_t>(n), 0);
    while (true) {
        if (alphabet[idx[0]] != 0) {
            Rational v = 0;
            for (long i = 0; i < n; ++i)
                v += Rational(alphabet[idx[static_cast<size_t>(i)]]) * pow_p(p, -r + i);
            v.canonicalize();
            out.push_back(v);
        }
        size_t pos = 0;
        while (pos < idx.size()) {
            if (++idx[pos] < alphabet.size()) break;
            idx[pos] = 0;
            ++pos;
        }
        if (pos == idx.size()) break;
    }
    return out;
}

// Traces kept from the oracle-equivalence checks for the replay check.
struct MoebiusReplayCase {
    Moebius f;
    Integer p;
    Algorithm algo;
    Integer D;
    Integer branch;
    RunTrace trace;
};

struct BilinearReplayCase {
    Bilinear st;
    Integer p;
    Algorithm algo;
    Integer D;
    Integer branch;
    QuadExt alpha, beta;
    RunTrace trace;
};

std::vector<MoebiusReplayCase> g_moebius_cases;
std::vector<BilinearReplayCase> g_bilinear_cases;

// ---------------------------------------------------------------- check 1

std::string check_minus_p(std::string& info) {
    for (long pl : {5L, 7L}) {
        Integer p(pl);
        CFStream s = CFStream::from_rational(Rational(-pl), p, Algorithm::Ruban);
        ExpansionResult r = expand(s, 50);
        if (r.terminated) return "expansion of -" + std::to_string(pl) + " terminated";
        if (r.terms.size() != 50) return "expected 50 quotients";
        if (r.terms[0] != 0) return "first quotient of -" + std::to_string(pl) + " is not 0";
        Rational rep(pl * pl - 1, pl);
        rep.canonicalize();
        for (size_t i = 1; i < r.terms.size(); ++i)
            if (r.terms[i] != rep)
                return "quotient " + std::to_string(i) + " of -" + std::to_string(pl) +
                       " is " + to_string(r.terms[i]) + ", expected " + to_string(rep);
        if (!r.nonterminating_cycle || *r.nonterminating_cycle != 1)
            return "repeating complete quotient not flagged at index 1";
    }
    info = "quotients 24/5 and 48/7, cycles flagged";
    return {};
}

// ---------------------------------------------------------------- check 2

std::string check_browkin1_termination(std::string& info) {
    std::mt19937_64 rng(52902);
    std::uniform_int_distribution<long> draw(-10000, 10000);
    size_t max_len = 0;
    for (int i = 0; i < 500; ++i) {
        long num = draw(rng);
        long den = draw(rng);
        while (den == 0) den = draw(rng);
        Rational q(num, den);
        q.canonicalize();
        for (long pl : {3L, 5L, 13L}) {
            Integer p(pl);
            CFStream s = CFStream::from_rational(q, p, Algorithm::BrowkinI);
            ExpansionResult r = expand(s, 201);
            if (!r.terminated || r.terms.size() > 200)
                return "expansion of " + to_string(q) + " at p=" + std::to_string(pl) +
                       " did not terminate within 200 quotients";
            if (cf_value(r.terms) != q)
                return "convergents of " + to_string(q) + " at p=" + std::to_string(pl) +
                       " rebuild a different value";
            max_len = std::max(max_len, r.terms.size());
        }
    }
    info = "longest expansion " + std::to_string(max_len) + " quotients";
    return {};
}

// ---------------------------------------------------------------- check 3

// Proves that the expansion of sqrt(D) repeats a complete quotient exactly
// (quadratic tails make equality decidable), so every quotient the stream
// will ever produce already appeared in the scanned prefix; reports the
// deepest quotient valuation seen there.
std::string prove_input_depth_cap(const Integer& p, const Integer& D, const Integer& res,
                                  Algorithm algo, long scan, long& cap) {
    PadicContext ctx(p, convention_for(algo, 0));
    SqrtBranch branch(D, p, res);
    QuadExt alpha(0, 1, 1, D);
    std::vector<QuadExt> tails;
    cap = 0;
    for (long i = 0; i < scan; ++i) {
        for (const QuadExt& seen : tails)
            if (seen == alpha) return {};
        tails.push_back(alpha);
        Rational a = quad_floor(alpha, ctx, branch);
        Valuation v = valuation(a, p);
        if (!v.is_infinite()) cap = std::max(cap, -v.finite());
        alpha = (alpha - a).inverse();
    }
    return "no complete quotient repeats within " + std::to_string(scan) + " steps";
}

std::string check_moebius_oracle(std::string& info) {
    std::mt19937_64 rng(7130095);
    std::uniform_int_distribution<long> entry(-1000, 1000);
    std::vector<Moebius> mats;
    while (mats.size() < 100) {
        Moebius f{Rational(entry(rng)), Rational(entry(rng)), Rational(entry(rng)),
                  Rational(entry(rng))};
        if (f.determinant() == 0) continue;
        mats.push_back(f);
    }

    struct Config {
        long D, p;
        Algorithm algo;
        // The browkin1 expansion of sqrt(2) at p=7 is exactly periodic with
        // every quotient at valuation -1, so a transformed expansion that
        // needs a deeper input quotient provably never gets one. On that
        // configuration the engine must instead emit the exact matching
        // prefix and then report the starvation honestly.
        bool starved;
    };
    const Config configs[] = {{95, 13, Algorithm::Ruban, false},
                              {95, 13, Algorithm::BrowkinI, false},
                              {2, 7, Algorithm::Ruban, false},
                              {2, 7, Algorithm::BrowkinI, true}};
    size_t total_inputs = 0, starved_runs = 0, full_runs = 0;
    for (const Config& c : configs) {
        Integer p(c.p), D(c.D);
        Integer branch = sqrt_branches_mod_p(D, p).first;
        std::string leg = "sqrt(" + std::to_string(c.D) + ") p=" + std::to_string(c.p) + " " +
                          name_of(c.algo);
        long cap = 0;
        if (c.starved) {
            std::string err = prove_input_depth_cap(p, D, branch, c.algo, 20, cap);
            if (!err.empty()) return leg + ": " + err;
            if (cap != 1) return leg + ": expected input depth cap 1, found " +
                                 std::to_string(cap);
        }
        auto cache = std::make_shared<SurdQuotientCache>(QuadraticSurd{0, 1, 1, D, branch}, p,
                                                         c.algo);
        QuadExt root(0, 1, 1, D);
        for (size_t i = 0; i < mats.size(); ++i) {
            const Moebius& f = mats[i];
            std::string where = leg + " matrix " + std::to_string(i);
            CFStream in = CFStream::from_cache(cache, p, c.algo, branch);
            EngineOptions opt;
            opt.max_inputs = c.starved ? 1500 : 6000;
            opt.max_outputs = 50;
            RunTrace tr = run_moebius(f, in, opt);

            QuadExt num = f.x * root + f.y;
            QuadExt den = f.z * root + f.t;
            QuadExt gamma = num / den;
            if (gamma.is_rational()) return where + ": image unexpectedly rational";
            CFStream direct = CFStream::from_surd({gamma.A(), gamma.B(), gamma.C(), D, branch},
                                                  p, c.algo);
            std::vector<Rational> outs = outputs_of(tr);
            for (size_t k = 0; k < outs.size(); ++k) {
                auto q = direct.next();
                if (!q) return where + ": direct expansion ended early";
                if (*q != outs[k])
                    return where + ": output " + std::to_string(k) + " is " +
                           to_string(outs[k]) + ", direct expansion has " + to_string(*q);
            }

            if (tr.outputs_emitted == 50) {
                ++full_runs;
            } else if (c.starved) {
                if (tr.status != RunStatus::InputBudgetExhausted)
                    return where + ": stopped early with status " + name_of(tr.status);
                auto next = direct.next();
                if (!next) return where + ": direct expansion ended early";
                if (valuation(*next, p) >= Valuation(-cap))
                    return where + ": starved although the pending output only needs depth " +
                           std::to_string(-valuation(*next, p).finite());
                for (const EngineEvent& e : tr.events)
                    if (e.kind == EngineEvent::Kind::ConsumedInput &&
                        valuation(e.quotient, p) < Valuation(-cap))
                        return where + ": an input deeper than the proven cap arrived";
                ++starved_runs;
            } else {
                return where + ": " + std::to_string(tr.outputs_emitted) +
                       " outputs, status " + name_of(tr.status);
            }
            total_inputs += tr.inputs_consumed;
            g_moebius_cases.push_back({f, p, c.algo, D, branch, std::move(tr)});
        }
    }
    info = std::to_string(full_runs) + " full runs, " + std::to_string(starved_runs) +
           " provably starved on the periodic leg, " + std::to_string(total_inputs) + " inputs";
    return {};
}

// ---------------------------------------------------------------- check 4

std::string check_never_output(std::string& info) {
    Integer p(5);
    CFStream in = CFStream::from_periodic({Rational(1)}, {Rational(1, 5)}, p, Algorithm::Ruban);
    EngineOptions opt;
    opt.max_inputs = 10000;
    RunTrace tr = run_moebius({Rational(1), Rational(0), Rational(0), Rational(25)}, in, opt);
    if (tr.status != RunStatus::InputBudgetExhausted)
        return std::string("status is ") + name_of(tr.status);
    if (tr.outputs_emitted != 0)
        return std::to_string(tr.outputs_emitted) + " outputs were emitted";
    if (tr.inputs_consumed != 10000)
        return "consumed " + std::to_string(tr.inputs_consumed) + " inputs, expected 10000";
    if (tr.events.empty() || tr.events.back().kind != EngineEvent::Kind::InputBudgetExhausted)
        return "stall marker missing from the trace";
    info = "10000 inputs, 0 outputs, stall reported";
    return {};
}

// ---------------------------------------------------------------- check 5

std::string check_sqrt95_landmarks(std::string& info) {
    Integer p(13), D(95);
    const Rational a51(2599, 2197);    // 13^3
    const Rational a216(27212, 2197);  // 13^3
    const Rational a2540(177, 28561);  // 13^4
    auto [lo, hi] = sqrt_branches_mod_p(D, p);

    std::shared_ptr<SurdQuotientCache> matching;
    Integer residue;
    for (const Integer& b : {lo, hi}) {
        auto cache = std::make_shared<SurdQuotientCache>(QuadraticSurd{0, 1, 1, D, b}, p,
                                                         Algorithm::Ruban);
        if (cache->at(51) == a51) {
            matching = cache;
            residue = b;
            break;
        }
    }
    if (!matching) return "no branch yields a_51 = 2599/13^3";
    if (matching->at(216) != a216)
        return "a_216 is " + to_string(matching->at(216)) + ", expected 27212/13^3";
    if (matching->at(2540) != a2540)
        return "a_2540 is " + to_string(matching->at(2540)) + ", expected 177/13^4";
    info = "branch sqrt(95) = " + residue.get_str() + " mod 13";
    return {};
}

// ---------------------------------------------------------------- check 6

std::string check_floor_decision(std::string& info) {
    const Integer p(3);

    // Coefficients: zero and u * 3^e with unit u and valuation e in [-2, 2].
    std::vector<Rational> coeffs{Rational(0)};
    for (long u : {1L, 2L})
        for (long e = -2; e <= 2; ++e) {
            Rational c = Rational(u) * pow_p(p, e);
            c.canonicalize();
            coeffs.push_back(c);
        }

    // Completion tails: alpha = floor + tail with vp(tail) >= 1. The grid
    // covers every depth a distinguishing digit can sit at for this
    // coefficient range; negative tails exercise downward digit patterns.
    std::vector<Rational> grid{Rational(0)};
    for (long j = 1; j <= 10; ++j)
        for (long c : {1L, 2L}) {
            Rational t = Rational(c) * pow_p(p, j);
            t.canonicalize();
            grid.push_back(t);
        }
    for (long t : {-3L, -9L, -27L}) grid.push_back(Rational(t));

    size_t forced = 0, witnessed = 0, pinned_refusals = 0;
    for (DigitConvention conv : {DigitConvention::Ruban, DigitConvention::BrowkinS}) {
        PadicContext ctx(p, conv);
        std::vector<Rational> floors{Rational(0)};
        for (long r = 0; r <= 2; ++r)
            for (const Rational& a : reps_of_valuation(p, conv, r)) floors.push_back(a);

        for (const Rational& x : coeffs)
            for (const Rational& y : coeffs)
                for (const Rational& z : coeffs)
                    for (const Rational& t : coeffs) {
                        Moebius f{x, y, z, t};
                        if (f.determinant() == 0) continue;
                        for (const Rational& a : floors) {
                            FloorDecision d = decide_floor(f, a, ctx);

                            // Tails aimed at the two poles reach the floors a
                            // grid tail cannot.
                            std::vector<Rational> tails = grid;
                            for (const auto& row :
                                 {std::pair<const Rational&, const Rational&>(x, y),
                                  std::pair<const Rational&, const Rational&>(z, t)}) {
                                if (row.first == 0) continue;
                                Rational tau = Rational(-(row.first * a + row.second) / row.first);
                                tau.canonicalize();
                                if (tau != 0 && !(valuation(tau, p) >= Valuation(1))) continue;
                                tails.push_back(tau);
                                for (long j : {6L, 12L})
                                    for (long c : {1L, 2L})
                                        tails.push_back(
                                            Rational(tau + Rational(c) * pow_p(p, j)));
                            }

                            std::optional<Rational> first;
                            bool witness = false;
                            for (const Rational& tail : tails) {
                                Rational alpha = a + tail;
                                Rational den = f.z * alpha + f.t;
                                if (den == 0) continue;
                                Rational fl = floor_of(Rational((f.x * alpha + f.y) / den), ctx);
                                if (d.determinable) {
                                    if (fl != d.value) {
                                        std::ostringstream os;
                                        os << "forced verdict broken: (" << to_string(x) << ","
                                           << to_string(y) << "," << to_string(z) << ","
                                           << to_string(t) << ") at floor " << to_string(a)
                                           << ", tail " << to_string(tail) << " gives floor "
                                           << to_string(fl) << " != " << to_string(d.value);
                                        return os.str();
                                    }
                                } else if (!witness) {
                                    if (!first)
                                        first = fl;
                                    else if (fl != *first)
                                        witness = true;
                                }
                            }

                            if (d.determinable) {
                                ++forced;
                                continue;
                            }
                            // A refusal can be conservative: when the
                            // denominator row keeps valuation v2 on the whole
                            // completion ball (no carry past vp(z)), two
                            // completions differing at depth j map to values
                            // differing at depth vdet + j - 2*v2, so
                            // vdet >= 2*v2 pins the floor even though no
                            // digit of gamma is computable from the inputs.
                            // Otherwise a distinguishing pair must exist: at
                            // depth 2*v2 - vdet <= 8 for a stable denominator
                            // row, or toward the denominator pole otherwise.
                            bool den_carries = d.v2 >= valuation(f.z, p) + 1;
                            bool pinned =
                                !den_carries && valuation(f.determinant(), p) >=
                                                    Valuation(2 * d.v2.finite());
                            std::ostringstream os;
                            if (pinned && witness) {
                                os << "pinned refusal produced two floors: (";
                            } else if (!pinned && !witness) {
                                os << "refusal without witness: (";
                            } else {
                                pinned ? ++pinned_refusals : ++witnessed;
                                continue;
                            }
                            os << to_string(x) << "," << to_string(y) << "," << to_string(z)
                               << "," << to_string(t) << ") at floor " << to_string(a);
                            return os.str();
                        }
                    }
    }
    info = std::to_string(forced) + " forced, " + std::to_string(witnessed) + " witnessed, " +
           std::to_string(pinned_refusals) + " pinned refusals";
    return {};
}

// ---------------------------------------------------------------- check 7

std::string check_propagation(std::string& info) {
    const Integer p(3);

    auto enumerate_windows = [&](const PadicContext& ctx) {
        std::vector<PadicDigits> out;
        auto alphabet = digit_alphabet(p, ctx.convention());
        for (long s = -2; s <= 1; ++s)
            for (long L = 1; L <= 3; ++L) {
                std::vector<size_t> idx(static_cast<size_t>(L), 0);
                while (true) {
                    if (alphabet[idx[0]] != 0) {
                        PadicDigits w{p, ctx.convention(), s, {}};
                        for (long i = 0; i < L; ++i)
                            w.digits.push_back(Integer(alphabet[idx[static_cast<size_t>(i)]]));
                        out.push_back(std::move(w));
                    }
                    size_t pos = 0;
                    while (pos < idx.size()) {
                        if (++idx[pos] < alphabet.size()) break;
                        idx[pos] = 0;
                        ++pos;
                    }
                    if (pos == idx.size()) break;
                }
            }
        return out;
    };

    // Window value plus every tuple of `extra` further digits.
    auto completions_of = [&](const PadicDigits& w, long extra) {
        std::vector<Rational> out;
        auto alphabet = digit_alphabet(p, w.convention);
        Rational base = w.value();
        long e0 = w.start + w.length();
        std::vector<size_t> idx(static_cast<size_t>(extra), 0);
        while (true) {
            Rational v = base;
            for (long i = 0; i < extra; ++i)
                v += Rational(alphabet[idx[static_cast<size_t>(i)]]) * pow_p(p, e0 + i);
            v.canonicalize();
            out.push_back(v);
            size_t pos = 0;
            while (pos < idx.size()) {
                if (++idx[pos] < alphabet.size()) break;
                idx[pos] = 0;
                ++pos;
            }
            if (pos == idx.size()) break;
        }
        return out;
    };

    // The produced digits must agree with op(completion) through E, and the
    // claim must stop at E: some one-extra-digit pair differs at E exactly.
    auto verify = [&](const PropagationResult& r, long E, const Rational& known,
                      const std::vector<Rational>& exact_values,
                      const std::vector<std::pair<Rational, Rational>>& witness_pairs,
                      const char* op) -> std::string {
        if (r.count > 0) {
            if (r.window.start + r.count != E)
                return std::string(op) + ": claimed window ends at " +
                       std::to_string(r.window.start + r.count) + ", trust bound is " +
                       std::to_string(E);
            Rational claimed = r.window.value();
            for (const Rational& v : exact_values)
                if (valuation(Rational(v - claimed), p) < Valuation(E))
                    return std::string(op) + ": a completion contradicts a claimed digit";
        } else if (known != 0 && valuation(known, p) < Valuation(E)) {
            return std::string(op) + ": digits were dropped though the bound trusts them";
        }
        for (const auto& [v1, v2] : witness_pairs)
            if (valuation(Rational(v1 - v2), p) == Valuation(E)) return {};
        return std::string(op) + ": no completion pair differs at the first unclaimed digit";
    };

    size_t cases = 0;
    for (DigitConvention conv : {DigitConvention::Ruban, DigitConvention::BrowkinS}) {
        PadicContext ctx(p, conv);
        std::vector<PadicDigits> wins = enumerate_windows(ctx);

        struct Completed {
            const PadicDigits* w;
            std::vector<Rational> deep;   // two extra digits, for soundness
            std::vector<Rational> edge;   // one extra digit, for the witness
        };
        std::vector<Completed> cw;
        cw.reserve(wins.size());
        for (const PadicDigits& w : wins)
            cw.push_back({&w, completions_of(w, 2), completions_of(w, 1)});

        // Inversion.
        for (const Completed& c : cw) {
            long E = c.w->length() - c.w->start;
            std::vector<Rational> exact;
            exact.reserve(c.deep.size());
            for (const Rational& v : c.deep) exact.push_back(Rational(1 / v));
            std::vector<std::pair<Rational, Rational>> witness;
            for (size_t i = 0; i < c.edge.size(); ++i)
                for (size_t j = i + 1; j < c.edge.size(); ++j)
                    witness.emplace_back(Rational(1 / c.edge[i]), Rational(1 / c.edge[j]));
            PropagationResult r = invert_window(*c.w, ctx);
            std::string err = verify(r, E, Rational(1 / c.w->value()), exact, witness, "invert");
            if (!err.empty()) return err;
            ++cases;
        }

        // Product and sum over all window pairs.
        for (const Completed& ca : cw)
            for (const Completed& cb : cw) {
                Rational base_a = ca.w->value(), base_b = cb.w->value();
                std::vector<Rational> prod_exact, sum_exact;
                prod_exact.reserve(ca.deep.size() * cb.deep.size());
                sum_exact.reserve(ca.deep.size() * cb.deep.size());
                for (const Rational& va : ca.deep)
                    for (const Rational& vb : cb.deep) {
                        prod_exact.push_back(Rational(va * vb));
                        sum_exact.push_back(Rational(va + vb));
                    }
                std::vector<std::pair<Rational, Rational>> prod_w, sum_w;
                for (size_t i = 0; i < ca.edge.size(); ++i)
                    for (size_t j = i + 1; j < ca.edge.size(); ++j) {
                        prod_w.emplace_back(Rational(ca.edge[i] * base_b),
                                            Rational(ca.edge[j] * base_b));
                        sum_w.emplace_back(Rational(ca.edge[i] + base_b),
                                           Rational(ca.edge[j] + base_b));
                    }
                for (size_t i = 0; i < cb.edge.size(); ++i)
                    for (size_t j = i + 1; j < cb.edge.size(); ++j) {
                        prod_w.emplace_back(Rational(base_a * cb.edge[i]),
                                            Rational(base_a * cb.edge[j]));
                        sum_w.emplace_back(Rational(base_a + cb.edge[i]),
                                           Rational(base_a + cb.edge[j]));
                    }

                long Ep = ca.w->start + cb.w->start +
                          std::min(ca.w->length(), cb.w->length());
                PropagationResult rp = multiply_windows(*ca.w, *cb.w, ctx);
                std::string err =
                    verify(rp, Ep, Rational(base_a * base_b), prod_exact, prod_w, "multiply");
                if (!err.empty()) return err;

                long Es = std::min(ca.w->start + ca.w->length(), cb.w->start + cb.w->length());
                PropagationResult rs = add_windows(*ca.w, *cb.w, ctx);
                err = verify(rs, Es, Rational(base_a + base_b), sum_exact, sum_w, "add");
                if (!err.empty()) return err;
                cases += 2;
            }

        // Affine images with exactly known coefficients.
        std::vector<Rational> xs, ys{Rational(0)};
        for (long u : {1L, 2L})
            for (long e = -1; e <= 1; ++e) {
                Rational c = Rational(u) * pow_p(p, e);
                c.canonicalize();
                xs.push_back(c);
                ys.push_back(c);
            }
        for (const Completed& c : cw)
            for (const Rational& x : xs)
                for (const Rational& y : ys) {
                    long E = valuation(x, p).finite() + c.w->start + c.w->length();
                    std::vector<Rational> exact;
                    exact.reserve(c.deep.size());
                    for (const Rational& v : c.deep) exact.push_back(Rational(x * v + y));
                    std::vector<std::pair<Rational, Rational>> witness;
                    for (size_t i = 0; i < c.edge.size(); ++i)
                        for (size_t j = i + 1; j < c.edge.size(); ++j)
                            witness.emplace_back(Rational(x * c.edge[i] + y),
                                                 Rational(x * c.edge[j] + y));
                    PropagationResult r = affine_window(x, y, *c.w, ctx);
                    std::string err =
                        verify(r, E, Rational(x * c.w->value() + y), exact, witness, "affine");
                    if (!err.empty()) return err;
                    ++cases;
                }
    }
    info = std::to_string(cases) + " operator instances";
    return {};
}

// ---------------------------------------------------------------- check 8

std::string check_unique_bad_quotient(std::string& info) {
    std::mt19937_64 rng(481516);
    std::uniform_int_distribution<long> unit_draw(1, 500);
    std::uniform_int_distribution<long> vx_draw(-2, 2);
    std::uniform_int_distribution<long> r_draw(1, 3);
    std::uniform_int_distribution<int> sign_draw(0, 1);

    size_t instances = 0;
    for (long pl : {3L, 5L}) {
        Integer p(pl);
        auto unit = [&]() {
            long n = unit_draw(rng);
            while (n % pl == 0) n = unit_draw(rng);
            long d = unit_draw(rng);
            while (d % pl == 0) d = unit_draw(rng);
            Rational u(sign_draw(rng) ? n : -n, d);
            u.canonicalize();
            return u;
        };
        for (DigitConvention conv :
             {DigitConvention::Ruban, DigitConvention::BrowkinS, DigitConvention::BrowkinT}) {
            PadicContext ctx(p, conv);
            long extra = conv == DigitConvention::BrowkinT ? 0 : 1;
            for (int i = 0; i < 200; ++i) {
                long vx = vx_draw(rng);
                long r = r_draw(rng);
                Rational x = Rational(unit() * pow_p(p, vx));
                Rational y = Rational(unit() * pow_p(p, vx - r));
                x.canonicalize();
                y.canonicalize();

                Rational bad = unique_bad_quotient(x, y, ctx);
                Valuation threshold = valuation(x, p) + extra;
                std::vector<Rational> matches;
                for (const Rational& a : reps_of_valuation(p, conv, r))
                    if (valuation(Rational(x * a + y), p) >= threshold) matches.push_back(a);
                if (matches.size() != 1 || matches[0] != bad)
                    return "x=" + to_string(x) + " y=" + to_string(y) + " p=" +
                           std::to_string(pl) + ": " + std::to_string(matches.size()) +
                           " candidates cross the threshold, returned " + to_string(bad);
                ++instances;
            }
        }
    }
    info = std::to_string(instances) + " pairs, all unique";
    return {};
}

// ---------------------------------------------------------------- check 9

std::string check_bilinear_oracle(std::string& info) {
    std::mt19937_64 rng(271828);
    std::uniform_int_distribution<long> coeff(-50, 50);
    std::uniform_int_distribution<long> adraw(-30, 30), bdraw(-10, 10), cdraw(1, 10);
    std::uniform_int_distribution<long> qdraw(-9, 9), qden(1, 9);

    Integer p(7), D(2);
    auto [lo, hi] = sqrt_branches_mod_p(D, p);
    size_t total_inputs = 0;
    for (int trial = 0; trial < 50; ++trial) {
        // Ruban feeds: browkin1 expansions over this field are frequently
        // exactly periodic with every quotient at valuation -1, which starves
        // any transformed expansion that needs a deeper quotient (the same
        // forced stall the moebius check verifies on its periodic leg).
        Algorithm algo = Algorithm::Ruban;
        Integer branch = trial % 2 == 0 ? lo : hi;

        QuadExt alpha(0, 1, 1, D);
        QuadExt beta = alpha;
        Bilinear st{};
        while (true) {
            long b = bdraw(rng);
            while (b == 0) b = bdraw(rng);
            alpha = QuadExt(adraw(rng), b, cdraw(rng), D);
            long qn = qdraw(rng);
            while (qn == 0) qn = qdraw(rng);
            Rational q(qn, qden(rng)), r(qdraw(rng), qden(rng));
            q.canonicalize();
            r.canonicalize();
            beta = q * alpha + r;

            st = Bilinear{Rational(coeff(rng)), Rational(coeff(rng)), Rational(coeff(rng)),
                          Rational(coeff(rng)), Rational(coeff(rng)), Rational(coeff(rng)),
                          Rational(coeff(rng)), Rational(coeff(rng))};
            if (!rank_two(st)) continue;
            QuadExt ab = alpha * beta;
            QuadExt num = st.x * ab + st.y * alpha + st.z * beta + st.t;
            QuadExt den = st.e * ab + st.f * alpha + st.g * beta + st.h;
            if (den.is_zero() || num.is_zero()) continue;
            QuadExt gamma = num / den;
            if (gamma.is_rational()) continue;
            break;
        }

        std::string where = "trial " + std::to_string(trial) + " (" + name_of(algo) + ")";
        CFStream sa = CFStream::from_surd({alpha.A(), alpha.B(), alpha.C(), D, branch}, p, algo);
        CFStream sb = CFStream::from_surd({beta.A(), beta.B(), beta.C(), D, branch}, p, algo);
        EngineOptions opt;
        opt.max_inputs = 4000;
        opt.max_outputs = 30;
        RunTrace tr = run_bilinear(st, sa, sb, opt);
        if (tr.outputs_emitted != 30)
            return where + ": " + std::to_string(tr.outputs_emitted) + " outputs, status " +
                   name_of(tr.status);

        QuadExt ab = alpha * beta;
        QuadExt num = st.x * ab + st.y * alpha + st.z * beta + st.t;
        QuadExt den = st.e * ab + st.f * alpha + st.g * beta + st.h;
        QuadExt gamma = num / den;
        CFStream direct = CFStream::from_surd({gamma.A(), gamma.B(), gamma.C(), D, branch}, p,
                                              algo);
        std::vector<Rational> outs = outputs_of(tr);
        for (size_t k = 0; k < outs.size(); ++k) {
            auto q = direct.next();
            if (!q) return where + ": direct expansion ended early";
            if (*q != outs[k])
                return where + ": output " + std::to_string(k) + " is " + to_string(outs[k]) +
                       ", direct expansion has " + to_string(*q);
        }
        total_inputs += tr.inputs_consumed;
        g_bilinear_cases.push_back({st, p, algo, D, branch, alpha, beta, std::move(tr)});
    }
    info = "50 runs, " + std::to_string(total_inputs) + " inputs consumed";
    return {};
}

// ---------------------------------------------------------------- check 10

std::string check_metric_frequencies(std::string& info) {
    Integer p(3);
    const Rational y(1, 3);

    HaarSampler s1(p, 424243, 90);
    FrequencyReport value_rep =
        frequency_of_value(y, Algorithm::Ruban, s1, 30, 10000);
    if (!within_tolerance(value_rep.observed(), Rational(1, 9), Rational(3, 10)))
        return "value 1/3 frequency " + to_string(value_rep.observed()) +
               " outside 1/9 +- 30%";

    HaarSampler s2(p, 424244, 90);
    auto hist = valuation_histogram(Algorithm::Ruban, s2, 30, 10000, 1);
    if (!within_tolerance(hist[0].observed(), Rational(2, 3), Rational(1, 10)))
        return "class v=-1 frequency " + to_string(hist[0].observed()) + " outside 2/3 +- 10%";

    HaarSampler s3(p, 424245, 90);
    FrequencyReport mr_rep = frequency_of_value(y, Algorithm::MR, s3, 30, 10000);
    if (!within_tolerance(mr_rep.observed(), Rational(1, 3), Rational(3, 10)))
        return "odd-position 1/3 frequency " + to_string(mr_rep.observed()) +
               " outside 1/3 +- 30%";

    info = "1/3: " + to_string(value_rep.observed()) + ", v=-1: " +
           to_string(hist[0].observed()) + ", odd 1/3: " + to_string(mr_rep.observed());
    return {};
}

// ---------------------------------------------------------------- check 11

std::string replay_moebius(const MoebiusReplayCase& rc, size_t case_id) {
    std::string where = "moebius trace " + std::to_string(case_id);
    PadicContext ctx(rc.p, convention_for(rc.algo, 0));
    SqrtBranch branch(rc.D, rc.p, rc.branch);
    QuadExt alpha(0, 1, 1, rc.D);
    Moebius f = rc.f;
    QuadExt den0 = f.z * alpha + f.t;
    if (den0.is_zero()) return where + ": initial denominator vanishes";
    QuadExt gamma = (f.x * alpha + f.y) / den0;

    size_t inputs = 0, outputs = 0;
    for (size_t i = 0; i < rc.trace.events.size(); ++i) {
        const EngineEvent& e = rc.trace.events[i];
        switch (e.kind) {
            case EngineEvent::Kind::ConsumedInput: {
                if (e.index != inputs) return where + ": input indices out of order";
                if (e.quotient != quad_floor(alpha, ctx, branch))
                    return where + ": consumed quotient " + std::to_string(inputs) +
                           " differs from the tail floor";
                alpha = (alpha - e.quotient).inverse();
                f = input_transform(f, e.quotient);
                ++inputs;
                break;
            }
            case EngineEvent::Kind::EmittedOutput: {
                if (e.index != outputs) return where + ": output indices out of order";
                if (e.quotient != quad_floor(gamma, ctx, branch))
                    return where + ": emitted quotient " + std::to_string(outputs) +
                           " differs from floor(gamma)";
                gamma = (gamma - e.quotient).inverse();
                f = output_transform(f, e.quotient);
                ++outputs;
                break;
            }
            case EngineEvent::Kind::InputBudgetExhausted:
                break;
            default:
                return where + ": unexpected event kind in a surd-fed run";
        }
        QuadExt den = f.z * alpha + f.t;
        if (den.is_zero()) return where + ": replayed denominator vanished";
        if (!(gamma * den == f.x * alpha + f.y))
            return where + ": composition identity broken after event " + std::to_string(i);
    }
    if (inputs != rc.trace.inputs_consumed || outputs != rc.trace.outputs_emitted)
        return where + ": event counts disagree with the trace counters";
    return {};
}

std::string replay_bilinear(const BilinearReplayCase& rc, size_t case_id) {
    std::string where = "bilinear trace " + std::to_string(case_id);
    PadicContext ctx(rc.p, convention_for(rc.algo, 0));
    SqrtBranch branch(rc.D, rc.p, rc.branch);
    QuadExt alpha = rc.alpha, beta = rc.beta;
    Bilinear st = rc.st;

    auto rows = [&](QuadExt& num, QuadExt& den) {
        QuadExt ab = alpha * beta;
        num = st.x * ab + st.y * alpha + st.z * beta + st.t;
        den = st.e * ab + st.f * alpha + st.g * beta + st.h;
    };
    QuadExt num(0, 0, 1, rc.D), den(0, 0, 1, rc.D);
    rows(num, den);
    if (den.is_zero()) return where + ": initial denominator vanishes";
    QuadExt gamma = num / den;

    size_t a_in = 0, b_in = 0, outputs = 0;
    for (size_t i = 0; i < rc.trace.events.size(); ++i) {
        const EngineEvent& e = rc.trace.events[i];
        switch (e.kind) {
            case EngineEvent::Kind::ConsumedAlphaInput: {
                if (e.index != a_in) return where + ": alpha indices out of order";
                if (e.quotient != quad_floor(alpha, ctx, branch))
                    return where + ": alpha quotient " + std::to_string(a_in) +
                           " differs from the tail floor";
                alpha = (alpha - e.quotient).inverse();
                st = alpha_input(st, e.quotient);
                ++a_in;
                break;
            }
            case EngineEvent::Kind::ConsumedBetaInput: {
                if (e.index != b_in) return where + ": beta indices out of order";
                if (e.quotient != quad_floor(beta, ctx, branch))
                    return where + ": beta quotient " + std::to_string(b_in) +
                           " differs from the tail floor";
                beta = (beta - e.quotient).inverse();
                st = beta_input(st, e.quotient);
                ++b_in;
                break;
            }
            case EngineEvent::Kind::EmittedOutput: {
                if (e.index != outputs) return where + ": output indices out of order";
                if (e.quotient != quad_floor(gamma, ctx, branch))
                    return where + ": emitted quotient " + std::to_string(outputs) +
                           " differs from floor(gamma)";
                gamma = (gamma - e.quotient).inverse();
                st = bilinear_output(st, e.quotient);
                ++outputs;
                break;
            }
            case EngineEvent::Kind::InputBudgetExhausted:
                break;
            default:
                return where + ": unexpected event kind in a surd-fed run";
        }
        rows(num, den);
        if (den.is_zero()) return where + ": replayed denominator vanished";
        if (!(gamma * den == num))
            return where + ": composition identity broken after event " + std::to_string(i);
    }
    if (a_in + b_in != rc.trace.inputs_consumed || outputs != rc.trace.outputs_emitted)
        return where + ": event counts disagree with the trace counters";
    return {};
}

std::string check_trace_replay(std::string& info) {
    if (g_moebius_cases.empty() || g_bilinear_cases.empty())
        return "no traces were recorded by the oracle checks";
    size_t events = 0;
    for (size_t i = 0; i < g_moebius_cases.size(); ++i) {
        std::string err = replay_moebius(g_moebius_cases[i], i);
        if (!err.empty()) return err;
        events += g_moebius_cases[i].trace.events.size();
    }
    for (size_t i = 0; i < g_bilinear_cases.size(); ++i) {
        std::string err = replay_bilinear(g_bilinear_cases[i], i);
        if (!err.empty()) return err;
        events += g_bilinear_cases[i].trace.events.size();
    }
    info = std::to_string(g_moebius_cases.size() + g_bilinear_cases.size()) + " traces, " +
           std::to_string(events) + " events";
    g_moebius_cases.clear();
    g_bilinear_cases.clear();
    return {};
}

}  // namespace

int main() {
    std::printf("acceptance suite: exact p-adic continued fraction arithmetic\n");
    run_check(1, "ruban expansion of -p repeats (p^2-1)/p (p=5,7, 50 terms)", 1,
              check_minus_p);
    run_check(2, "browkin1 expansions of 500 rationals terminate and rebuild (p=3,5,13)", 30,
              check_browkin1_termination);
    run_check(3, "moebius engine equals direct surd expansion (100 matrices, 4 configs)", 120,
              check_moebius_oracle);
    run_check(4, "matched cycling input starves the engine honestly", 5, check_never_output);
    run_check(5, "deep ruban quotients of sqrt(95) at p=13 hit pinned values", 120,
              check_sqrt95_landmarks);
    run_check(6, "floor verdicts forced by completions, refusals witnessed (p=3)", 120,
              check_floor_decision);
    run_check(7, "digit windows propagate soundly and maximally (p=3)", 120, check_propagation);
    run_check(8, "exactly one quotient erases a row's valuation information", 30,
              check_unique_bad_quotient);
    run_check(9, "bilinear engine equals direct field arithmetic (50 matrices)", 180,
              check_bilinear_oracle);
    run_check(10, "haar-sampled quotient frequencies match the measure laws", 120,
              check_metric_frequencies);
    run_check(11, "trace replay keeps the composition identity at every event", 0,
              check_trace_replay);

    if (g_failures == 0) {
        std::printf("all 11 checks passed\n");
        return 0;
    }
    std::printf("%d check(s) failed\n", g_failures);
    return 1;
}
