#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "padiccf/context.hpp"
#include "padiccf/digits.hpp"
#include "padiccf/quadratic.hpp"
#include "padiccf/rational.hpp"
#include "padiccf/valuation.hpp"

namespace padiccf {

// The three expansion algorithms. Ruban uses the standard digit floor at
// every step; BrowkinI the balanced s-floor at every step; MR alternates
// s at even indices with the fractional-part floor t at odd indices.
enum class Algorithm { Ruban, BrowkinI, MR };

inline const char* name_of(Algorithm a) {
    switch (a) {
        case Algorithm::Ruban: return "ruban";
        case Algorithm::BrowkinI: return "browkin1";
        case Algorithm::MR: return "mr";
    }
    return "?";
}

inline Algorithm parse_algorithm(const std::string& s) {
    if (s == "ruban") return Algorithm::Ruban;
    if (s == "browkin1") return Algorithm::BrowkinI;
    if (s == "mr") return Algorithm::MR;
    throw InvalidInput("unknown algorithm: " + s + " (expected ruban, browkin1 or mr)");
}

// Digit convention used by an algorithm at quotient index n.
inline DigitConvention convention_for(Algorithm a, size_t n) {
    switch (a) {
        case Algorithm::Ruban: return DigitConvention::Ruban;
        case Algorithm::BrowkinI: return DigitConvention::BrowkinS;
        case Algorithm::MR:
            return n % 2 == 0 ? DigitConvention::BrowkinS : DigitConvention::BrowkinT;
    }
    throw std::logic_error("unreachable");
}

inline Rational floor_for(Algorithm a, size_t n, const Rational& q, const Integer& p) {
    switch (convention_for(a, n)) {
        case DigitConvention::Ruban: return floor_ruban(q, p);
        case DigitConvention::BrowkinS: return floor_s(q, p);
        case DigitConvention::BrowkinT: return floor_t(q, p);
    }
    throw std::logic_error("unreachable");
}

// Legality of a partial quotient at index n: it must lie in the algorithm's
// representative set, and away from index 0 its valuation is pinned negative
// (Ruban, BrowkinI, odd MR) or just nonzero (even MR, where the preceding
// t-step can leave a unit).
inline bool valid_quotient(Algorithm a, size_t n, const Rational& q, const Integer& p) {
    PadicContext ctx(p, convention_for(a, n));
    if (!is_representative(q, ctx)) return false;
    if (n == 0) return true;
    if (a == Algorithm::MR && n % 2 == 0) return q != 0;
    return valuation(q, p) < Valuation(0);
}

// What is known about the exact value of the not-yet-consumed suffix of a
// stream. Engines use this to distinguish "the numerator is symbolically
// zero" from "we cannot tell".
enum class TailKind { Unknown, RationalValue, IrrationalValue };

struct TailValue {
    TailKind kind = TailKind::Unknown;
    Rational value;  // meaningful only for RationalValue

    static TailValue unknown() { return {}; }
    static TailValue irrational() { return {TailKind::IrrationalValue, Rational(0)}; }
    static TailValue rational(Rational q) { return {TailKind::RationalValue, std::move(q)}; }
};

// A quadratic irrational (a + b*sqrt(D)) / c together with the p-adic
// embedding of sqrt(D) to use.
struct QuadraticSurd {
    Integer a, b, c;
    Integer D;
    Integer branch;  // residue of sqrt(D) mod p selecting the embedding

    QuadExt element() const { return QuadExt(a, b, c, D); }
};

namespace detail {

class QuotientSource {
   public:
    virtual ~QuotientSource() = default;
    // The next partial quotient, or nothing if the expansion has ended
    // exactly. The index of the produced quotient is tracked by the caller.
    virtual std::optional<Rational> produce() = 0;
    // Exact value of the suffix starting at the next produce() position.
    virtual TailValue tail() const { return TailValue::unknown(); }
    // For Ruban rational expansions: index of the first repeated complete
    // quotient once a cycle has been observed.
    virtual std::optional<size_t> cycle_index() const { return std::nullopt; }
};

class RationalSource final : public QuotientSource {
   public:
    RationalSource(Rational value, Integer p, Algorithm algo)
        : alpha_(std::move(value)), p_(std::move(p)), algo_(algo) {}

    std::optional<Rational> produce() override {
        if (finished_) return std::nullopt;
        if (algo_ == Algorithm::Ruban && !cycle_) {
            auto [it, fresh] = seen_.try_emplace(alpha_, n_);
            if (!fresh) cycle_ = it->second;
        }
        Rational a = floor_for(algo_, n_, alpha_, p_);
        if (alpha_ == a) {
            finished_ = true;
        } else {
            alpha_ = 1 / (alpha_ - a);
        }
        ++n_;
        return a;
    }

    TailValue tail() const override {
        if (finished_) return TailValue::unknown();
        return TailValue::rational(alpha_);
    }

    std::optional<size_t> cycle_index() const override { return cycle_; }

   private:
    Rational alpha_;
    Integer p_;
    Algorithm algo_;
    size_t n_ = 0;
    bool finished_ = false;
    std::map<Rational, size_t> seen_;
    std::optional<size_t> cycle_;
};

class SurdSource final : public QuotientSource {
   public:
    SurdSource(const QuadraticSurd& surd, const Integer& p, Algorithm algo)
        : alpha_(surd.element()),
          branch_(surd.D, p, surd.branch),
          p_(p),
          algo_(algo) {
        if (mpz_perfect_square_p(surd.D.get_mpz_t()))
            throw InvalidInput("D = " + surd.D.get_str() + " is a perfect square; use a rational");
        if (surd.b == 0)
            throw InvalidInput("surd with b = 0 is rational; use a rational input");
    }

    std::optional<Rational> produce() override {
        PadicContext ctx(p_, convention_for(algo_, n_));
        Rational a = quad_floor(alpha_, ctx, branch_);
        alpha_ = (alpha_ - a).inverse();
        ++n_;
        return a;
    }

    TailValue tail() const override { return TailValue::irrational(); }

    const QuadExt& state() const { return alpha_; }

   private:
    QuadExt alpha_;
    SqrtBranch branch_;
    Integer p_;
    Algorithm algo_;
    size_t n_ = 0;
};

class ListSource final : public QuotientSource {
   public:
    ListSource(std::vector<Rational> terms, const Integer& p, Algorithm algo)
        : terms_(std::move(terms)), p_(p), algo_(algo) {
        for (size_t i = 0; i < terms_.size(); ++i)
            if (!valid_quotient(algo_, i, terms_[i], p_))
                throw InvalidInput("quotient " + to_string(terms_[i]) + " at index " +
                                   std::to_string(i) + " is not a legal " +
                                   std::string(name_of(algo_)) + " partial quotient");
    }

    std::optional<Rational> produce() override {
        if (pos_ >= terms_.size()) return std::nullopt;
        return terms_[pos_++];
    }

    TailValue tail() const override {
        if (pos_ >= terms_.size()) return TailValue::unknown();
        // Backward evaluation of the finite remainder.
        Rational v = terms_.back();
        for (size_t i = terms_.size() - 1; i-- > pos_;) {
            if (v == 0) return TailValue::unknown();
            v = terms_[i] + 1 / v;
        }
        return TailValue::rational(v);
    }

   private:
    std::vector<Rational> terms_;
    Integer p_;
    Algorithm algo_;
    size_t pos_ = 0;
};

class PeriodicSource final : public QuotientSource {
   public:
    PeriodicSource(std::vector<Rational> pre, std::vector<Rational> period, const Integer& p,
                   Algorithm algo)
        : pre_(std::move(pre)), period_(std::move(period)), p_(p), algo_(algo) {
        if (period_.empty()) throw InvalidInput("periodic stream needs a nonempty period");
        // Validating two full turns of the period covers both MR parities.
        for (size_t i = 0; i < pre_.size() + 2 * period_.size(); ++i)
            if (!valid_quotient(algo_, i, at(i), p_))
                throw InvalidInput("quotient " + to_string(at(i)) + " at index " +
                                   std::to_string(i) + " is not a legal " +
                                   std::string(name_of(algo_)) + " partial quotient");
    }

    std::optional<Rational> produce() override { return at(pos_++); }

    TailValue tail() const override;

   private:
    const Rational& at(size_t i) const {
        if (i < pre_.size()) return pre_[i];
        return period_[(i - pre_.size()) % period_.size()];
    }

    std::vector<Rational> pre_, period_;
    Integer p_;
    Algorithm algo_;
    size_t pos_ = 0;
};

}  // namespace detail

// A lazily extended, shareable cache of the partial quotients of one surd
// expansion. Many engine runs over the same input reuse the work.
class SurdQuotientCache {
   public:
    SurdQuotientCache(const QuadraticSurd& surd, const Integer& p, Algorithm algo)
        : source_(surd, p, algo) {}

    const Rational& at(size_t i) {
        while (quotients_.size() <= i) quotients_.push_back(*source_.produce());
        return quotients_[i];
    }

    size_t computed() const { return quotients_.size(); }

   private:
    detail::SurdSource source_;
    std::vector<Rational> quotients_;
};

namespace detail {

class CachedSurdSource final : public QuotientSource {
   public:
    explicit CachedSurdSource(std::shared_ptr<SurdQuotientCache> cache)
        : cache_(std::move(cache)) {}

    std::optional<Rational> produce() override { return cache_->at(pos_++); }
    TailValue tail() const override { return TailValue::irrational(); }

   private:
    std::shared_ptr<SurdQuotientCache> cache_;
    size_t pos_ = 0;
};

}  // namespace detail

// A stream of partial quotients with one-quotient lookahead. The engines
// test predicates on the head quotient before deciding to consume it.
class CFStream {
   public:
    static CFStream from_rational(Rational value, const Integer& p, Algorithm algo) {
        // Callers may build the value from raw parts; exact comparison and
        // gmp arithmetic both need the canonical form.
        value.canonicalize();
        return CFStream(std::make_unique<detail::RationalSource>(std::move(value), p, algo), p,
                        algo, std::nullopt);
    }

    static CFStream from_surd(const QuadraticSurd& surd, const Integer& p, Algorithm algo) {
        return CFStream(std::make_unique<detail::SurdSource>(surd, p, algo), p, algo, surd.branch);
    }

    static CFStream from_list(std::vector<Rational> terms, const Integer& p, Algorithm algo) {
        for (Rational& q : terms) q.canonicalize();
        return CFStream(std::make_unique<detail::ListSource>(std::move(terms), p, algo), p, algo,
                        std::nullopt);
    }

    static CFStream from_periodic(std::vector<Rational> pre, std::vector<Rational> period,
                                  const Integer& p, Algorithm algo) {
        for (Rational& q : pre) q.canonicalize();
        for (Rational& q : period) q.canonicalize();
        return CFStream(
            std::make_unique<detail::PeriodicSource>(std::move(pre), std::move(period), p, algo),
            p, algo, std::nullopt);
    }

    static CFStream from_cache(std::shared_ptr<SurdQuotientCache> cache, const Integer& p,
                               Algorithm algo, std::optional<Integer> branch = std::nullopt) {
        return CFStream(std::make_unique<detail::CachedSurdSource>(std::move(cache)), p, algo,
                        std::move(branch));
    }

    // The next quotient without consuming it, or nullptr at exact end.
    const Rational* peek() {
        fill();
        return head_ ? &*head_ : nullptr;
    }

    std::optional<Rational> next() {
        fill();
        if (!head_) return std::nullopt;
        std::optional<Rational> out = std::move(head_);
        head_.reset();
        ++index_;
        return out;
    }

    // Index of the head quotient (the next one next() would return).
    size_t index() const { return index_; }

    bool exhausted() {
        fill();
        return !head_;
    }

    // Exact value of the remaining stream, head quotient included.
    TailValue tail_value() {
        fill();
        if (!head_) return TailValue::unknown();
        return head_tail_;
    }

    std::optional<size_t> cycle_index() const { return source_->cycle_index(); }

    const Integer& p() const { return p_; }
    Algorithm algorithm() const { return algo_; }
    const std::optional<Integer>& branch() const { return branch_; }

   private:
    CFStream(std::unique_ptr<detail::QuotientSource> src, Integer p, Algorithm algo,
             std::optional<Integer> branch)
        : source_(std::move(src)), p_(std::move(p)), algo_(algo), branch_(std::move(branch)) {}

    void fill() {
        if (head_ || done_) return;
        head_tail_ = source_->tail();
        head_ = source_->produce();
        if (!head_) done_ = true;
    }

    std::unique_ptr<detail::QuotientSource> source_;
    std::optional<Rational> head_;
    TailValue head_tail_;
    size_t index_ = 0;
    bool done_ = false;
    Integer p_;
    Algorithm algo_;
    std::optional<Integer> branch_;
};

// Numerators and denominators of the classical convergent recursion
// A_n = a_n A_(n-1) + A_(n-2), B_n likewise, seeded A_(-1) = 1, B_(-1) = 0.
struct Convergent {
    Rational A, B;
};

inline std::vector<Convergent> convergents(const std::vector<Rational>& quotients) {
    std::vector<Convergent> out;
    out.reserve(quotients.size());
    Rational a_prev = 1, b_prev = 0;  // index -1
    Rational a_cur, b_cur;
    bool first = true;
    for (const Rational& q : quotients) {
        if (first) {
            a_cur = q;
            b_cur = 1;
            first = false;
        } else {
            Rational a_next = q * a_cur + a_prev;
            Rational b_next = q * b_cur + b_prev;
            a_prev = a_cur;
            b_prev = b_cur;
            a_cur = a_next;
            b_cur = b_next;
        }
        out.push_back({a_cur, b_cur});
    }
    return out;
}

// Value of a finite continued fraction, via its last convergent.
inline Rational cf_value(const std::vector<Rational>& quotients) {
    if (quotients.empty()) throw InvalidInput("empty continued fraction");
    Convergent last = convergents(quotients).back();
    if (last.B == 0) throw DivisionByZero("continued fraction with vanishing denominator");
    return last.A / last.B;
}

// A finite look at one expansion, ready for serialization.
struct ExpansionResult {
    Integer p;
    Algorithm algo = Algorithm::Ruban;
    std::optional<Integer> branch;
    std::vector<Rational> terms;
    bool terminated = false;
    std::optional<size_t> nonterminating_cycle;
};

// Pulls up to `count` quotients from the stream.
inline ExpansionResult expand(CFStream& stream, size_t count) {
    ExpansionResult r;
    r.p = stream.p();
    r.algo = stream.algorithm();
    r.branch = stream.branch();
    for (size_t i = 0; i < count; ++i) {
        auto q = stream.next();
        if (!q) {
            r.terminated = true;
            break;
        }
        r.terms.push_back(std::move(*q));
    }
    r.nonterminating_cycle = stream.cycle_index();
    return r;
}

namespace detail {

inline TailValue PeriodicSource::tail() const {
    // The pure-periodic tail satisfies the quadratic C t^2 + (D - A) t = B
    // built from one alignment block of the period (two periods for MR when
    // the length is odd, so the s/t parity pattern repeats).
    size_t block = period_.size();
    if (algo_ == Algorithm::MR && block % 2 != 0) block *= 2;

    Rational ma = 1, mb = 0, mc = 0, md = 1;  // product of (q 1; 1 0)
    for (size_t i = 0; i < block; ++i) {
        const Rational& q = period_[i % period_.size()];
        Rational na = q * ma + mc, nb = q * mb + md;
        mc = ma;
        md = mb;
        ma = na;
        mb = nb;
    }

    // Integer coefficients of c2 t^2 + c1 t + c0 = 0.
    Rational r2 = mc, r1 = md - ma, r0 = -mb;
    Integer den = lcm(lcm(r2.get_den(), r1.get_den()), r0.get_den());
    Integer c2 = Rational(r2 * den).get_num();
    Integer c1 = Rational(r1 * den).get_num();
    Integer c0 = Rational(r0 * den).get_num();

    auto verify = [&](const Rational& t) -> bool {
        // A genuine tail reproduces the period when expanded.
        Rational x = t;
        for (size_t i = 0; i < block; ++i) {
            size_t idx = pre_.size() + i;
            const Rational& q = period_[i % period_.size()];
            if (floor_for(algo_, idx, x, p_) != q) return false;
            if (x == q) return false;
            x = 1 / (x - q);
        }
        return x == t;
    };

    std::optional<Rational> tail0;  // value at phase 0 of the period
    if (c2 == 0) {
        if (c1 == 0) return TailValue::unknown();
        Rational t(-c0, c1);
        t.canonicalize();
        if (verify(t)) tail0 = t;
    } else {
        Integer disc = c1 * c1 - 4 * c2 * c0;
        if (disc < 0 || !mpz_perfect_square_p(disc.get_mpz_t()))
            return TailValue::irrational();
        Integer root;
        mpz_sqrt(root.get_mpz_t(), disc.get_mpz_t());
        for (const Integer& num : {Integer(-c1 + root), Integer(-c1 - root)}) {
            Rational t(num, Integer(2 * c2));
            t.canonicalize();
            if (verify(t)) {
                tail0 = t;
                break;
            }
        }
    }
    if (!tail0) return TailValue::unknown();

    // Walk backward from the first phase-0 position at or after pos_.
    size_t target = pre_.size();
    if (pos_ > target) target += ((pos_ - target) + block - 1) / block * block;
    Rational v = *tail0;
    for (size_t i = target; i-- > pos_;) {
        if (v == 0) return TailValue::unknown();
        v = at(i) + 1 / v;
    }
    return TailValue::rational(v);
}

}  // namespace detail

}  // namespace padiccf
