#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "padiccf/stream.hpp"

namespace padiccf {

// Draws truncations of Haar-uniform elements of p*Z_p: digits at exponents
// 1..depth, i.i.d. uniform on {0,...,p-1}. The measure is normalized so the
// whole of p*Z_p has mass 1, which is what the frequency laws below assume.
class HaarSampler {
  public:
    HaarSampler(const Integer& p, unsigned long seed, long depth)
        : p_(p), depth_(depth), rng_(seed) {
        if (depth < 1) throw InvalidInput("sampler depth must be at least 1");
        if (!p_.fits_ulong_p()) throw InvalidInput("sampler prime must fit a machine word");
        digit_ = std::uniform_int_distribution<unsigned long>(0, p_.get_ui() - 1);
    }

    const Integer& p() const { return p_; }
    long depth() const { return depth_; }

    Rational sample() {
        Integer acc = 0;
        Integer pw = p_;
        for (long n = 1; n <= depth_; ++n) {
            acc += Integer(digit_(rng_)) * pw;
            pw *= p_;
        }
        return Rational(acc);
    }

  private:
    Integer p_;
    long depth_;
    std::mt19937_64 rng_;
    std::uniform_int_distribution<unsigned long> digit_;
};

struct FrequencyReport {
    std::string target;  // the value y, or "v=-k" for a valuation class
    long k = 0;          // -v_p of the target value or class
    Rational expected;
    size_t hits = 0;
    size_t samples = 0;
    size_t positions = 0;  // counted quotient positions across all samples

    Rational observed() const {
        if (positions == 0) return Rational(0);
        Rational r{Integer(hits), Integer(positions)};
        r.canonicalize();
        return r;
    }
};

namespace detail {

// A depth-d sample is a rational stand-in for a Haar element, so only a
// prefix of its expansion is faithful. Each quotient consumes input digits,
// and a safety factor of 3 keeps the counted prefix inside the sampled one.
inline size_t faithful_quotients(size_t requested, long depth) {
    size_t cap = static_cast<size_t>(depth / 3);
    return std::min(requested, cap);
}

// First `count` partial quotients at positions >= 1 of one sample. The
// position-0 quotient is always 0 on p*Z_p and carries no information.
inline std::vector<Rational> sample_quotients(HaarSampler& sampler, Algorithm algo,
                                              size_t count) {
    CFStream s = CFStream::from_rational(sampler.sample(), sampler.p(), algo);
    std::vector<Rational> out;
    s.next();  // drop position 0
    while (out.size() < count) {
        auto q = s.next();
        if (!q) break;  // the truncation terminated early; count what exists
        out.push_back(*q);
    }
    return out;
}

}  // namespace detail

// Empirical frequency of the partial quotient value y at positions >= 1,
// against the law: a position carries y with probability p^(-2k) where
// k = -v_p(y), independently across positions. For the alternating-floor
// algorithm only odd positions are counted (those draw from the halved
// alphabet) and the law is p^(-2k+1).
inline FrequencyReport frequency_of_value(const Rational& y, Algorithm algo,
                                          HaarSampler& sampler, size_t quotients_per_sample,
                                          size_t num_samples) {
    const Integer& p = sampler.p();
    bool odd_only = algo == Algorithm::MR;
    PadicContext ctx(p, convention_for(algo, odd_only ? 1 : 2));
    if (!is_representative(y, ctx))
        throw InvalidInput("target value is not a legal partial quotient for this algorithm");
    Valuation vy = valuation(y, p);
    if (!(vy < Valuation(0)))
        throw InvalidInput("target value must have negative valuation");

    FrequencyReport rep;
    rep.target = y.get_str();
    rep.k = -vy.finite();
    rep.expected = pow_p(p, odd_only ? -2 * rep.k + 1 : -2 * rep.k);
    rep.samples = num_samples;
    size_t count = detail::faithful_quotients(quotients_per_sample, sampler.depth());
    for (size_t i = 0; i < num_samples; ++i) {
        std::vector<Rational> terms = detail::sample_quotients(sampler, algo, count);
        for (size_t j = 0; j < terms.size(); ++j) {
            if (odd_only && j % 2 != 0) continue;  // position j+1 must be odd
            ++rep.positions;
            if (terms[j] == y) ++rep.hits;
        }
    }
    return rep;
}

// Empirical frequency of each valuation class v_p(a_j) = -k for k = 1..k_max
// at positions >= 1. A class gathers (p-1)*p^k legal quotient values of
// measure p^(-2k) each, so the class -k appears with frequency (p-1)*p^(-k).
inline std::vector<FrequencyReport> valuation_histogram(Algorithm algo, HaarSampler& sampler,
                                                        size_t quotients_per_sample,
                                                        size_t num_samples, long k_max) {
    if (k_max < 1) throw InvalidInput("k_max must be at least 1");
    if (algo == Algorithm::MR)
        throw InvalidInput("the valuation histogram law covers the single-floor algorithms");
    const Integer& p = sampler.p();
    std::vector<FrequencyReport> reps(static_cast<size_t>(k_max));
    for (long k = 1; k <= k_max; ++k) {
        FrequencyReport& r = reps[static_cast<size_t>(k - 1)];
        r.target = "v=-" + std::to_string(k);
        r.k = k;
        r.expected = Rational(Integer(p - 1)) * pow_p(p, -k);
        r.samples = num_samples;
    }
    size_t count = detail::faithful_quotients(quotients_per_sample, sampler.depth());
    for (size_t i = 0; i < num_samples; ++i) {
        std::vector<Rational> terms = detail::sample_quotients(sampler, algo, count);
        for (const Rational& a : terms) {
            long k = -valuation(a, p).finite();
            for (FrequencyReport& r : reps) {
                ++r.positions;
                if (r.k == k) ++r.hits;
            }
        }
    }
    return reps;
}

}  // namespace padiccf
