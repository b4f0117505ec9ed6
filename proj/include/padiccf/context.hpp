#pragma once

#include <string>

#include "padiccf/rational.hpp"
#include "padiccf/valuation.hpp"

namespace padiccf {

// Which representative digits are used when writing a p-adic number as a
// digit series. Ruban draws digits from {0, ..., p-1}; both Browkin
// conventions draw from {-(p-1)/2, ..., (p-1)/2}. They differ in where the
// integer-part window ends: BrowkinS keeps digits up to exponent 0, BrowkinT
// only strictly negative exponents.
enum class DigitConvention { Ruban, BrowkinS, BrowkinT };

inline const char* name_of(DigitConvention c) {
    switch (c) {
        case DigitConvention::Ruban: return "ruban";
        case DigitConvention::BrowkinS: return "browkin-s";
        case DigitConvention::BrowkinT: return "browkin-t";
    }
    return "?";
}

// The ambient prime together with the digit convention in force. Only odd
// primes are supported: the balanced digit set needs (p-1)/2 on each side,
// and p = 2 is rejected up front.
class PadicContext {
   public:
    PadicContext(Integer p, DigitConvention convention)
        : p_(std::move(p)), convention_(convention) {
        if (p_ < 3 || mpz_probab_prime_p(p_.get_mpz_t(), 40) == 0)
            throw InvalidInput("p must be an odd prime >= 3, got " + p_.get_str());
    }

    const Integer& p() const { return p_; }
    DigitConvention convention() const { return convention_; }
    bool balanced() const { return convention_ != DigitConvention::Ruban; }

    // Largest digit magnitude on the positive side: p-1 for Ruban, (p-1)/2
    // balanced.
    Integer max_digit() const {
        return balanced() ? Integer((p_ - 1) / 2) : Integer(p_ - 1);
    }

    Valuation vp(const Rational& q) const { return valuation(q, p_); }

    Rational p_power(long e) const { return pow_p(p_, e); }

   private:
    Integer p_;
    DigitConvention convention_;
};

}  // namespace padiccf
