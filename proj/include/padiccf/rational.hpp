#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>

namespace padiccf {

// Exact arithmetic throughout: Integer is an arbitrary-precision integer,
// Rational a canonical fraction (gcd-reduced, positive denominator). GMP
// maintains both invariants after every arithmetic operation.
using Integer = mpz_class;
using Rational = mpq_class;

// Errors that correspond to malformed user input (CLI exit code 2).
struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Errors raised when an operation is asked for more digits than its inputs
// can support.
struct InsufficientPrecision : std::logic_error {
    using std::logic_error::logic_error;
};

// Division by zero discovered symbolically (e.g. an exact tail with zero
// denominator).
struct DivisionByZero : std::domain_error {
    using std::domain_error::domain_error;
};

// Parses "NUM" or "NUM/DEN" in base 10. Rejects zero denominators.
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) throw InvalidInput("empty rational literal");
    Rational q;
    if (q.set_str(text, 10) != 0)
        throw InvalidInput("malformed rational literal: " + text);
    if (q.get_den() == 0) throw InvalidInput("zero denominator: " + text);
    q.canonicalize();
    return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }
inline std::string to_string(const Integer& n) { return n.get_str(); }

}  // namespace padiccf
