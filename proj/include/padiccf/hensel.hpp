#pragma once

#include <utility>

#include "padiccf/rational.hpp"
#include "padiccf/valuation.hpp"

namespace padiccf {

// The two square roots of D modulo an odd prime p, found by exhaustive
// residue search (p stays desk-sized here). Returned as {r, p-r} with
// r the smaller one. D must be a unit square mod p.
inline std::pair<Integer, Integer> sqrt_branches_mod_p(const Integer& D, const Integer& p) {
    Integer d;
    mpz_fdiv_r(d.get_mpz_t(), D.get_mpz_t(), p.get_mpz_t());
    if (d == 0) throw InvalidInput("D must be a unit modulo p (vp(D) = 0)");
    for (Integer r = 1; r <= (p - 1) / 2; ++r) {
        if ((r * r) % p == d) return {r, p - r};
    }
    throw InvalidInput("D = " + D.get_str() + " is not a quadratic residue modulo " + p.get_str());
}

// Lifts the chosen mod-p root of D to a root modulo p^K by Newton steps,
// doubling the precision each round: r <- r - (r^2 - D) / (2r).
inline Integer hensel_sqrt(const Integer& D, const Integer& p, long K, const Integer& branch) {
    if (K < 1) throw InvalidInput("hensel_sqrt: K must be >= 1");
    Integer r0;
    mpz_fdiv_r(r0.get_mpz_t(), branch.get_mpz_t(), p.get_mpz_t());
    if ((r0 * r0 - D) % p != 0 || r0 % p == 0)
        throw InvalidInput("branch residue is not a square root of D modulo p");

    Integer modulus = p;  // current precision p^k
    long k = 1;
    Integer r = r0;
    while (k < K) {
        long next = std::min(2 * k, K);
        Integer step;
        mpz_pow_ui(step.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(next));
        Integer inv2r;
        Integer two_r = 2 * r;
        if (mpz_invert(inv2r.get_mpz_t(), two_r.get_mpz_t(), step.get_mpz_t()) == 0)
            throw std::logic_error("hensel_sqrt: 2r not invertible");  // impossible for odd p
        r = r - (r * r - D) * inv2r;
        mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), step.get_mpz_t());
        modulus = step;
        k = next;
    }
    return r;
}

}  // namespace padiccf
