#pragma once

#include <optional>

#include "padiccf/context.hpp"
#include "padiccf/digits.hpp"
#include "padiccf/hensel.hpp"
#include "padiccf/rational.hpp"
#include "padiccf/valuation.hpp"

namespace padiccf {

// An element (A + B*sqrt(D)) / C of the real quadratic field Q(sqrt(D)),
// held exactly: integer coordinates, gcd(A, B, C) = 1, C > 0. D is a fixed
// non-square so equality of coordinates is equality of numbers.
class QuadExt {
   public:
    QuadExt(Integer a, Integer b, Integer c, Integer d)
        : A_(std::move(a)), B_(std::move(b)), C_(std::move(c)), D_(std::move(d)) {
        if (C_ == 0) throw DivisionByZero("quadratic element with zero denominator");
        normalize();
    }

    static QuadExt from_rational(const Rational& q, const Integer& D) {
        return QuadExt(q.get_num(), 0, q.get_den(), D);
    }

    const Integer& A() const { return A_; }
    const Integer& B() const { return B_; }
    const Integer& C() const { return C_; }
    const Integer& D() const { return D_; }

    bool is_rational() const { return B_ == 0; }
    bool is_zero() const { return A_ == 0 && B_ == 0; }

    Rational as_rational() const {
        if (!is_rational()) throw std::logic_error("irrational element used as a rational");
        return Rational(A_, C_);
    }

    QuadExt operator+(const QuadExt& o) const {
        require_same_field(o);
        return QuadExt(A_ * o.C_ + o.A_ * C_, B_ * o.C_ + o.B_ * C_, C_ * o.C_, D_);
    }

    QuadExt operator-(const QuadExt& o) const {
        require_same_field(o);
        return QuadExt(A_ * o.C_ - o.A_ * C_, B_ * o.C_ - o.B_ * C_, C_ * o.C_, D_);
    }

    QuadExt operator*(const QuadExt& o) const {
        require_same_field(o);
        return QuadExt(A_ * o.A_ + B_ * o.B_ * D_, A_ * o.B_ + B_ * o.A_, C_ * o.C_, D_);
    }

    QuadExt inverse() const {
        // 1/u = conj(u) / norm(u); norm = A^2 - B^2 D is nonzero since D is
        // not a square.
        Integer norm = A_ * A_ - B_ * B_ * D_;
        if (norm == 0) throw DivisionByZero("inverse of zero quadratic element");
        return QuadExt(C_ * A_, -C_ * B_, norm, D_);
    }

    QuadExt operator/(const QuadExt& o) const { return *this * o.inverse(); }

    QuadExt operator-(const Rational& q) const {
        return QuadExt(A_ * q.get_den() - q.get_num() * C_, B_ * q.get_den(), C_ * q.get_den(), D_);
    }

    QuadExt operator+(const Rational& q) const { return *this - Rational(-q); }

    friend QuadExt operator*(const Rational& q, const QuadExt& u) {
        return QuadExt(u.A_ * q.get_num(), u.B_ * q.get_num(), u.C_ * q.get_den(), u.D_);
    }

    friend bool operator==(const QuadExt& a, const QuadExt& b) {
        return a.D_ == b.D_ && a.A_ == b.A_ && a.B_ == b.B_ && a.C_ == b.C_;
    }

   private:
    void require_same_field(const QuadExt& o) const {
        if (D_ != o.D_) throw std::logic_error("mixing elements of different quadratic fields");
    }

    void normalize() {
        if (C_ < 0) {
            A_ = -A_;
            B_ = -B_;
            C_ = -C_;
        }
        Integer g = gcd(gcd(A_, B_), C_);
        if (g > 1) {
            A_ /= g;
            B_ /= g;
            C_ /= g;
        }
    }

    Integer A_, B_, C_, D_;
};

// Identifies which p-adic embedding of sqrt(D) is meant: the root of x^2 = D
// in Z_p congruent to `residue` mod p. vp(D) must be 0 and D a residue.
struct SqrtBranch {
    Integer D;
    Integer residue;

    SqrtBranch(Integer d, const Integer& p, const Integer& r) : D(std::move(d)) {
        auto [lo, hi] = sqrt_branches_mod_p(D, p);
        Integer rr;
        mpz_fdiv_r(rr.get_mpz_t(), r.get_mpz_t(), p.get_mpz_t());
        if (rr != lo && rr != hi)
            throw InvalidInput("branch residue " + r.get_str() + " is not a root of " +
                               D.get_str() + " modulo " + p.get_str());
        residue = rr;
    }
};

// vp of A + B*sqrt(D) under the chosen embedding, computed exactly. When the
// coordinate valuations differ the smaller wins. When they tie at m, strip
// p^m; the reduced A' + B'*r is a unit unless the chosen branch cancels it,
// and in that case the norm identity vp(u) = vp(norm(u)) - vp(conj(u))
// applies with vp(conj(u)) = 0 (both branches cannot cancel for odd p).
inline Valuation quad_coordinate_valuation(const Integer& A, const Integer& B, const Integer& p,
                                           const SqrtBranch& branch) {
    if (A == 0 && B == 0) return Valuation::infinity();
    if (B == 0) return Valuation(integer_valuation(A, p));
    if (A == 0) return Valuation(integer_valuation(B, p));
    long va = integer_valuation(A, p);
    long vb = integer_valuation(B, p);
    if (va != vb) return Valuation(std::min(va, vb));
    Integer pa;
    mpz_pow_ui(pa.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(va));
    Integer a = A / pa, b = B / pa;
    if ((a + b * branch.residue) % p != 0) return Valuation(va);
    Integer norm = a * a - b * b * branch.D;
    return Valuation(va + integer_valuation(norm, p));
}

inline Valuation quad_valuation(const QuadExt& u, const Integer& p, const SqrtBranch& branch) {
    if (u.is_zero()) return Valuation::infinity();
    Valuation num = quad_coordinate_valuation(u.A(), u.B(), p, branch);
    return Valuation(num.finite() - integer_valuation(u.C(), p));
}

// Digits of (A + B*sqrt(D))/C from its valuation, exact: one Hensel lift at
// a precision chosen from the (already exact) valuation, then the same
// modular digit extraction as for rationals.
inline PadicDigits quad_digits(const QuadExt& u, const PadicContext& ctx, const SqrtBranch& branch,
                               long count) {
    PadicDigits w{ctx.p(), ctx.convention(), 0, {}};
    if (u.is_zero() || count <= 0) return w;
    if (u.is_rational()) return digits_of_rational(u.as_rational(), ctx, count);

    const Integer& p = ctx.p();
    long vnum = quad_coordinate_valuation(u.A(), u.B(), p, branch).finite();
    long vden = integer_valuation(u.C(), p);

    long K = vnum + count;
    if (K < 1) K = 1;
    Integer root = hensel_sqrt(branch.D, p, K, branch.residue);
    Integer modulus;
    mpz_pow_ui(modulus.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(K));

    Integer N = u.A() + u.B() * root;  // = numerator mod p^K, with vp = vnum < K
    mpz_fdiv_r(N.get_mpz_t(), N.get_mpz_t(), modulus.get_mpz_t());
    Integer strip;
    long check = static_cast<long>(mpz_remove(strip.get_mpz_t(), N.get_mpz_t(), p.get_mpz_t()));
    // N is congruent to the true numerator modulo p^K and the true valuation
    // vnum is below K, so the residue's valuation must agree exactly.
    if (check != vnum) throw std::logic_error("quad_digits: valuation disagreement");

    Integer small_mod;
    mpz_pow_ui(small_mod.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(count));
    Integer den_unit = u.C() / pow_p(p, vden).get_num();
    Integer den_inv;
    if (mpz_invert(den_inv.get_mpz_t(), den_unit.get_mpz_t(), small_mod.get_mpz_t()) == 0)
        throw std::logic_error("quad_digits: denominator unit not invertible");
    Integer unit = strip * den_inv;
    mpz_fdiv_r(unit.get_mpz_t(), unit.get_mpz_t(), small_mod.get_mpz_t());

    w.start = vnum - vden;
    w.digits = detail::standard_digits(unit, p, count);
    if (ctx.balanced()) detail::balance_digits(w.digits, p);
    return w;
}

// The integer-part map of a quadratic element under the context convention:
// sum of the digits from the valuation up to exponent 0 (-1 for BrowkinT).
inline Rational quad_floor(const QuadExt& u, const PadicContext& ctx, const SqrtBranch& branch) {
    if (u.is_zero()) return Rational(0);
    if (u.is_rational()) return floor_of(u.as_rational(), ctx);
    long top = ctx.convention() == DigitConvention::BrowkinT ? -1 : 0;
    Valuation v = quad_valuation(u, ctx.p(), branch);
    if (v > Valuation(top)) return Rational(0);
    long count = top - v.finite() + 1;
    return quad_digits(u, ctx, branch, count).value();
}

}  // namespace padiccf
