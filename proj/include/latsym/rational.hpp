#pragma once

#include <gmpxx.h>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace latsym {

/// Exact rational scalar. All exact-mode arithmetic goes through GMP.
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

inline bool fits_long(const Rational& q) {
    return is_integer(q) && q.get_num().fits_slong_p();
}

inline long to_long(const Rational& q) {
    if (!fits_long(q)) throw std::domain_error("rational is not a machine integer");
    return q.get_num().get_si();
}

/// q^e for integer e; throws on 0^negative.
inline Rational pow_rational(const Rational& base, long e) {
    if (e == 0) return Rational(1);
    if (base == 0 && e < 0) throw std::domain_error("zero raised to a negative power");
    mpz_class num = base.get_num(), den = base.get_den();
    unsigned long k = static_cast<unsigned long>(e < 0 ? -e : e);
    mpz_class pn, pd;
    mpz_pow_ui(pn.get_mpz_t(), num.get_mpz_t(), k);
    mpz_pow_ui(pd.get_mpz_t(), den.get_mpz_t(), k);
    Rational r = (e > 0) ? Rational(pn, pd) : Rational(pd, pn);
    r.canonicalize();
    return r;
}

/// Exact-ish conversion: numerator and denominator converted separately.
template <class F>
F to_floating(const Rational& q) {
    return static_cast<F>(q.get_num().get_d()) / static_cast<F>(q.get_den().get_d());
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

} // namespace latsym
