#pragma once

// Exact integer/rational scalars. GMP supplies the representation; every
// algorithm layered on top keeps exactness end to end.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace motivic {

using Int = mpz_class;
using Rat = mpq_class;

inline Int ipow(const Int& base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline Int ipow(long base, unsigned long e) { return ipow(Int(base), e); }

// q^e for signed e, as a rational.
inline Rat rpow(const Rat& base, long e) {
    if (e >= 0) {
        Rat r;
        mpq_class b = base;
        mpz_pow_ui(r.get_num_mpz_t(), b.get_num_mpz_t(), (unsigned long)e);
        mpz_pow_ui(r.get_den_mpz_t(), b.get_den_mpz_t(), (unsigned long)e);
        r.canonicalize();
        return r;
    }
    if (base == 0) throw std::domain_error("rpow: zero base with negative exponent");
    Rat inv = Rat(base.get_den()) / Rat(base.get_num());
    return rpow(inv, -e);
}

inline Rat make_rat(long num, long den = 1) {
    if (den == 0) throw std::domain_error("make_rat: zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

// Canonical text form "num" or "num/den"; the JSON interfaces carry rationals
// as these strings so no precision is lost.
inline std::string rat_str(const Rat& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline Rat rat_parse(const std::string& s) {
    Rat r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("rat_parse: bad rational '" + s + "'");
    r.canonicalize();
    return r;
}

inline double to_double(const Rat& r) { return r.get_d(); }

inline long to_long(const Int& z) {
    if (!z.fits_slong_p()) throw std::overflow_error("to_long: out of range");
    return z.get_si();
}

}  // namespace motivic
