#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include <gmpxx.h>

#include "error.hpp"

namespace germ_radius {

using Rational = mpq_class;
using Integer = mpz_class;

/// p/q in lowest terms (mpq_class(p, q) alone does not canonicalize).
inline Rational make_rational(long p, long q = 1) {
    if (q == 0) throw InputError("rational", "zero denominator");
    Rational r(p, 1);
    r /= Rational(q, 1);
    return r;
}

/// Canonical lowest-terms text: "p/q", or "p" for integers.
inline std::string to_string(const Rational& q) {
    Rational c(q);
    c.canonicalize();
    return c.get_str();
}

/// Accepts "p", "-p", "+p", "p/q"; rejects anything else (decimals, blanks, q = 0).
inline Rational parse_rational(std::string_view text) {
    auto fail = [&](const std::string& why) -> Rational {
        throw InputError("rational", "invalid rational literal '" + std::string(text) + "': " + why);
    };
    if (text.empty()) return fail("empty");
    std::size_t pos = 0;
    bool negative = false;
    if (text[0] == '+' || text[0] == '-') {
        negative = text[0] == '-';
        pos = 1;
    }
    auto digits = [&](std::size_t from) {
        std::size_t end = from;
        while (end < text.size() && text[end] >= '0' && text[end] <= '9') ++end;
        return end;
    };
    std::size_t num_end = digits(pos);
    if (num_end == pos) return fail("missing numerator digits");
    Integer num(std::string(text.substr(pos, num_end - pos)));
    Integer den(1);
    if (num_end != text.size()) {
        if (text[num_end] != '/') return fail("unexpected character");
        std::size_t den_end = digits(num_end + 1);
        if (den_end == num_end + 1 || den_end != text.size()) return fail("malformed denominator");
        den = Integer(std::string(text.substr(num_end + 1, den_end - num_end - 1)));
        if (den == 0) return fail("zero denominator");
    }
    Rational q(negative ? Integer(-num) : num, den);
    q.canonicalize();
    return q;
}

/// Natural log of |z| for z != 0, safe for magnitudes far outside double range.
inline double log_abs(const Integer& z) {
    long exponent = 0;
    double mantissa = mpz_get_d_2exp(&exponent, z.get_mpz_t());
    return std::log(std::fabs(mantissa)) + static_cast<double>(exponent) * std::log(2.0);
}

inline double log_abs(const Rational& q) {
    return log_abs(q.get_num()) - log_abs(q.get_den());
}

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

/// q^e for a natural exponent, exact.
inline Rational pow(const Rational& q, unsigned e) {
    Integer num, den;
    mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), e);
    mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), e);
    // q is canonical, so its powers are too.
    return Rational(num, den);
}

inline Integer factorial(unsigned k) {
    Integer out;
    mpz_fac_ui(out.get_mpz_t(), k);
    return out;
}

} // namespace germ_radius
