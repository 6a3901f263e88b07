#pragma once
#include <gmpxx.h>

#include <string>

namespace stcg {

using Rational = mpq_class;

inline Rational rat(long n, long d = 1) {
    Rational q(n, d);
    q.canonicalize();
    return q;
}

inline std::string rat_str(const Rational& q) { return q.get_str(); }

inline double rat_double(const Rational& q) { return q.get_d(); }

inline bool rat_is_int(const Rational& q) { return q.get_den() == 1; }

// exact rational from a decimal literal such as "0.125", "3", "2.5e-3"
Rational parse_decimal(const std::string& s);

// binomial coefficient for integer (possibly negative) upper argument
Rational binomial(long n, long k);

Rational factorial(long n);

}  // namespace stcg
