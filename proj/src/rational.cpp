#include "rational.hpp"

#include <cctype>

#include "error.hpp"

namespace stcg {

Rational parse_decimal(const std::string& s) {
    std::string mant = s;
    long exp10 = 0;
    auto e = s.find_first_of("eE");
    if (e != std::string::npos) {
        mant = s.substr(0, e);
        try {
            exp10 = std::stol(s.substr(e + 1));
        } catch (...) {
            fail(ErrorKind::Parse, "bad exponent in number '" + s + "'");
        }
    }
    std::string digits;
    long frac = 0;
    bool dot = false;
    for (char c : mant) {
        if (c == '.') {
            if (dot) fail(ErrorKind::Parse, "bad number '" + s + "'");
            dot = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            digits += c;
            if (dot) ++frac;
        } else {
            fail(ErrorKind::Parse, "bad number '" + s + "'");
        }
    }
    if (digits.empty()) fail(ErrorKind::Parse, "bad number '" + s + "'");
    mpz_class num(digits, 10);
    mpz_class den = 1;
    long p = exp10 - frac;
    mpz_class ten = 10;
    mpz_class pw;
    mpz_pow_ui(pw.get_mpz_t(), ten.get_mpz_t(), static_cast<unsigned long>(p < 0 ? -p : p));
    if (p >= 0)
        num *= pw;
    else
        den = pw;
    Rational q(num, den);
    q.canonicalize();
    return q;
}

Rational binomial(long n, long k) {
    if (k < 0) return 0;
    Rational r = 1;
    for (long j = 0; j < k; ++j) r = r * Rational(n - j) / Rational(j + 1);
    return r;
}

Rational factorial(long n) {
    Rational r = 1;
    for (long j = 2; j <= n; ++j) r *= j;
    return r;
}

}  // namespace stcg
