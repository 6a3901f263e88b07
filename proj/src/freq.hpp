#pragma once
#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rational.hpp"
#include "symbols.hpp"

namespace stcg {

class Assignment;

// Rational linear combination of frequency symbols, no constant offset.
class FreqExpr {
public:
    using Entry = std::pair<SymId, Rational>;

    FreqExpr() = default;
    static FreqExpr symbol(SymId s, const Rational& c = Rational(1));

    bool is_zero() const { return terms_.empty(); }
    const std::vector<Entry>& terms() const { return terms_; }
    Rational coeff(SymId s) const;
    bool contains(SymId s) const;
    std::size_t size() const { return terms_.size(); }

    FreqExpr operator+(const FreqExpr& o) const;
    FreqExpr operator-(const FreqExpr& o) const;
    FreqExpr operator-() const;
    FreqExpr scaled(const Rational& c) const;
    FreqExpr& operator+=(const FreqExpr& o);
    FreqExpr without(SymId s) const;

    bool operator==(const FreqExpr& o) const;
    bool operator!=(const FreqExpr& o) const { return !(*this == o); }
    bool operator<(const FreqExpr& o) const;

    // Entries ordered by symbol name; first coefficient positive and all
    // coefficients coprime integers. Returns the scale c with *this = c * result.
    FreqExpr primitive(Rational* scale) const;
    // Sign flipped so the first entry by name is positive. Returns true if flipped.
    FreqExpr sign_normalized(bool* flipped) const;

    std::complex<double> eval(const Assignment& a) const;
    std::string str() const;
    void append_key(std::string& out) const;

private:
    std::vector<Entry> terms_;  // sorted by SymId, nonzero coefficients
};

using SymbolResolver = std::function<SymId(const std::string&)>;

// Grammar: signed rational multiples of symbols joined by + or -,
// e.g. "wc + wa", "-2*wp", "5/6*wd", "0".
FreqExpr parse_freq(const std::string& text, const SymbolResolver& resolve);

}  // namespace stcg
