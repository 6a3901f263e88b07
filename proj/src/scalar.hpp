#pragma once
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "assignment.hpp"
#include "filter_spec.hpp"
#include "freq.hpp"
#include "rational.hpp"

namespace stcg {

// Gaussian rational re + i*im.
struct Coef {
    Rational re, im;

    Coef() = default;
    Coef(const Rational& r) : re(r), im(0) {}
    Coef(const Rational& r, const Rational& i) : re(r), im(i) {}

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_one() const { return re == 1 && im == 0; }
    Coef operator+(const Coef& o) const { return {re + o.re, im + o.im}; }
    Coef operator-(const Coef& o) const { return {re - o.re, im - o.im}; }
    Coef operator-() const { return {-re, -im}; }
    Coef operator*(const Coef& o) const { return {re * o.re - im * o.im, re * o.im + im * o.re}; }
    Coef conj() const { return {re, -im}; }
    Coef inverse() const;
    Coef pow(int p) const;
    bool operator==(const Coef& o) const { return re == o.re && im == o.im; }
    std::complex<double> value() const { return {rat_double(re), rat_double(im)}; }
    std::string str() const;
};

enum class AtomKind : std::uint8_t { Sym, Lin, Gauss, Table };

struct Atom {
    AtomKind kind = AtomKind::Sym;
    SymId sym = 0;
    bool conj = false;  // complex symbol conjugate
    FreqExpr lin;       // Lin: primitive form with >= 2 symbols; Gauss/Table: filter argument
};

using AtomId = std::uint32_t;
AtomId intern_atom(const Atom& a);
const Atom& atom_of(AtomId id);

using Monomial = std::vector<std::pair<AtomId, int>>;  // sorted by atom id, nonzero powers

struct EvalContext {
    const Assignment& assign;
    const FilterSpec* filter = nullptr;
};

enum class RenderStyle { Parse, Pretty };

class ScalarExpr {
public:
    using TermMap = std::map<Monomial, Coef>;

    ScalarExpr() = default;
    ScalarExpr(const Rational& q);
    ScalarExpr(long n) : ScalarExpr(Rational(n)) {}
    ScalarExpr(const Coef& c);

    static ScalarExpr imag();
    static ScalarExpr sym(SymId s, int power = 1);
    static ScalarExpr conj_sym(SymId s, int power = 1);
    // L^power; symbol powers when L has a single symbol; error if L is zero and power < 0.
    static ScalarExpr lin(const FreqExpr& L, int power = 1);
    static ScalarExpr filter(FilterKind kind, const FreqExpr& L);
    static ScalarExpr atom_power(AtomId a, int power);

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    Coef constant_value() const;
    std::size_t size() const { return terms_.size(); }
    const TermMap& terms() const { return terms_; }

    ScalarExpr operator+(const ScalarExpr& o) const;
    ScalarExpr operator-(const ScalarExpr& o) const;
    ScalarExpr operator-() const;
    ScalarExpr operator*(const ScalarExpr& o) const;
    ScalarExpr& operator+=(const ScalarExpr& o);
    ScalarExpr& operator-=(const ScalarExpr& o);
    ScalarExpr& operator*=(const ScalarExpr& o) { return *this = *this * o; }
    ScalarExpr scaled(const Coef& c) const;
    ScalarExpr pow(int p) const;
    ScalarExpr conj() const;

    bool structurally_equal(const ScalarExpr& o) const;

    std::complex<double> eval(const EvalContext& ctx) const;
    std::complex<double> eval(const Assignment& a, const FilterSpec* f = nullptr) const {
        return eval(EvalContext{a, f});
    }

    bool depends_on(SymId s) const;
    std::set<SymId> free_symbols() const;
    bool has_filter_atoms() const;

    // Sum of real-symbol degree-one monomials with real rational coefficients.
    bool as_linear(FreqExpr* out) const;

    // Coefficients of x^n for all n <= upto (Laurent part included).
    std::map<int, ScalarExpr> laurent(SymId x, int upto) const;
    ScalarExpr coefficient_at(SymId x, int order) const;

    ScalarExpr pruned(const std::function<bool(const Atom&)>& drop_atom) const;

    std::string str(RenderStyle style = RenderStyle::Parse) const;

private:
    void add_term(const Monomial& m, const Coef& c);
    TermMap terms_;
};

Monomial monomial_mul(const Monomial& a, const Monomial& b);

// Expansion coefficients of the Gaussian derivatives:
// d^n/dx^n e^{-x^2 tau^2/2} = e^{-x^2 tau^2/2} sum_k c(n,k) tau^{2(n-k)} x^{n-2k}.
Rational gaussian_expansion_c(int n, int k);

}  // namespace stcg
