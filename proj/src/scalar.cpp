#include "scalar.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "error.hpp"

namespace stcg {

Coef Coef::inverse() const {
    Rational n = re * re + im * im;
    if (n == 0) fail(ErrorKind::Division, "inverse of zero constant");
    return {re / n, -im / n};
}

Coef Coef::pow(int p) const {
    Coef base = p < 0 ? inverse() : *this;
    Coef r(Rational(1));
    for (int k = 0; k < std::abs(p); ++k) r = r * base;
    return r;
}

std::string Coef::str() const {
    if (im == 0) return rat_str(re);
    std::string ims = (abs(im) == 1 ? std::string() : rat_str(abs(im)) + "*") + "i";
    if (re == 0) return (im < 0 ? "-" : "") + ims;
    return "(" + rat_str(re) + (im < 0 ? " - " : " + ") + ims + ")";
}

namespace {

struct AtomTable {
    std::shared_mutex mu;
    std::deque<Atom> atoms;
    std::unordered_map<std::string, AtomId> by_key;
};

AtomTable& atoms() {
    static AtomTable t;
    return t;
}

std::string atom_key(const Atom& a) {
    std::string k;
    k += static_cast<char>('0' + static_cast<int>(a.kind));
    k += '|';
    k += std::to_string(a.sym);
    k += a.conj ? "*|" : "|";
    a.lin.append_key(k);
    return k;
}

Rational rat_pow(const Rational& c, int p) {
    Rational r = 1;
    for (int k = 0; k < std::abs(p); ++k) r *= c;
    if (p < 0) {
        if (r == 0) fail(ErrorKind::Division, "zero to a negative power");
        r = 1 / r;
    }
    return r;
}

}  // namespace

AtomId intern_atom(const Atom& a) {
    AtomTable& t = atoms();
    std::string key = atom_key(a);
    {
        std::shared_lock lk(t.mu);
        auto it = t.by_key.find(key);
        if (it != t.by_key.end()) return it->second;
    }
    std::unique_lock lk(t.mu);
    auto it = t.by_key.find(key);
    if (it != t.by_key.end()) return it->second;
    AtomId id = static_cast<AtomId>(t.atoms.size());
    t.atoms.push_back(a);
    t.by_key.emplace(std::move(key), id);
    return id;
}

const Atom& atom_of(AtomId id) {
    AtomTable& t = atoms();
    std::shared_lock lk(t.mu);
    return t.atoms.at(id);
}

Monomial monomial_mul(const Monomial& a, const Monomial& b) {
    Monomial r;
    r.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            r.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            r.push_back(b[j++]);
        } else {
            int p = a[i].second + b[j].second;
            if (p != 0) r.emplace_back(a[i].first, p);
            ++i;
            ++j;
        }
    }
    return r;
}

ScalarExpr::ScalarExpr(const Rational& q) {
    if (q != 0) terms_.emplace(Monomial{}, Coef(q));
}

ScalarExpr::ScalarExpr(const Coef& c) {
    if (!c.is_zero()) terms_.emplace(Monomial{}, c);
}

ScalarExpr ScalarExpr::imag() { return ScalarExpr(Coef(Rational(0), Rational(1))); }

ScalarExpr ScalarExpr::atom_power(AtomId a, int power) {
    ScalarExpr e;
    if (power == 0) return ScalarExpr(1);
    e.terms_.emplace(Monomial{{a, power}}, Coef(Rational(1)));
    return e;
}

ScalarExpr ScalarExpr::sym(SymId s, int power) {
    Atom a;
    a.kind = AtomKind::Sym;
    a.sym = s;
    return atom_power(intern_atom(a), power);
}

ScalarExpr ScalarExpr::conj_sym(SymId s, int power) {
    if (symbol_info(s).real) return sym(s, power);
    Atom a;
    a.kind = AtomKind::Sym;
    a.sym = s;
    a.conj = true;
    return atom_power(intern_atom(a), power);
}

ScalarExpr ScalarExpr::lin(const FreqExpr& L, int power) {
    if (power == 0) return ScalarExpr(1);
    if (L.is_zero()) {
        if (power < 0) fail(ErrorKind::Division, "reciprocal of a symbolically zero frequency");
        return ScalarExpr();
    }
    if (L.size() == 1) {
        const auto& [s, c] = L.terms().front();
        return sym(s, power).scaled(Coef(rat_pow(c, power)));
    }
    Rational scale;
    FreqExpr P = L.primitive(&scale);
    Atom a;
    a.kind = AtomKind::Lin;
    a.lin = P;
    return atom_power(intern_atom(a), power).scaled(Coef(rat_pow(scale, power)));
}

ScalarExpr ScalarExpr::filter(FilterKind kind, const FreqExpr& L) {
    if (L.is_zero()) return ScalarExpr(1);
    Atom a;
    if (kind == FilterKind::Gaussian) {
        a.kind = AtomKind::Gauss;
        a.lin = L.sign_normalized(nullptr);
    } else {
        a.kind = AtomKind::Table;
        a.lin = L;
    }
    return atom_power(intern_atom(a), 1);
}

bool ScalarExpr::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Coef ScalarExpr::constant_value() const {
    if (terms_.empty()) return Coef();
    if (!is_constant()) fail(ErrorKind::Validation, "expression is not constant: " + str());
    return terms_.begin()->second;
}

void ScalarExpr::add_term(const Monomial& m, const Coef& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(m, c);
        return;
    }
    it->second = it->second + c;
    if (it->second.is_zero()) terms_.erase(it);
}

ScalarExpr& ScalarExpr::operator+=(const ScalarExpr& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

ScalarExpr& ScalarExpr::operator-=(const ScalarExpr& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

ScalarExpr ScalarExpr::operator+(const ScalarExpr& o) const {
    ScalarExpr r = *this;
    r += o;
    return r;
}

ScalarExpr ScalarExpr::operator-(const ScalarExpr& o) const {
    ScalarExpr r = *this;
    r -= o;
    return r;
}

ScalarExpr ScalarExpr::operator-() const {
    ScalarExpr r = *this;
    for (auto& [m, c] : r.terms_) c = -c;
    return r;
}

ScalarExpr ScalarExpr::operator*(const ScalarExpr& o) const {
    ScalarExpr r;
    if (terms_.empty() || o.terms_.empty()) return r;
    for (const auto& [m1, c1] : terms_)
        for (const auto& [m2, c2] : o.terms_) r.add_term(monomial_mul(m1, m2), c1 * c2);
    return r;
}

ScalarExpr ScalarExpr::scaled(const Coef& c) const {
    if (c.is_zero()) return ScalarExpr();
    ScalarExpr r = *this;
    for (auto& [m, k] : r.terms_) k = k * c;
    return r;
}

ScalarExpr ScalarExpr::pow(int p) const {
    if (p == 0) return ScalarExpr(1);
    if (terms_.size() == 1) {
        const auto& [m, c] = *terms_.begin();
        Monomial mp = m;
        for (auto& e : mp) e.second *= p;
        ScalarExpr r;
        r.terms_.emplace(mp, c.pow(p));
        return r;
    }
    if (terms_.empty()) {
        if (p < 0) fail(ErrorKind::Division, "zero to a negative power");
        return ScalarExpr();
    }
    FreqExpr L;
    if (as_linear(&L)) return lin(L, p);
    if (p < 0) fail(ErrorKind::Division, "cannot invert a sum that is not a linear frequency form: " + str());
    ScalarExpr r(1);
    for (int k = 0; k < p; ++k) r = r * *this;
    return r;
}

ScalarExpr ScalarExpr::conj() const {
    ScalarExpr r;
    for (const auto& [m, c] : terms_) {
        Monomial mc;
        mc.reserve(m.size());
        for (const auto& [aid, p] : m) {
            const Atom& a = atom_of(aid);
            if (a.kind == AtomKind::Sym && !symbol_info(a.sym).real) {
                Atom b = a;
                b.conj = !a.conj;
                mc.emplace_back(intern_atom(b), p);
            } else {
                mc.emplace_back(aid, p);
            }
        }
        std::sort(mc.begin(), mc.end());
        // merge equal ids
        Monomial merged;
        for (const auto& e : mc) {
            if (!merged.empty() && merged.back().first == e.first) {
                merged.back().second += e.second;
                if (merged.back().second == 0) merged.pop_back();
            } else {
                merged.push_back(e);
            }
        }
        r.add_term(merged, c.conj());
    }
    return r;
}

bool ScalarExpr::structurally_equal(const ScalarExpr& o) const { return (*this - o).is_zero(); }

namespace {

std::complex<double> atom_value(const Atom& a, const EvalContext& ctx) {
    switch (a.kind) {
        case AtomKind::Sym: {
            auto v = ctx.assign.get(a.sym);
            return a.conj ? std::conj(v) : v;
        }
        case AtomKind::Lin:
            return a.lin.eval(ctx.assign);
        case AtomKind::Gauss: {
            auto x = a.lin.eval(ctx.assign);
            double tau;
            if (ctx.assign.has(sym_tau()))
                tau = ctx.assign.get(sym_tau()).real();
            else if (ctx.filter && ctx.filter->tau)
                tau = *ctx.filter->tau;
            else
                fail(ErrorKind::UnresolvedSymbol, "no value for symbol 'tau'");
            return std::exp(-x * x * tau * tau / 2.0);
        }
        case AtomKind::Table: {
            if (!ctx.filter || ctx.filter->kind != FilterKind::CustomTable)
                fail(ErrorKind::UnsupportedFilter, "tabulated filter atom evaluated without its table");
            auto x = a.lin.eval(ctx.assign);
            return ctx.filter->eval(x.real(), 0.0);
        }
    }
    return 0;
}

}  // namespace

std::complex<double> ScalarExpr::eval(const EvalContext& ctx) const {
    std::unordered_map<AtomId, std::complex<double>> cache;
    std::complex<double> total = 0;
    for (const auto& [m, c] : terms_) {
        std::complex<double> v = c.value();
        for (const auto& [aid, p] : m) {
            auto it = cache.find(aid);
            if (it == cache.end()) it = cache.emplace(aid, atom_value(atom_of(aid), ctx)).first;
            std::complex<double> x = it->second;
            if (p < 0 && x == 0.0) {
                const Atom& a = atom_of(aid);
                std::string what = a.kind == AtomKind::Sym ? symbol_name(a.sym) : a.lin.str();
                fail(ErrorKind::Division, "reciprocal of numerically zero value '" + what + "'");
            }
            if (p == 1)
                v *= x;
            else if (p == -1)
                v /= x;
            else if (p > 0) {
                std::complex<double> y = 1;
                for (int k = 0; k < p; ++k) y *= x;
                v *= y;
            } else {
                std::complex<double> y = 1;
                for (int k = 0; k < -p; ++k) y *= x;
                v /= y;
            }
        }
        total += v;
    }
    return total;
}

bool ScalarExpr::depends_on(SymId s) const {
    for (const auto& [m, c] : terms_)
        for (const auto& [aid, p] : m) {
            const Atom& a = atom_of(aid);
            if (a.kind == AtomKind::Sym ? a.sym == s : a.lin.contains(s)) return true;
            if (a.kind == AtomKind::Gauss && s == sym_tau()) return true;
        }
    return false;
}

std::set<SymId> ScalarExpr::free_symbols() const {
    std::set<SymId> out;
    for (const auto& [m, c] : terms_)
        for (const auto& [aid, p] : m) {
            const Atom& a = atom_of(aid);
            if (a.kind == AtomKind::Sym) {
                out.insert(a.sym);
            } else {
                for (const auto& e : a.lin.terms()) out.insert(e.first);
                if (a.kind == AtomKind::Gauss) out.insert(sym_tau());
            }
        }
    return out;
}

bool ScalarExpr::has_filter_atoms() const {
    for (const auto& [m, c] : terms_)
        for (const auto& [aid, p] : m) {
            auto k = atom_of(aid).kind;
            if (k == AtomKind::Gauss || k == AtomKind::Table) return true;
        }
    return false;
}

bool ScalarExpr::as_linear(FreqExpr* out) const {
    FreqExpr acc;
    for (const auto& [m, c] : terms_) {
        if (c.im != 0 || m.size() != 1 || m[0].second != 1) return false;
        const Atom& a = atom_of(m[0].first);
        if (a.kind == AtomKind::Sym) {
            if (a.conj || !symbol_info(a.sym).real) return false;
            acc += FreqExpr::symbol(a.sym, c.re);
        } else if (a.kind == AtomKind::Lin) {
            acc += a.lin.scaled(c.re);
        } else {
            return false;
        }
    }
    if (out) *out = acc;
    return true;
}

Rational gaussian_expansion_c(int n, int k) {
    if (k < 0 || n < 2 * k || n < 0) return 0;
    // c(n+1,k) = -c(n,k) + (n-2k+2) c(n,k-1), c(0,0) = 1
    std::vector<std::vector<Rational>> c(n + 1);
    c[0] = {Rational(1)};
    for (int m = 0; m < n; ++m) {
        c[m + 1].assign((m + 1) / 2 + 1, Rational(0));
        for (int j = 0; j <= (m + 1) / 2; ++j) {
            Rational v = 0;
            if (j <= m / 2) v -= c[m][j];
            if (j >= 1 && j - 1 <= m / 2) v += Rational(m - 2 * j + 2) * c[m][j - 1];
            c[m + 1][j] = v;
        }
    }
    return c[n][k];
}

namespace {

using Series = std::vector<ScalarExpr>;  // coefficients of x^0..x^N

Series series_mul(const Series& a, const Series& b, int N) {
    Series r(N + 1);
    for (int i = 0; i <= N && i < static_cast<int>(a.size()); ++i) {
        if (a[i].is_zero()) continue;
        for (int j = 0; i + j <= N && j < static_cast<int>(b.size()); ++j) {
            if (b[j].is_zero()) continue;
            r[i + j] += a[i] * b[j];
        }
    }
    return r;
}

}  // namespace

std::map<int, ScalarExpr> ScalarExpr::laurent(SymId x, int upto) const {
    std::map<int, ScalarExpr> result;
    for (const auto& [m, coef] : terms_) {
        Monomial indep;
        int shift = 0;
        std::vector<std::pair<AtomId, int>> dep;
        for (const auto& [aid, p] : m) {
            const Atom& a = atom_of(aid);
            if (a.kind == AtomKind::Sym) {
                if (a.sym == x)
                    shift += p;
                else
                    indep.emplace_back(aid, p);
            } else if (!a.lin.contains(x)) {
                indep.emplace_back(aid, p);
            } else {
                if (a.kind == AtomKind::Table)
                    fail(ErrorKind::UnsupportedFilter, "series expansion requires a gaussian filter");
                dep.emplace_back(aid, p);
            }
        }
        int N = upto - shift;
        if (N < 0) continue;
        Series prod(N + 1);
        prod[0] = ScalarExpr(1);
        for (const auto& [aid, p] : dep) {
            const Atom& a = atom_of(aid);
            Rational ax = a.lin.coeff(x);
            FreqExpr L0 = a.lin.without(x);
            Series s(N + 1);
            if (a.kind == AtomKind::Lin) {
                // (L0 + ax x)^p
                for (int n = 0; n <= N; ++n) {
                    Rational b = binomial(p, n);
                    if (b == 0) continue;
                    s[n] = lin(L0, p - n).scaled(Coef(b * rat_pow(ax, n)));
                }
            } else {
                // f(L0 + ax x)^p = f(L0)^p * sum_n a_n x^n with tau^2 -> p tau^2
                ScalarExpr fp = filter(FilterKind::Gaussian, L0).pow(p);
                for (int n = 0; n <= N; ++n) {
                    ScalarExpr an;
                    for (int k = 0; 2 * k <= n; ++k) {
                        Rational ck = gaussian_expansion_c(n, k);
                        if (ck == 0) continue;
                        Rational w = ck / factorial(n) * rat_pow(Rational(p), n - k) * rat_pow(ax, n);
                        an += (sym(sym_tau(), 2 * (n - k)) * lin(L0, n - 2 * k)).scaled(Coef(w));
                    }
                    s[n] = fp * an;
                }
            }
            prod = series_mul(prod, s, N);
        }
        ScalarExpr base;
        base.terms_.emplace(indep, coef);
        for (int n = 0; n <= N; ++n) {
            if (prod[n].is_zero()) continue;
            result[shift + n] += base * prod[n];
        }
    }
    for (auto it = result.begin(); it != result.end();) {
        if (it->second.is_zero())
            it = result.erase(it);
        else
            ++it;
    }
    return result;
}

ScalarExpr ScalarExpr::coefficient_at(SymId x, int order) const {
    auto l = laurent(x, order);
    auto it = l.find(order);
    return it == l.end() ? ScalarExpr() : it->second;
}

ScalarExpr ScalarExpr::pruned(const std::function<bool(const Atom&)>& drop_atom) const {
    ScalarExpr r;
    for (const auto& [m, c] : terms_) {
        bool drop = false;
        for (const auto& [aid, p] : m)
            if (drop_atom(atom_of(aid))) {
                drop = true;
                break;
            }
        if (!drop) r.terms_.emplace(m, c);
    }
    return r;
}

namespace {

std::string pow_suffix(int p) { return p == 1 ? std::string() : "^" + std::to_string(p); }

std::string render_atom(const Atom& a, int p, RenderStyle style) {
    switch (a.kind) {
        case AtomKind::Sym: {
            std::string n = symbol_name(a.sym);
            if (a.conj) n = "conj(" + n + ")";
            return n + pow_suffix(p);
        }
        case AtomKind::Lin:
            return "(" + a.lin.str() + ")" + pow_suffix(p);
        case AtomKind::Gauss:
            if (style == RenderStyle::Pretty) {
                std::string arg = a.lin.size() == 1 && a.lin.terms()[0].second == 1 ? a.lin.str()
                                                                                     : "(" + a.lin.str() + ")";
                std::string k = p == 1 ? std::string() : std::to_string(p) + "*";
                return "exp(-" + k + arg + "^2*tau^2/2)";
            }
            return "f(" + a.lin.str() + ")" + pow_suffix(p);
        case AtomKind::Table:
            return "f(" + a.lin.str() + ")" + pow_suffix(p);
    }
    return "?";
}

}  // namespace

std::string ScalarExpr::str(RenderStyle style) const {
    if (terms_.empty()) return "0";
    struct Item {
        std::string atoms;
        Coef c;
    };
    std::vector<Item> items;
    for (const auto& [m, c] : terms_) {
        std::vector<std::pair<int, std::string>> parts;
        for (const auto& [aid, p] : m) {
            const Atom& a = atom_of(aid);
            parts.emplace_back(static_cast<int>(a.kind), render_atom(a, p, style));
        }
        std::sort(parts.begin(), parts.end());
        std::string s;
        for (const auto& pr : parts) {
            if (!s.empty()) s += "*";
            s += pr.second;
        }
        items.push_back({s, c});
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (a.atoms != b.atoms) return a.atoms < b.atoms;
        return a.c.str() < b.c.str();
    });
    std::string out;
    bool first = true;
    for (const auto& it : items) {
        bool neg = false;
        Coef c = it.c;
        if (c.im == 0 && c.re < 0) {
            neg = true;
            c = -c;
        } else if (c.re == 0 && c.im < 0) {
            neg = true;
            c = -c;
        }
        std::string body;
        if (it.atoms.empty()) {
            body = c.str();
        } else if (c.is_one()) {
            body = it.atoms;
        } else {
            body = c.str() + "*" + it.atoms;
        }
        if (first)
            out += neg ? "-" + body : body;
        else
            out += (neg ? " - " : " + ") + body;
        first = false;
    }
    return out;
}

}  // namespace stcg
