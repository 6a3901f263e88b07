#include "freq.hpp"

#include <algorithm>
#include <cctype>

#include "assignment.hpp"
#include "error.hpp"

namespace stcg {

FreqExpr FreqExpr::symbol(SymId s, const Rational& c) {
    FreqExpr f;
    if (c != 0) f.terms_.emplace_back(s, c);
    return f;
}

Rational FreqExpr::coeff(SymId s) const {
    for (const auto& [id, c] : terms_)
        if (id == s) return c;
    return Rational(0);
}

bool FreqExpr::contains(SymId s) const {
    for (const auto& e : terms_)
        if (e.first == s) return true;
    return false;
}

FreqExpr& FreqExpr::operator+=(const FreqExpr& o) {
    *this = *this + o;
    return *this;
}

FreqExpr FreqExpr::operator+(const FreqExpr& o) const {
    FreqExpr r;
    r.terms_.reserve(terms_.size() + o.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < terms_.size() || j < o.terms_.size()) {
        if (j == o.terms_.size() || (i < terms_.size() && terms_[i].first < o.terms_[j].first)) {
            r.terms_.push_back(terms_[i++]);
        } else if (i == terms_.size() || o.terms_[j].first < terms_[i].first) {
            r.terms_.push_back(o.terms_[j++]);
        } else {
            Rational c = terms_[i].second + o.terms_[j].second;
            if (c != 0) r.terms_.emplace_back(terms_[i].first, c);
            ++i;
            ++j;
        }
    }
    return r;
}

FreqExpr FreqExpr::operator-() const {
    FreqExpr r = *this;
    for (auto& e : r.terms_) e.second = -e.second;
    return r;
}

FreqExpr FreqExpr::operator-(const FreqExpr& o) const { return *this + (-o); }

FreqExpr FreqExpr::scaled(const Rational& c) const {
    if (c == 0) return FreqExpr();
    FreqExpr r = *this;
    for (auto& e : r.terms_) e.second *= c;
    return r;
}

FreqExpr FreqExpr::without(SymId s) const {
    FreqExpr r;
    for (const auto& e : terms_)
        if (e.first != s) r.terms_.push_back(e);
    return r;
}

bool FreqExpr::operator==(const FreqExpr& o) const {
    if (terms_.size() != o.terms_.size()) return false;
    for (std::size_t i = 0; i < terms_.size(); ++i)
        if (terms_[i].first != o.terms_[i].first || terms_[i].second != o.terms_[i].second) return false;
    return true;
}

bool FreqExpr::operator<(const FreqExpr& o) const {
    std::size_t n = std::min(terms_.size(), o.terms_.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (terms_[i].first != o.terms_[i].first) return terms_[i].first < o.terms_[i].first;
        if (terms_[i].second != o.terms_[i].second) return terms_[i].second < o.terms_[i].second;
    }
    return terms_.size() < o.terms_.size();
}

namespace {

std::vector<FreqExpr::Entry> by_name(const std::vector<FreqExpr::Entry>& v) {
    auto out = v;
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return symbol_name(a.first) < symbol_name(b.first); });
    return out;
}

}  // namespace

FreqExpr FreqExpr::sign_normalized(bool* flipped) const {
    bool flip = false;
    if (!terms_.empty()) flip = by_name(terms_).front().second < 0;
    if (flipped) *flipped = flip;
    return flip ? -*this : *this;
}

FreqExpr FreqExpr::primitive(Rational* scale) const {
    if (terms_.empty()) {
        if (scale) *scale = 1;
        return *this;
    }
    mpz_class g = 0, l = 1;
    for (const auto& e : terms_) {
        mpz_class n = abs(e.second.get_num());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), e.second.get_den_mpz_t());
    }
    Rational c(g, l);
    c.canonicalize();
    if (by_name(terms_).front().second < 0) c = -c;
    if (scale) *scale = c;
    return scaled(1 / c);
}

std::complex<double> FreqExpr::eval(const Assignment& a) const {
    std::complex<double> v = 0;
    for (const auto& [id, c] : terms_) v += rat_double(c) * a.get(id);
    return v;
}

std::string FreqExpr::str() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [id, c] : by_name(terms_)) {
        Rational m = abs(c);
        if (first) {
            if (c < 0) out += "-";
        } else {
            out += c < 0 ? " - " : " + ";
        }
        if (m != 1) out += rat_str(m) + "*";
        out += symbol_name(id);
        first = false;
    }
    return out;
}

void FreqExpr::append_key(std::string& out) const {
    for (const auto& [id, c] : terms_) {
        out += std::to_string(id);
        out += ':';
        out += c.get_str();
        out += ',';
    }
    out += ';';
}

FreqExpr parse_freq(const std::string& text, const SymbolResolver& resolve) {
    std::size_t i = 0;
    auto skip = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto err = [&](const std::string& m) {
        fail(ErrorKind::Parse, "frequency '" + text + "' at position " + std::to_string(i) + ": " + m);
    };
    FreqExpr out;
    skip();
    if (i == text.size()) err("empty expression");
    bool first = true;
    while (true) {
        skip();
        if (i == text.size()) break;
        int sign = 1;
        if (text[i] == '+' || text[i] == '-') {
            sign = text[i] == '-' ? -1 : 1;
            ++i;
            skip();
        } else if (!first) {
            err("expected '+' or '-'");
        }
        first = false;
        Rational c = 1;
        bool have_num = false;
        if (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) {
            std::size_t s = i;
            while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) ++i;
            c = parse_decimal(text.substr(s, i - s));
            skip();
            if (i < text.size() && text[i] == '/') {
                ++i;
                skip();
                std::size_t s2 = i;
                while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
                if (s2 == i) err("expected denominator");
                Rational d = parse_decimal(text.substr(s2, i - s2));
                if (d == 0) err("zero denominator");
                c /= d;
                skip();
            }
            have_num = true;
            if (i < text.size() && text[i] == '*') {
                ++i;
                skip();
            } else {
                if (c != 0 && !(i == text.size() || text[i] == '+' || text[i] == '-'))
                    err("expected '*'");
                if (c == 0) continue;
                err("bare constants are not frequencies");
            }
        }
        std::size_t s = i;
        while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
        if (s == i) err(have_num ? "expected symbol after '*'" : "expected symbol or number");
        std::string name = text.substr(s, i - s);
        if (!is_identifier(name)) err("bad symbol '" + name + "'");
        SymId id = resolve(name);
        out += FreqExpr::symbol(id, c * sign);
    }
    return out;
}

}  // namespace stcg
