#include "expr_parse.hpp"

#include <cctype>
#include <cmath>

#include "error.hpp"

namespace stcg {

namespace {

class Parser {
public:
    Parser(const std::string& text, const SymbolResolver& resolve, FilterKind kind)
        : s_(text), resolve_(resolve), kind_(kind) {}

    ScalarExpr run() {
        skip();
        if (pos_ >= s_.size()) err("empty expression");
        ScalarExpr e = expr();
        skip();
        if (pos_ < s_.size()) err("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void err(const std::string& m) {
        fail(ErrorKind::Parse, "expression '" + s_ + "' at position " + std::to_string(pos_) + ": " + m);
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) err(std::string("expected '") + c + "'");
    }

    ScalarExpr expr() {
        ScalarExpr acc = term();
        while (true) {
            if (eat('+'))
                acc += term();
            else if (eat('-'))
                acc -= term();
            else
                return acc;
        }
    }

    ScalarExpr term() {
        ScalarExpr acc = unary();
        while (true) {
            if (eat('*')) {
                acc *= unary();
            } else if (eat('/')) {
                std::size_t at = pos_;
                ScalarExpr d = unary();
                if (d.is_zero()) {
                    pos_ = at;
                    err("division by zero");
                }
                try {
                    acc *= d.pow(-1);
                } catch (const Error&) {
                    pos_ = at;
                    err("divisor must be a monomial, a linear frequency form or a constant");
                }
            } else {
                return acc;
            }
        }
    }

    ScalarExpr unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }

    ScalarExpr power() {
        ScalarExpr base = primary();
        if (eat('^')) {
            skip();
            int sign = 1;
            if (eat('-')) sign = -1;
            skip();
            std::size_t st = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (st == pos_) err("expected integer exponent");
            int p = sign * std::stoi(s_.substr(st, pos_ - st));
            try {
                return base.pow(p);
            } catch (const Error& e) {
                err(e.what());
            }
        }
        return base;
    }

    std::string ident() {
        std::size_t st = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        return s_.substr(st, pos_ - st);
    }

    std::string balanced_inner() {
        expect('(');
        std::size_t st = pos_;
        int depth = 1;
        while (pos_ < s_.size() && depth > 0) {
            if (s_[pos_] == '(') ++depth;
            if (s_[pos_] == ')') --depth;
            ++pos_;
        }
        if (depth) err("unbalanced parentheses");
        return s_.substr(st, pos_ - 1 - st);
    }

    ScalarExpr primary() {
        skip();
        if (pos_ >= s_.size()) err("unexpected end of expression");
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t st = pos_;
            while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
            if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
                std::size_t save = pos_++;
                if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
                if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
                } else {
                    pos_ = save;
                }
            }
            try {
                return ScalarExpr(parse_decimal(s_.substr(st, pos_ - st)));
            } catch (const Error&) {
                pos_ = st;
                err("malformed number");
            }
        }
        if (c == '(') {
            ScalarExpr inner;
            ++pos_;
            inner = expr();
            expect(')');
            FreqExpr L;
            if (inner.size() >= 2 && inner.as_linear(&L)) return ScalarExpr::lin(L, 1);
            return inner;
        }
        std::size_t st = pos_;
        std::string name = ident();
        if (name.empty()) err("unexpected '" + std::string(1, c) + "'");
        if (name == "i") return ScalarExpr::imag();
        if (name == "f") {
            std::size_t at = pos_;
            std::string inner = balanced_inner();
            try {
                return ScalarExpr::filter(kind_, parse_freq(inner, resolve_));
            } catch (const Error& e) {
                pos_ = at;
                err(e.what());
            }
        }
        if (name == "conj") {
            expect('(');
            skip();
            std::size_t at = pos_;
            std::string n = ident();
            if (n.empty()) err("conj expects a symbol name");
            expect(')');
            SymId id = resolve_(n);
            if (symbol_info(id).real) {
                (void)at;
                return ScalarExpr::sym(id);
            }
            return ScalarExpr::conj_sym(id);
        }
        if (name == "exp" || name == "pi" || name == "eps_reg") {
            pos_ = st;
            err("'" + name + "' is reserved");
        }
        return ScalarExpr::sym(resolve_(name));
    }

    const std::string& s_;
    const SymbolResolver& resolve_;
    FilterKind kind_;
    std::size_t pos_ = 0;
};

}  // namespace

ScalarExpr parse_scalar(const std::string& text, const SymbolResolver& resolve, FilterKind filter_kind) {
    return Parser(text, resolve, filter_kind).run();
}

double parse_quantity(const std::string& text) {
    std::size_t pos = 0;
    auto err = [&](const std::string& m) {
        fail(ErrorKind::Parse, "quantity '" + text + "' at position " + std::to_string(pos) + ": " + m);
    };
    auto skip = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    static const std::pair<const char*, double> units[] = {
        {"GHz", 1e9}, {"MHz", 1e6}, {"kHz", 1e3}, {"Hz", 1.0}, {"ps", 1e-12},
        {"ns", 1e-9}, {"us", 1e-6}, {"ms", 1e-3}, {"s", 1.0},
    };
    double value = 1;
    bool divide = false;
    skip();
    if (pos < text.size() && text[pos] == '-') {
        value = -1;
        ++pos;
    }
    if (pos >= text.size()) err("empty quantity");
    while (true) {
        skip();
        double factor = 1;
        bool any = false;
        std::size_t st = pos;
        while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.')) ++pos;
        if (pos < text.size() && pos > st && (text[pos] == 'e' || text[pos] == 'E') && pos + 1 < text.size() &&
            (std::isdigit(static_cast<unsigned char>(text[pos + 1])) || text[pos + 1] == '-' || text[pos + 1] == '+')) {
            ++pos;
            if (text[pos] == '-' || text[pos] == '+') ++pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        }
        if (pos > st) {
            try {
                factor = std::stod(text.substr(st, pos - st));
            } catch (...) {
                pos = st;
                err("malformed number");
            }
            any = true;
        }
        if (text.compare(pos, 2, "pi") == 0) {
            factor *= M_PI;
            pos += 2;
            any = true;
        }
        for (const auto& [u, scale] : units) {
            std::size_t n = std::char_traits<char>::length(u);
            if (text.compare(pos, n, u) == 0) {
                factor *= scale;
                pos += n;
                any = true;
                break;
            }
        }
        if (!any) err("expected a number, pi or a unit");
        value = divide ? value / factor : value * factor;
        skip();
        if (pos >= text.size()) break;
        if (text[pos] == '*') {
            divide = false;
        } else if (text[pos] == '/') {
            divide = true;
        } else {
            err("unexpected '" + std::string(1, text[pos]) + "'");
        }
        ++pos;
    }
    if (!std::isfinite(value)) err("non-finite value");
    return value;
}

}  // namespace stcg
