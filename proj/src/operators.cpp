#include "operators.hpp"

#include <cctype>
#include <cmath>

#include "error.hpp"

namespace stcg {

ModeTable::ModeTable(std::vector<ModeSpec> modes, int degree_cap) : modes_(std::move(modes)), degree_cap_(degree_cap) {
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        auto& m = modes_[i];
        if (!is_identifier(m.name)) fail(ErrorKind::Validation, "invalid mode name '" + m.name + "'");
        if (m.name == "sz" || m.name == "sp" || m.name == "sm" || m.name == "t")
            fail(ErrorKind::Validation, "mode name '" + m.name + "' clashes with a two-level shorthand");
        for (std::size_t j = 0; j < i; ++j)
            if (modes_[j].name == m.name) fail(ErrorKind::Validation, "duplicate mode name '" + m.name + "'");
        if (m.kind == ModeKind::TwoLevel) {
            m.truncation = 2;
            ++tls_count_;
        } else if (m.truncation < 2) {
            fail(ErrorKind::Validation, "mode '" + m.name + "' truncation must be at least 2");
        }
    }
    if (degree_cap_ < 1) fail(ErrorKind::Validation, "degree cap must be positive");
}

int ModeTable::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < modes_.size(); ++i)
        if (modes_[i].name == name) return static_cast<int>(i);
    return -1;
}

long ModeTable::dimension() const {
    long d = 1;
    for (const auto& m : modes_) {
        d *= m.dim();
        if (d > (1L << 40)) return d;
    }
    return d;
}

bool ModeTable::operator==(const ModeTable& o) const {
    if (modes_.size() != o.modes_.size()) return false;
    for (std::size_t i = 0; i < modes_.size(); ++i)
        if (modes_[i].name != o.modes_[i].name || modes_[i].kind != o.modes_[i].kind) return false;
    return true;
}

OpKey identity_key(const ModeTable& modes) { return OpKey(modes.size(), {0, 0}); }

bool is_identity_key(const OpKey& k) {
    for (const auto& f : k)
        if (f.first != 0 || f.second != 0) return false;
    return true;
}

int key_degree(const ModeTable& modes, const OpKey& k) {
    int d = 0;
    for (std::size_t i = 0; i < k.size(); ++i)
        if (modes.modes()[i].kind == ModeKind::Boson) d += k[i].first + k[i].second;
    return d;
}

OpKey adjoint_key(const ModeTable& modes, const OpKey& k) {
    OpKey r = k;
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (modes.modes()[i].kind == ModeKind::Boson)
            r[i] = {k[i].second, k[i].first};
        else if (k[i].first == kSp)
            r[i].first = kSm;
        else if (k[i].first == kSm)
            r[i].first = kSp;
    }
    return r;
}

std::string key_str(const ModeTable& modes, const OpKey& k) {
    std::string out;
    auto push = [&](const std::string& s) {
        if (!out.empty()) out += '*';
        out += s;
    };
    auto pw = [](int n) { return n == 1 ? std::string() : "^" + std::to_string(n); };
    for (std::size_t i = 0; i < k.size(); ++i) {
        const auto& m = modes.modes()[i];
        if (m.kind == ModeKind::Boson) {
            if (k[i].first) push(m.name + "'" + pw(k[i].first));
            if (k[i].second) push(m.name + pw(k[i].second));
        } else if (k[i].first != kId) {
            std::string prefix = modes.two_level_count() > 1 ? m.name + "." : "";
            static const char* names[] = {"1", "sz", "sp", "sm"};
            push(prefix + names[k[i].first]);
        }
    }
    return out.empty() ? "1" : out;
}

namespace {

// Pauli product table: P_a P_b = sum of (weight, P_c).
std::vector<std::pair<Rational, int>> pauli_product(int a, int b) {
    if (a == kId) return {{Rational(1), b}};
    if (b == kId) return {{Rational(1), a}};
    Rational half(1, 2);
    switch (a * 4 + b) {
        case kSz * 4 + kSz: return {{Rational(1), kId}};
        case kSz * 4 + kSp: return {{Rational(1), kSp}};
        case kSp * 4 + kSz: return {{Rational(-1), kSp}};
        case kSz * 4 + kSm: return {{Rational(-1), kSm}};
        case kSm * 4 + kSz: return {{Rational(1), kSm}};
        case kSp * 4 + kSm: return {{half, kId}, {half, kSz}};
        case kSm * 4 + kSp: return {{half, kId}, {-half, kSz}};
        default: return {};
    }
}

// a'^m a^n * a'^p a^q in normal order.
std::vector<std::pair<ModeFactor, Rational>> boson_product(ModeFactor x, ModeFactor y) {
    std::vector<std::pair<ModeFactor, Rational>> out;
    int n = x.second, p = y.first;
    for (int k = 0; k <= std::min(n, p); ++k)
        out.push_back({{x.first + p - k, n + y.second - k}, binomial(n, k) * binomial(p, k) * factorial(k)});
    return out;
}

void check_same_modes(const ModeTablePtr& a, const ModeTablePtr& b) {
    if (a == b) return;
    if (!a || !b || !(*a == *b)) fail(ErrorKind::Shape, "operator sums built over different mode tables");
}

}  // namespace

std::vector<std::pair<OpKey, Rational>> multiply_keys(const ModeTable& modes, const OpKey& x, const OpKey& y) {
    std::vector<std::pair<OpKey, Rational>> acc{{OpKey(), Rational(1)}};
    for (std::size_t i = 0; i < modes.size(); ++i) {
        std::vector<std::pair<ModeFactor, Rational>> f;
        if (modes.modes()[i].kind == ModeKind::Boson)
            f = boson_product(x[i], y[i]);
        else
            for (auto& [w, c] : pauli_product(x[i].first, y[i].first)) f.push_back({{c, 0}, w});
        std::vector<std::pair<OpKey, Rational>> next;
        for (const auto& [k, w] : acc)
            for (const auto& [mf, v] : f) {
                OpKey nk = k;
                nk.push_back(mf);
                next.push_back({std::move(nk), w * v});
            }
        acc.swap(next);
        if (acc.empty()) break;
    }
    for (const auto& [k, w] : acc)
        if (key_degree(modes, k) > modes.degree_cap())
            fail(ErrorKind::Resource, "operator degree " + std::to_string(key_degree(modes, k)) +
                                          " exceeds the cap of " + std::to_string(modes.degree_cap()));
    return acc;
}

OperatorSum OperatorSum::identity(ModeTablePtr modes, const ScalarExpr& c) {
    OpKey k = identity_key(*modes);
    return monomial(std::move(modes), k, c);
}

OperatorSum OperatorSum::monomial(ModeTablePtr modes, const OpKey& key, const ScalarExpr& c) {
    OperatorSum s(std::move(modes));
    if (key.size() != s.modes_->size()) fail(ErrorKind::Shape, "operator key does not match the mode table");
    s.add(key, c);
    return s;
}

ScalarExpr OperatorSum::coefficient(const OpKey& key) const {
    auto it = terms_.find(key);
    return it == terms_.end() ? ScalarExpr() : it->second;
}

void OperatorSum::add(const OpKey& key, const ScalarExpr& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(key);
    if (it == terms_.end()) {
        terms_.emplace(key, c);
        return;
    }
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
}

OperatorSum OperatorSum::operator+(const OperatorSum& o) const {
    if (!modes_) return o;
    if (!o.modes_) return *this;
    check_same_modes(modes_, o.modes_);
    OperatorSum r = *this;
    for (const auto& [k, c] : o.terms_) r.add(k, c);
    return r;
}

OperatorSum OperatorSum::operator-(const OperatorSum& o) const { return *this + o.scaled(ScalarExpr(-1)); }

OperatorSum OperatorSum::scaled(const ScalarExpr& c) const {
    OperatorSum r(modes_);
    for (const auto& [k, v] : terms_) r.add(k, v * c);
    return r;
}

OperatorSum OperatorSum::adjoint() const {
    OperatorSum r(modes_);
    for (const auto& [k, v] : terms_) r.add(adjoint_key(*modes_, k), v.conj());
    return r;
}

bool OperatorSum::equals(const OperatorSum& o) const {
    OperatorSum d = *this - o;
    return d.is_zero();
}

std::string OperatorSum::str(RenderStyle style) const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [k, c] : terms_) {
        if (!out.empty()) out += " + ";
        out += "(" + c.str(style) + ")*" + key_str(*modes_, k);
    }
    return out;
}

OperatorSum multiply(const OperatorSum& x, const OperatorSum& y) {
    check_same_modes(x.modes(), y.modes());
    OperatorSum r(x.modes());
    for (const auto& [kx, cx] : x.terms())
        for (const auto& [ky, cy] : y.terms()) {
            ScalarExpr c = cx * cy;
            for (const auto& [k, w] : multiply_keys(*x.modes(), kx, ky)) r.add(k, c.scaled(Coef(w)));
        }
    return r;
}

namespace {

[[noreturn]] void parse_fail(const std::string& text, std::size_t pos, const std::string& msg) {
    fail(ErrorKind::Parse, "operator '" + text + "' at position " + std::to_string(pos) + ": " + msg);
}

}  // namespace

OperatorSum parse_operator(const std::string& text, const ModeTablePtr& modes) {
    const ModeTable& mt = *modes;
    OperatorSum acc = OperatorSum::identity(modes);
    std::size_t pos = 0;
    auto skip = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    auto ident = [&]() {
        std::size_t s = pos;
        while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) ++pos;
        return text.substr(s, pos - s);
    };
    auto power = [&]() -> int {
        skip();
        if (pos >= text.size() || text[pos] != '^') return 1;
        std::size_t at = pos++;
        skip();
        std::size_t s = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (s == pos) parse_fail(text, at, "malformed power");
        int n = std::stoi(text.substr(s, pos - s));
        if (n < 0 || n > 64) parse_fail(text, at, "power out of range");
        return n;
    };
    auto tls_level = [&]() -> int {
        skip();
        std::size_t at = pos;
        if (pos < text.size() && (text[pos] == 'g' || text[pos] == '0')) {
            ++pos;
            return 0;
        }
        if (pos < text.size() && (text[pos] == 'e' || text[pos] == '1')) {
            ++pos;
            return 1;
        }
        parse_fail(text, at, "expected a two-level index g, e, 0 or 1");
    };
    auto expect = [&](char c) {
        skip();
        if (pos >= text.size() || text[pos] != c) parse_fail(text, pos, std::string("expected '") + c + "'");
        ++pos;
    };
    skip();
    if (pos >= text.size()) parse_fail(text, pos, "empty operator");
    while (true) {
        skip();
        std::size_t start = pos;
        OperatorSum factor(modes);
        if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            std::string num;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) num += text[pos++];
            if (num != "1") parse_fail(text, start, "only the identity '1' may appear as a number");
            factor = OperatorSum::identity(modes);
        } else {
            std::string name = ident();
            if (name.empty()) parse_fail(text, start, "expected an operator factor");
            int tls = -1;
            std::string shorthand;
            int bi = mt.index_of(name);
            if (bi >= 0 && mt.modes()[bi].kind == ModeKind::Boson) {
                skip();
                bool dag = false;
                if (pos < text.size() && text[pos] == '\'') {
                    dag = true;
                    ++pos;
                }
                int n = power();
                OpKey k = identity_key(mt);
                k[bi] = dag ? ModeFactor{n, 0} : ModeFactor{0, n};
                factor = OperatorSum::monomial(modes, k);
            } else {
                if (bi >= 0 && pos < text.size() && text[pos] == '.') {
                    ++pos;
                    tls = bi;
                    std::size_t s2 = pos;
                    shorthand = ident();
                    if (shorthand.empty()) parse_fail(text, s2, "expected sz, sp, sm or t(i,j)");
                } else if (bi >= 0) {
                    parse_fail(text, start, "two-level mode '" + name + "' needs a factor such as " + name + ".sz");
                } else {
                    shorthand = name;
                    if (mt.two_level_count() != 1) {
                        if (shorthand == "sz" || shorthand == "sp" || shorthand == "sm" || shorthand == "t")
                            parse_fail(text, start,
                                       mt.two_level_count() == 0 ? "no two-level mode declared"
                                                                 : "ambiguous two-level factor; use mode.factor");
                        parse_fail(text, start, "unknown mode '" + name + "'");
                    }
                    for (std::size_t i = 0; i < mt.size(); ++i)
                        if (mt.modes()[i].kind == ModeKind::TwoLevel) tls = static_cast<int>(i);
                }
                OpKey k = identity_key(mt);
                factor = OperatorSum(modes);
                Rational half(1, 2);
                if (shorthand == "sz") {
                    k[tls] = {kSz, 0};
                    factor.add(k, ScalarExpr(1));
                } else if (shorthand == "sp") {
                    k[tls] = {kSp, 0};
                    factor.add(k, ScalarExpr(1));
                } else if (shorthand == "sm") {
                    k[tls] = {kSm, 0};
                    factor.add(k, ScalarExpr(1));
                } else if (shorthand == "t") {
                    expect('(');
                    int i = tls_level();
                    expect(',');
                    int j = tls_level();
                    expect(')');
                    if (i == 1 && j == 0) {
                        k[tls] = {kSp, 0};
                        factor.add(k, ScalarExpr(1));
                    } else if (i == 0 && j == 1) {
                        k[tls] = {kSm, 0};
                        factor.add(k, ScalarExpr(1));
                    } else {
                        factor.add(identity_key(mt), ScalarExpr(half));
                        k[tls] = {kSz, 0};
                        factor.add(k, ScalarExpr(i == 1 ? half : -half));
                    }
                } else {
                    parse_fail(text, start, "unknown mode or factor '" + shorthand + "'");
                }
                skip();
                if (pos < text.size() && text[pos] == '\'')
                    parse_fail(text, pos, "dagger is not allowed on two-level factors");
                int n = power();
                OperatorSum p = OperatorSum::identity(modes);
                for (int r = 0; r < n; ++r) p = multiply(p, factor);
                factor = p;
            }
        }
        acc = multiply(acc, factor);
        skip();
        if (pos >= text.size()) break;
        if (text[pos] != '*') parse_fail(text, pos, "expected '*'");
        ++pos;
    }
    return acc;
}

long& dimension_cap() {
    static long cap = 4096;
    return cap;
}

namespace {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd r(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return r;
}

Eigen::MatrixXcd mode_matrix(const ModeSpec& m, const ModeFactor& f) {
    int d = m.dim();
    if (m.kind == ModeKind::Boson) {
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
        for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
        Eigen::MatrixXcd ad = a.adjoint();
        Eigen::MatrixXcd r = Eigen::MatrixXcd::Identity(d, d);
        for (int k = 0; k < f.second; ++k) r = a * r;
        for (int k = 0; k < f.first; ++k) r = ad * r;
        return r;
    }
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(2, 2);
    switch (f.first) {
        case kId: r(0, 0) = r(1, 1) = 1; break;
        case kSz: r(0, 0) = -1; r(1, 1) = 1; break;
        case kSp: r(1, 0) = 1; break;
        case kSm: r(0, 1) = 1; break;
    }
    return r;
}

}  // namespace

Eigen::MatrixXcd key_matrix(const ModeTable& modes, const OpKey& k) {
    long dim = modes.dimension();
    if (dim > dimension_cap())
        fail(ErrorKind::Resource, "Hilbert-space dimension " + std::to_string(dim) + " exceeds the cap of " +
                                      std::to_string(dimension_cap()));
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Identity(1, 1);
    for (std::size_t i = 0; i < modes.size(); ++i) r = kron(r, mode_matrix(modes.modes()[i], k[i]));
    return r;
}

Eigen::MatrixXcd matrix_realization(const OperatorSum& x, const Assignment& assign, const FilterSpec* filter) {
    if (!x.modes()) fail(ErrorKind::Shape, "operator sum without a mode table");
    long dim = x.modes()->dimension();
    if (dim > dimension_cap())
        fail(ErrorKind::Resource, "Hilbert-space dimension " + std::to_string(dim) + " exceeds the cap of " +
                                      std::to_string(dimension_cap()));
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& [k, c] : x.terms()) r += c.eval(assign, filter) * key_matrix(*x.modes(), k);
    return r;
}

}  // namespace stcg
