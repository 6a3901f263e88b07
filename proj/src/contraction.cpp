#include "contraction.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace stcg {

std::string FrequencyTuple::key() const {
    std::string k = std::to_string(l()) + "," + std::to_string(r()) + "|";
    for (const auto& m : mu) {
        m.append_key(k);
        k += ';';
    }
    k += '|';
    for (const auto& n : nu) {
        n.append_key(k);
        k += ';';
    }
    return k;
}

VectorFactorial vector_factorial(const std::vector<FreqExpr>& v) {
    VectorFactorial out;
    out.value = ScalarExpr(1);
    FreqExpr acc;
    for (std::size_t i = 0; i < v.size(); ++i) {
        acc += v[i];
        if (acc.is_zero())
            out.zero_indices.push_back(static_cast<int>(i) + 1);
        else if (out.zero_indices.empty())
            out.value *= ScalarExpr::lin(acc, 1);
    }
    if (out.singular()) out.value = ScalarExpr();
    return out;
}

namespace {

FreqExpr sum_of(const std::vector<FreqExpr>& v) {
    FreqExpr s;
    for (const auto& x : v) s += x;
    return s;
}

std::string index_set(const std::vector<int>& ix) {
    std::string s = "{";
    for (std::size_t i = 0; i < ix.size(); ++i) s += (i ? "," : "") + std::to_string(ix[i]);
    return s + "}";
}

// Product of reciprocal partial sums; caller guarantees nonsingularity.
ScalarExpr inverse_factorial(const std::vector<FreqExpr>& v) {
    ScalarExpr out(1);
    FreqExpr acc;
    for (const auto& x : v) {
        acc += x;
        out *= ScalarExpr::lin(acc, -1);
    }
    return out;
}

ScalarExpr contribution_unchecked(const Diagram& d, const std::vector<BubbleBlock>& blocks, const FilterSpec& filter) {
    int nb = static_cast<int>(d.bubbles.size());
    bool negative = ((d.r + nb - 1) % 2) != 0;
    ScalarExpr out = ScalarExpr::lin(sum_of(blocks.back().mu), 1);
    if (negative) out = -out;
    for (const auto& b : blocks) {
        out *= filter_eval(filter, sum_of(b.mu) + sum_of(b.nu));
        out *= inverse_factorial(b.mu);
        out *= inverse_factorial(b.nu);
    }
    return out;
}

}  // namespace

bool diagram_is_singular(const Diagram& d, const FrequencyTuple& t) {
    for (const auto& b : slice_frequencies(d, t.mu, t.nu))
        if (vector_factorial(b.mu).singular() || vector_factorial(b.nu).singular()) return true;
    return false;
}

ScalarExpr diagram_contribution(const Diagram& d, const FrequencyTuple& t, const FilterSpec& filter) {
    auto blocks = slice_frequencies(d, t.mu, t.nu);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        auto fm = vector_factorial(blocks[i].mu);
        if (fm.singular())
            fail(ErrorKind::Singular, "bubble " + std::to_string(i + 1) + " left block has zero partial sums at " +
                                          index_set(fm.zero_indices));
        auto fn = vector_factorial(blocks[i].nu);
        if (fn.singular())
            fail(ErrorKind::Singular, "bubble " + std::to_string(i + 1) + " right block has zero partial sums at " +
                                          index_set(fn.zero_indices));
    }
    return contribution_unchecked(d, blocks, filter);
}

ScalarExpr regularize_singular(const Diagram& d, const FrequencyTuple& t, const FilterSpec& filter) {
    if (filter.kind != FilterKind::Gaussian)
        fail(ErrorKind::UnsupportedFilter, "singular diagrams can only be regularized with a gaussian filter");
    FreqExpr eps = FreqExpr::symbol(sym_eps());
    FrequencyTuple shifted = t;
    for (auto& m : shifted.mu) m += eps;
    for (auto& n : shifted.nu) n += eps;
    ScalarExpr c = contribution_unchecked(d, slice_frequencies(d, shifted.mu, shifted.nu), filter);
    return c.coefficient_at(sym_eps(), 0);
}

bool ir_suppressed_atom(const Atom& a, const std::vector<SymId>& regulators) {
    if (a.kind != AtomKind::Gauss && a.kind != AtomKind::Table) return false;
    FreqExpr x = a.lin;
    for (SymId s : regulators) x = x.without(s);
    return !x.is_zero();
}

CoefficientResult contraction_coefficient(const FrequencyTuple& t, const FilterSpec& filter,
                                          const ContractionOptions& opts) {
    if (t.l() < 1) fail(ErrorKind::InvalidWeight, "contraction coefficient needs at least one left mode");
    CoefficientResult res;
    auto add = [&](const Diagram& d) {
        ScalarExpr c;
        if (diagram_is_singular(d, t)) {
            c = regularize_singular(d, t, filter);
            res.singular_regularized = true;
        } else {
            c = contribution_unchecked(d, slice_frequencies(d, t.mu, t.nu), filter);
        }
        if (opts.ir_limit)
            c = c.pruned([&](const Atom& a) { return ir_suppressed_atom(a, opts.regulators); });
        res.value += c;
    };
    if (t.l() + t.r() >= 5)
        for_each_diagram(t.l(), t.r(), add);
    else
        for (const auto& d : diagrams_cached(t.l(), t.r())) add(d);
    return res;
}

CoefficientResult ContractionCache::get(const FrequencyTuple& t) {
    std::string k = t.key();
    {
        std::lock_guard lk(mu_);
        auto it = memo_.find(k);
        if (it != memo_.end()) {
            ++hits_;
            return it->second;
        }
    }
    CoefficientResult r = contraction_coefficient(t, filter_, opts_);
    std::lock_guard lk(mu_);
    return memo_.emplace(k, std::move(r)).first->second;
}

std::size_t ContractionCache::size() const {
    std::lock_guard lk(mu_);
    return memo_.size();
}

namespace {

std::vector<FreqExpr> negated(std::vector<FreqExpr> v) {
    for (auto& x : v) x = -x;
    return v;
}

bool tuple_singular(const FrequencyTuple& t) {
    bool s = false;
    for_each_diagram(t.l(), t.r(), [&](const Diagram& d) { s = s || diagram_is_singular(d, t); });
    return s;
}

}  // namespace

SymmetryReport symmetry_check(const FrequencyTuple& t, SymmetryRelation rel, const FilterSpec& filter, int samples,
                              std::mt19937_64& rng, double tol) {
    if (tuple_singular(t)) fail(ErrorKind::Singular, "symmetry check requires a non-singular tuple");
    FrequencyTuple other;
    Coef factor(1);
    if (rel == SymmetryRelation::Parity) {
        other.mu = negated(t.mu);
        other.nu = negated(t.nu);
        if ((t.l() + t.r() - 1) % 2) factor = Coef(-1);
    } else {
        std::vector<FreqExpr> m = t.nu;
        m.push_back(t.mu.back());
        other.mu = negated(m);
        other.nu = negated(std::vector<FreqExpr>(t.mu.begin(), t.mu.end() - 1));
    }
    ScalarExpr lhs = contraction_coefficient(t, filter).value;
    ScalarExpr rhs = contraction_coefficient(other, filter).value.scaled(factor);
    std::set<SymId> syms = lhs.free_symbols();
    for (SymId s : rhs.free_symbols()) syms.insert(s);
    std::uniform_real_distribution<double> freq(-3.0, 3.0), tau(0.3, 2.0);
    SymmetryReport rep;
    for (int i = 0; i < samples; ++i) {
        Assignment a;
        for (SymId s : syms) a.set(s, s == sym_tau() ? tau(rng) : freq(rng));
        if (!a.has(sym_tau())) a.set(sym_tau(), filter.tau ? *filter.tau : tau(rng));
        std::complex<double> x = lhs.eval(a, &filter), y = rhs.eval(a, &filter);
        double scale = std::max({std::abs(x), std::abs(y), 1e-300});
        double err = std::abs(x - y) / scale;
        rep.worst_rel_error = std::max(rep.worst_rel_error, err);
        if (err > tol) rep.ok = false;
    }
    return rep;
}

namespace {

struct Phasor {
    double omega;
    std::complex<double> amp;
};
using PhasorSum = std::vector<Phasor>;

void compact(PhasorSum& p) {
    std::sort(p.begin(), p.end(), [](const Phasor& a, const Phasor& b) { return a.omega < b.omega; });
    PhasorSum out;
    for (const auto& x : p) {
        if (!out.empty() && std::abs(out.back().omega - x.omega) <= 1e-12 * (1 + std::abs(x.omega)))
            out.back().amp += x.amp;
        else
            out.push_back(x);
    }
    p.swap(out);
}

PhasorSum product(const PhasorSum& a, const PhasorSum& b) {
    PhasorSum r;
    r.reserve(a.size() * b.size());
    for (const auto& x : a)
        for (const auto& y : b) r.push_back({x.omega + y.omega, x.amp * y.amp});
    compact(r);
    return r;
}

// Nested Dyson integral over a block; w[0] pairs with the innermost time variable.
PhasorSum dyson_block(const std::vector<double>& w, std::complex<double> prefactor) {
    PhasorSum F{{0.0, 1.0}};
    for (double wj : w) {
        PhasorSum G;
        for (const auto& p : F) {
            double om = p.omega + wj;
            if (std::abs(om) < 1e-14 * (1 + std::abs(wj)))
                fail(ErrorKind::OracleMismatch, "oracle hit a resonant secular integral");
            std::complex<double> c = std::complex<double>(0, 1) * p.amp / om;
            G.push_back({om, c});
            G.push_back({0.0, -c});
        }
        compact(G);
        F.swap(G);
    }
    for (auto& p : F) p.amp *= prefactor;
    return F;
}

std::complex<double> ipow(std::complex<double> z, int n) {
    std::complex<double> r = 1;
    for (int k = 0; k < n; ++k) r *= z;
    return r;
}

}  // namespace

OracleResult bubble_factor_oracle(const std::vector<double>& mu, const std::vector<double>& nu,
                                  const FilterSpec& filter, double tau, const std::vector<double>& time_samples,
                                  double tol) {
    int l = static_cast<int>(mu.size()), r = static_cast<int>(nu.size());
    if (l < 1) fail(ErrorKind::InvalidWeight, "oracle needs at least one left mode");
    if (l + r > 4) fail(ErrorKind::Resource, "oracle limited to l + r <= 4");
    if (time_samples.empty()) fail(ErrorKind::Validation, "oracle needs time samples");
    const std::complex<double> I(0, 1);
    PhasorSum total;
    for (const auto& d : diagrams_cached(l, r)) {
        PhasorSum diag{{0.0, 1.0}};
        std::size_t i = 0, j = 0;
        for (std::size_t b = 0; b < d.bubbles.size(); ++b) {
            const Bubble& bb = d.bubbles[b];
            bool last = b + 1 == d.bubbles.size();
            std::vector<double> left(mu.begin() + i, mu.begin() + i + bb.left);
            std::vector<double> right(nu.begin() + j, nu.begin() + j + bb.right);
            i += bb.left;
            j += bb.right;
            PhasorSum L;
            if (last) {
                double special = left.back();
                left.pop_back();
                L = dyson_block(left, ipow(-I, static_cast<int>(left.size())));
                for (auto& p : L) p.omega += special;
            } else {
                L = dyson_block(left, ipow(-I, static_cast<int>(left.size())));
            }
            PhasorSum R = dyson_block(right, ipow(I, static_cast<int>(right.size())));
            PhasorSum B = product(L, R);
            for (auto& p : B) p.amp *= filter.eval(p.omega, tau);
            diag = product(diag, B);
        }
        double sign = (d.bubbles.size() - 1) % 2 ? -1.0 : 1.0;
        for (auto& p : diag) total.push_back({p.omega, sign * p.amp});
    }
    double Omega = 0;
    for (double m : mu) Omega += m;
    for (double n : nu) Omega += n;
    std::vector<std::complex<double>> amps;
    for (double t : time_samples) {
        std::complex<double> w = 0;
        for (const auto& p : total) w += p.amp * std::exp(-I * p.omega * t);
        amps.push_back(w * std::exp(I * Omega * t));
    }
    std::complex<double> mean = 0;
    for (auto a : amps) mean += a;
    mean /= static_cast<double>(amps.size());
    double res = 0;
    for (auto a : amps) res = std::max(res, std::abs(a - mean));
    OracleResult out;
    out.amplitude = mean;
    out.residual = res / std::max(std::abs(mean), 1e-300);
    out.homogeneous = out.residual <= tol;
    if (!out.homogeneous)
        fail(ErrorKind::OracleMismatch, "time dependence is not a single phasor (relative residual " +
                                            std::to_string(out.residual) + ")");
    return out;
}

}  // namespace stcg
