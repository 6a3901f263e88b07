#include "effective.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <random>
#include <sstream>
#include <thread>
#include <tuple>

#include "error.hpp"
#include "expr_parse.hpp"

namespace stcg {

using nlohmann::json;

int default_workers() {
    if (const char* env = std::getenv("STCG_WORKERS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned h = std::thread::hardware_concurrency();
    return h == 0 ? 1 : static_cast<int>(std::min(h, 16u));
}

Assignment EffectiveModel::values() const {
    Assignment a;
    for (const auto& s : symbols)
        if (s.value) a.set(s.id, *s.value);
    if (filter.tau) a.set(sym_tau(), *filter.tau);
    return a;
}

namespace {

// Random-point zero test for expressions whose cancellation is not structural.
bool numerically_zero(const ScalarExpr& e, std::uint64_t seed = 7) {
    if (e.is_zero()) return true;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mag(0.3, 1.7), coin(0, 1);
    auto syms = e.free_symbols();
    int good = 0;
    for (int attempt = 0; attempt < 12 && good < 3; ++attempt) {
        Assignment a;
        for (SymId s : syms) {
            double v = mag(rng) * (coin(rng) < 0.5 ? -1 : 1);
            if (s == sym_tau()) v = std::abs(v);
            if (symbol_info(s).real)
                a.set(s, v);
            else
                a.set(s, {v, mag(rng) * (coin(rng) < 0.5 ? -1 : 1)});
        }
        if (!a.has(sym_tau())) a.set(sym_tau(), mag(rng));
        std::complex<double> total = 0;
        double scale = 0;
        try {
            for (const auto& [m, c] : e.terms()) {
                ScalarExpr term(c);
                for (const auto& [aid, p] : m) term *= ScalarExpr::atom_power(aid, p);
                auto v = term.eval(a);
                total += v;
                scale += std::abs(v);
            }
        } catch (const Error& err) {
            if (err.kind() == ErrorKind::Division) continue;
            throw;
        }
        ++good;
        if (std::abs(total) > 1e-9 * std::max(scale, 1e-300)) return false;
    }
    return good > 0;
}

bool numerically_equal(const ScalarExpr& a, const ScalarExpr& b) { return numerically_zero(a - b); }

struct HKey {
    OpKey op;
    FreqExpr freq;
    bool operator<(const HKey& o) const { return std::tie(op, freq) < std::tie(o.op, o.freq); }
};
struct DKey {
    OpKey L, J;
    FreqExpr freq;
    bool operator<(const DKey& o) const { return std::tie(L, J, freq) < std::tie(o.L, o.J, o.freq); }
};

using HAcc = std::map<HKey, ScalarExpr>;
using DAcc = std::map<DKey, ScalarExpr>;

struct Groups {
    std::vector<FreqExpr> freqs;
    std::vector<OperatorSum> ops;
};

Groups make_groups(const ModelSpec& model, bool encode) {
    auto terms = encode ? encode_ramps(model) : model.terms;
    Groups g;
    std::vector<std::pair<std::string, std::pair<FreqExpr, OperatorSum>>> sorted;
    for (auto& [w, h] : frequency_groups(terms, model.modes)) sorted.push_back({w.str(), {w, h}});
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [s, p] : sorted) {
        g.freqs.push_back(p.first);
        g.ops.push_back(p.second);
    }
    return g;
}

// Per-worker memo of ordered operator products over index tuples.
class ProductMemo {
public:
    ProductMemo(const Groups& g, bool left) : g_(g), left_(left) {}
    // left: h_{i_n} ... h_{i_1}; right: h_{i_1} ... h_{i_n}
    const OperatorSum& get(const std::vector<int>& idx) {
        auto it = memo_.find(idx);
        if (it != memo_.end()) return it->second;
        OperatorSum v;
        if (idx.size() == 1) {
            v = g_.ops[idx[0]];
        } else {
            std::vector<int> prefix(idx.begin(), idx.end() - 1);
            const OperatorSum& p = get(prefix);
            v = left_ ? multiply(g_.ops[idx.back()], p) : multiply(p, g_.ops[idx.back()]);
        }
        if (memo_.size() > 200000) memo_.clear();
        return memo_.emplace(idx, std::move(v)).first->second;
    }

private:
    const Groups& g_;
    bool left_;
    std::map<std::vector<int>, OperatorSum> memo_;
};

bool next_tuple(std::vector<int>& idx, int n, std::size_t from) {
    for (std::size_t i = idx.size(); i-- > from;) {
        if (++idx[i] < n) return true;
        idx[i] = 0;
    }
    return false;
}

FreqExpr total_of(const Groups& g, const std::vector<int>& idx) {
    FreqExpr s;
    for (int i : idx) s += g.freqs[i];
    return s;
}

std::vector<FreqExpr> freqs_of(const Groups& g, const std::vector<int>& idx) {
    std::vector<FreqExpr> v;
    for (int i : idx) v.push_back(g.freqs[i]);
    return v;
}

std::vector<FreqExpr> neg(std::vector<FreqExpr> v, bool reverse) {
    for (auto& x : v) x = -x;
    if (reverse) std::reverse(v.begin(), v.end());
    return v;
}

bool ir_skip(const DeriveOptions& o, const FreqExpr& total) {
    return o.ir_limit && !total.without(sym_delta()).is_zero();
}

template <class Fn>
void parallel_for(int n, int workers, Fn fn) {
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i, 0);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (int i = next++; i < n; i = next++) fn(i, w);
            } catch (...) {
                errs[w] = std::current_exception();
                next = n;
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

void assemble_hamiltonian(const Groups& g, int kp, ContractionCache& cache, const DeriveOptions& o, int workers,
                          const ModeTablePtr& modes, HAcc& out) {
    int n = static_cast<int>(g.freqs.size());
    if (n == 0) return;
    std::vector<HAcc> local(workers);
    parallel_for(n, workers, [&](int first, int w) {
        ProductMemo memo(g, true);
        std::vector<int> idx(kp, 0);
        idx[0] = first;
        do {
            FreqExpr tot = total_of(g, idx);
            if (ir_skip(o, tot)) continue;
            auto mu = freqs_of(g, idx);
            ScalarExpr c1 = cache.get({mu, {}}).value;
            ScalarExpr c2 = cache.get({neg(mu, true), {}}).value;
            ScalarExpr q = (c1 + c2.conj()).scaled(Coef(rat(1, 2)));
            if (q.is_zero()) continue;
            for (const auto& [k, c] : memo.get(idx).terms()) local[w][{k, tot}] += q * c;
        } while (next_tuple(idx, n, 1));
    });
    (void)modes;
    for (auto& l : local)
        for (auto& [k, v] : l) out[k] += v;
}

void assemble_dissipators(const Groups& g, int kp, ContractionCache& cache, const DeriveOptions& o, int workers,
                          DAcc& out) {
    int n = static_cast<int>(g.freqs.size());
    if (n == 0) return;
    for (int l = 1; l <= kp - 1; ++l) {
        std::vector<DAcc> local(workers);
        parallel_for(n, workers, [&](int first, int w) {
            ProductMemo lm(g, true), rm(g, false);
            std::vector<int> idx(kp, 0);
            idx[0] = first;
            do {
                std::vector<int> mi(idx.begin(), idx.begin() + l), ni(idx.begin() + l, idx.end());
                FreqExpr tot = total_of(g, idx);
                if (ir_skip(o, tot)) continue;
                auto mu = freqs_of(g, mi), nu = freqs_of(g, ni);
                ScalarExpr c1 = cache.get({mu, nu}).value;
                bool rev = o.convention == DissipatorConvention::Reversed;
                ScalarExpr c2 = cache.get({neg(nu, rev), neg(mu, rev)}).value;
                ScalarExpr igamma = c1 - c2.conj();
                if (igamma.is_zero()) continue;
                ScalarExpr gamma = igamma.scaled(Coef(Rational(0), Rational(-1)));
                const OperatorSum& L = lm.get(mi);
                const OperatorSum& J = rm.get(ni);
                for (const auto& [kl, cl] : L.terms()) {
                    ScalarExpr gl = gamma * cl;
                    for (const auto& [kj, cj] : J.terms()) local[w][{kl, kj, tot}] += gl * cj;
                }
            } while (next_tuple(idx, n, 1));
        });
        for (auto& lc : local)
            for (auto& [k, v] : lc) out[k] += v;
    }
}

// Splits a frequency into its regulator multiple and the rest.
std::pair<FreqExpr, Rational> split_regulator(const FreqExpr& f) { return {f.without(sym_delta()), f.coeff(sym_delta())}; }

}  // namespace

ScalarExpr regulator_limit(const std::vector<std::pair<ScalarExpr, Rational>>& parts, const std::string& what) {
    SymId d = sym_delta();
    std::map<int, ScalarExpr> total;
    for (const auto& [coeff, m] : parts) {
        auto series = coeff.laurent(d, 0);
        if (series.empty()) continue;
        int lowest = series.begin()->first;
        int N = std::max(0, -lowest);
        // e^{-i m delta t} = sum_n (-i m t)^n delta^n / n!
        std::vector<ScalarExpr> phase(N + 1);
        for (int k = 0; k <= N; ++k) {
            Coef c = Coef(Rational(0), -m).pow(k) * Coef(1 / factorial(k));
            phase[k] = ScalarExpr::sym(sym_t(), k).scaled(c);
        }
        for (const auto& [o, e] : series)
            for (int k = 0; k <= N && o + k <= 0; ++k) total[o + k] += e * phase[k];
    }
    for (const auto& [o, e] : total)
        if (o < 0 && !numerically_zero(e))
            fail(ErrorKind::Divergent, "regulator limit diverges for " + what + ": delta_shift^" + std::to_string(o) +
                                           " coefficient " + e.str() + " does not cancel");
    auto it = total.find(0);
    return it == total.end() ? ScalarExpr() : it->second;
}

std::complex<double> numeric_regulator_limit(const std::vector<std::pair<ScalarExpr, Rational>>& parts,
                                             Assignment assign, const FilterSpec& filter, double h) {
    double t = assign.has(sym_t()) ? assign.get(sym_t()).real() : 0.0;
    auto at = [&](double d) {
        assign.set(sym_delta(), d);
        std::complex<double> s = 0;
        for (const auto& [coeff, m] : parts)
            s += coeff.eval(assign, &filter) * std::exp(std::complex<double>(0, -rat_double(m) * d * t));
        return s;
    };
    return (8.0 * at(h / 4) - 6.0 * at(h / 2) + at(h)) / 3.0;
}

EffectiveModel derive(const ModelSpec& model, const DeriveOptions& opts) {
    if (opts.order < 1) fail(ErrorKind::Validation, "order must be at least 1");
    EffectiveModel eff;
    eff.order = opts.order;
    eff.modes = model.modes;
    eff.symbols = model.symbols;
    eff.filter = model.filter;
    int workers = opts.workers > 0 ? opts.workers : default_workers();

    Groups g = make_groups(model, true);
    bool ramped = !model.ramps.empty();
    ContractionOptions copts;
    copts.ir_limit = opts.ir_limit;
    copts.regulators = {sym_delta()};
    ContractionCache cache(model.filter, copts);

    HAcc hacc;
    DAcc dacc;
    for (int kp = 1; kp <= opts.order; ++kp) {
        if (opts.hamiltonian) assemble_hamiltonian(g, kp, cache, opts, workers, model.modes, hacc);
        if (opts.dissipators && kp >= 2) assemble_dissipators(g, kp, cache, opts, workers, dacc);
    }

    std::map<HKey, ScalarExpr> hfinal;
    std::map<DKey, ScalarExpr> dfinal;
    if (ramped && !opts.keep_regulator) {
        std::map<HKey, std::vector<std::pair<ScalarExpr, Rational>>> hp;
        for (auto& [k, v] : hacc) {
            auto [w0, m] = split_regulator(k.freq);
            hp[{k.op, w0}].push_back({v, m});
        }
        for (auto& [k, parts] : hp)
            hfinal[k] = regulator_limit(parts, "hamiltonian term " + key_str(*model.modes, k.op) + " at " + k.freq.str());
        std::map<DKey, std::vector<std::pair<ScalarExpr, Rational>>> dp;
        for (auto& [k, v] : dacc) {
            auto [w0, m] = split_regulator(k.freq);
            dp[{k.L, k.J, w0}].push_back({v, m});
        }
        for (auto& [k, parts] : dp)
            dfinal[k] = regulator_limit(parts, "dissipator " + key_str(*model.modes, k.L) + ", " +
                                                   key_str(*model.modes, k.J) + " at " + k.freq.str());
    } else {
        hfinal = std::move(hacc);
        dfinal = std::move(dacc);
    }

    int dropped = 0;
    for (auto& [k, v] : hfinal) {
        if (v.is_zero() || (opts.drop_numeric_zeros && numerically_zero(v))) {
            ++dropped;
            continue;
        }
        eff.hamiltonian.push_back({v, k.freq, OperatorSum::monomial(model.modes, k.op)});
    }
    for (auto& [k, v] : dfinal) {
        if (v.is_zero() || (opts.drop_numeric_zeros && numerically_zero(v))) {
            ++dropped;
            continue;
        }
        eff.dissipators.push_back({v, k.L, k.J, k.freq});
    }
    const ModeTable& mt = *model.modes;
    std::sort(eff.hamiltonian.begin(), eff.hamiltonian.end(), [&](const auto& a, const auto& b) {
        auto ka = key_str(mt, a.op.terms().begin()->first), kb = key_str(mt, b.op.terms().begin()->first);
        if (ka != kb) return ka < kb;
        return a.freq.str() < b.freq.str();
    });
    std::sort(eff.dissipators.begin(), eff.dissipators.end(), [&](const auto& a, const auto& b) {
        auto ka = std::make_tuple(key_str(mt, a.L), key_str(mt, a.J), a.freq.str());
        auto kb = std::make_tuple(key_str(mt, b.L), key_str(mt, b.J), b.freq.str());
        return ka < kb;
    });
    eff.provenance = json{{"order", opts.order},
                          {"ir_limit", opts.ir_limit},
                          {"convention", opts.convention == DissipatorConvention::Plain ? "plain" : "reversed"},
                          {"frequencies", static_cast<int>(g.freqs.size())},
                          {"coefficients_cached", static_cast<int>(cache.size())},
                          {"numeric_zero_terms_dropped", dropped},
                          {"regulator_limit", ramped && !opts.keep_regulator},
                          {"source", model_to_json(model)}};
    return eff;
}

std::vector<HamiltonianTermSpec> effective_hamiltonian(const ModelSpec& model, int k, const DeriveOptions& base) {
    DeriveOptions o = base;
    o.order = k;
    o.dissipators = false;
    o.hamiltonian = true;
    return derive(model, o).hamiltonian;
}

std::vector<DissipatorTermSpec> effective_dissipators(const ModelSpec& model, int k, const DeriveOptions& base) {
    DeriveOptions o = base;
    o.order = k;
    o.hamiltonian = false;
    o.dissipators = true;
    return derive(model, o).dissipators;
}

std::vector<ContractionTerm> contraction_terms(const ModelSpec& model, int k) {
    Groups g = make_groups(model, true);
    int n = static_cast<int>(g.freqs.size());
    std::vector<ContractionTerm> out;
    if (n == 0) return out;
    ContractionCache cache(model.filter, {});
    for (int l = 1; l <= k; ++l) {
        ProductMemo lm(g, true), rm(g, false);
        std::vector<int> idx(k, 0);
        do {
            std::vector<int> mi(idx.begin(), idx.begin() + l), ni(idx.begin() + l, idx.end());
            ScalarExpr c = cache.get({freqs_of(g, mi), freqs_of(g, ni)}).value;
            if (c.is_zero()) continue;
            out.push_back({c, lm.get(mi), ni.empty() ? OperatorSum::identity(model.modes) : rm.get(ni), total_of(g, idx)});
        } while (next_tuple(idx, n, 0));
    }
    return out;
}

namespace {

double peak_abs(const ScalarExpr& e, Assignment a, double t0, double t1, const FilterSpec& f) {
    if (!e.depends_on(sym_t())) return std::abs(e.eval(a, &f));
    double peak = 0;
    const int samples = 65;
    for (int i = 0; i < samples; ++i) {
        double t = t0 + (t1 - t0) * i / (samples - 1);
        a.set(sym_t(), t);
        peak = std::max(peak, std::abs(e.eval(a, &f)));
    }
    return peak;
}

}  // namespace

EffectiveModel prune_terms(const EffectiveModel& eff, double threshold, const Assignment& assign, double t0, double t1,
                           PruneCensus* census) {
    EffectiveModel out = eff;
    out.hamiltonian.clear();
    out.dissipators.clear();
    PruneCensus c;
    json dropped = json::array();
    for (const auto& h : eff.hamiltonian) {
        if (threshold <= 0 || peak_abs(h.coeff, assign, t0, t1, eff.filter) >= threshold) {
            out.hamiltonian.push_back(h);
            ++c.kept_h;
        } else {
            ++c.dropped_h;
            dropped.push_back({{"operator", key_str(*eff.modes, h.op.terms().begin()->first)}, {"frequency", h.freq.str()}});
        }
    }
    for (const auto& d : eff.dissipators) {
        if (threshold <= 0 || peak_abs(d.rate, assign, t0, t1, eff.filter) >= threshold) {
            out.dissipators.push_back(d);
            ++c.kept_d;
        } else {
            ++c.dropped_d;
            dropped.push_back({{"L", key_str(*eff.modes, d.L)}, {"J", key_str(*eff.modes, d.J)}, {"frequency", d.freq.str()}});
        }
    }
    out.provenance["prune"] = {{"threshold", threshold},
                               {"kept_hamiltonian", c.kept_h},
                               {"dropped_hamiltonian", c.dropped_h},
                               {"kept_dissipators", c.kept_d},
                               {"dropped_dissipators", c.dropped_d},
                               {"dropped", dropped}};
    if (census) *census = c;
    return out;
}

bool hermiticity_closed(const EffectiveModel& eff, std::string* why) {
    const ModeTable& mt = *eff.modes;
    std::map<HKey, const ScalarExpr*> hm;
    for (const auto& h : eff.hamiltonian) hm[{h.op.terms().begin()->first, h.freq}] = &h.coeff;
    for (const auto& h : eff.hamiltonian) {
        OpKey k = h.op.terms().begin()->first;
        auto it = hm.find({adjoint_key(mt, k), -h.freq});
        if (it == hm.end() || !numerically_equal(*it->second, h.coeff.conj())) {
            if (why) *why = "hamiltonian term " + key_str(mt, k) + " at " + h.freq.str() + " lacks its conjugate partner";
            return false;
        }
    }
    std::map<DKey, const ScalarExpr*> dm;
    for (const auto& d : eff.dissipators) dm[{d.L, d.J, d.freq}] = &d.rate;
    for (const auto& d : eff.dissipators) {
        auto it = dm.find({adjoint_key(mt, d.J), adjoint_key(mt, d.L), -d.freq});
        if (it == dm.end() || !numerically_equal(*it->second, d.rate.conj())) {
            if (why)
                *why = "dissipator (" + key_str(mt, d.L) + ", " + key_str(mt, d.J) + ") at " + d.freq.str() +
                       " lacks its conjugate partner";
            return false;
        }
    }
    return true;
}

bool EffectiveModel::equals(const EffectiveModel& o) const {
    if (order != o.order || hamiltonian.size() != o.hamiltonian.size() || dissipators.size() != o.dissipators.size())
        return false;
    if (!modes || !o.modes || !(*modes == *o.modes)) return false;
    for (std::size_t i = 0; i < hamiltonian.size(); ++i) {
        const auto& a = hamiltonian[i];
        const auto& b = o.hamiltonian[i];
        if (a.freq != b.freq || !a.op.equals(b.op) || !a.coeff.structurally_equal(b.coeff)) return false;
    }
    for (std::size_t i = 0; i < dissipators.size(); ++i) {
        const auto& a = dissipators[i];
        const auto& b = o.dissipators[i];
        if (a.freq != b.freq || a.L != b.L || a.J != b.J || !a.rate.structurally_equal(b.rate)) return false;
    }
    return true;
}

json export_json(const EffectiveModel& eff) {
    ModelSpec header;
    header.modes = eff.modes;
    header.symbols = eff.symbols;
    header.filter = eff.filter;
    json doc = model_to_json(header);
    doc.erase("terms");
    doc["order"] = eff.order;
    doc["hamiltonian"] = json::array();
    for (const auto& h : eff.hamiltonian)
        doc["hamiltonian"].push_back({{"coeff", h.coeff.str()},
                                      {"frequency", h.freq.str()},
                                      {"operator", key_str(*eff.modes, h.op.terms().begin()->first)}});
    doc["dissipators"] = json::array();
    for (const auto& d : eff.dissipators)
        doc["dissipators"].push_back({{"rate", d.rate.str()},
                                      {"L", key_str(*eff.modes, d.L)},
                                      {"J", key_str(*eff.modes, d.J)},
                                      {"frequency", d.freq.str()}});
    doc["provenance"] = eff.provenance;
    return doc;
}

std::string export_text(const EffectiveModel& eff) {
    std::ostringstream out;
    out << "order " << eff.order << "\n";
    out << "hamiltonian " << eff.hamiltonian.size() << "\n";
    for (const auto& h : eff.hamiltonian)
        out << "  [" << key_str(*eff.modes, h.op.terms().begin()->first) << "]  at " << h.freq.str() << "  :  "
            << h.coeff.str(RenderStyle::Pretty) << "\n";
    out << "dissipators " << eff.dissipators.size() << "\n";
    for (const auto& d : eff.dissipators)
        out << "  D[" << key_str(*eff.modes, d.L) << ", " << key_str(*eff.modes, d.J) << "]  at " << d.freq.str()
            << "  :  " << d.rate.str(RenderStyle::Pretty) << "\n";
    return out.str();
}

EffectiveModel import_json(const json& doc) {
    json header = doc;
    header.erase("hamiltonian");
    header.erase("dissipators");
    header.erase("order");
    header.erase("provenance");
    header.erase("terms");
    header.erase("ramps");
    ModelSpec m = load_model(header);
    EffectiveModel eff;
    eff.order = doc.value("order", 0);
    eff.modes = m.modes;
    eff.symbols = m.symbols;
    eff.filter = m.filter;
    if (doc.contains("provenance")) eff.provenance = doc.at("provenance");
    auto base = m.resolver();
    SymbolResolver resolve = [&](const std::string& n) -> SymId {
        if (n == "delta_shift") return sym_delta();
        return base(n);
    };
    auto single_key = [&](const std::string& text, const std::string& where) {
        OperatorSum s = parse_operator(text, m.modes);
        if (s.size() != 1 || !s.terms().begin()->second.structurally_equal(ScalarExpr(1)))
            fail(ErrorKind::Validation, where + ": operator '" + text + "' is not a canonical monomial");
        return s.terms().begin()->first;
    };
    if (doc.contains("hamiltonian"))
        for (std::size_t i = 0; i < doc.at("hamiltonian").size(); ++i) {
            const json& h = doc.at("hamiltonian")[i];
            std::string where = "hamiltonian[" + std::to_string(i) + "]";
            HamiltonianTermSpec t;
            t.coeff = parse_scalar(h.at("coeff").get<std::string>(), resolve, m.filter.kind);
            t.freq = parse_freq(h.at("frequency").get<std::string>(), resolve);
            t.op = OperatorSum::monomial(m.modes, single_key(h.at("operator").get<std::string>(), where));
            eff.hamiltonian.push_back(std::move(t));
        }
    if (doc.contains("dissipators"))
        for (std::size_t i = 0; i < doc.at("dissipators").size(); ++i) {
            const json& d = doc.at("dissipators")[i];
            std::string where = "dissipators[" + std::to_string(i) + "]";
            DissipatorTermSpec t;
            t.rate = parse_scalar(d.at("rate").get<std::string>(), resolve, m.filter.kind);
            t.L = single_key(d.at("L").get<std::string>(), where + ".L");
            t.J = single_key(d.at("J").get<std::string>(), where + ".J");
            t.freq = parse_freq(d.at("frequency").get<std::string>(), resolve);
            eff.dissipators.push_back(std::move(t));
        }
    return eff;
}

}  // namespace stcg
