#include "model.hpp"

#include <fstream>
#include <sstream>

#include "error.hpp"
#include "expr_parse.hpp"
#include "filter.hpp"

namespace stcg {

using nlohmann::json;

const SymbolDecl* ModelSpec::find(const std::string& name) const {
    for (const auto& s : symbols)
        if (s.name == name) return &s;
    return nullptr;
}

SymbolResolver ModelSpec::resolver() const {
    return [this](const std::string& name) -> SymId {
        if (name == "tau") return sym_tau();
        if (name == "t") return sym_t();
        const SymbolDecl* d = find(name);
        if (!d) fail(ErrorKind::Reference, "undeclared symbol '" + name + "'");
        return d->id;
    };
}

Assignment ModelSpec::values() const {
    Assignment a;
    for (const auto& s : symbols)
        if (s.value) a.set(s.id, *s.value);
    if (filter.tau) a.set(sym_tau(), *filter.tau);
    return a;
}

FreqExpr ModelSpec::substitute_aliases(const FreqExpr& f) const {
    FreqExpr out;
    for (const auto& [id, c] : f.terms()) {
        const SymbolDecl* d = nullptr;
        for (const auto& s : symbols)
            if (s.id == id) d = &s;
        if (d && d->equals)
            out += d->equals->scaled(c);
        else
            out += FreqExpr::symbol(id, c);
    }
    return out;
}

std::complex<double> parse_value(const json& v, const std::string& what) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        try {
            return parse_quantity(v.get<std::string>());
        } catch (const Error& e) {
            fail(ErrorKind::Validation, what + ": " + e.what());
        }
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    fail(ErrorKind::Validation, what + ": expected a number, a quantity string or [re, im]");
}

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) fail(ErrorKind::Validation, where + ": missing field '" + key + "'");
    return obj.at(key);
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_string()) fail(ErrorKind::Validation, where + "." + key + ": expected a string");
    return v.get<std::string>();
}

FilterSpec load_filter(const json& doc) {
    if (!doc.contains("filter")) return gaussian_filter();
    const json& f = doc.at("filter");
    std::string kind = f.value("kind", "gaussian");
    std::optional<double> tau;
    if (f.contains("tau") && !f.at("tau").is_null()) {
        double v = parse_value(f.at("tau"), "filter.tau").real();
        if (!(v >= 0)) fail(ErrorKind::Validation, "filter.tau: must be non-negative");
        tau = v;
    }
    if (kind == "gaussian") return gaussian_filter(tau);
    if (kind == "table" || kind == "custom-table") {
        const json& t = require(f, "table", "filter");
        std::vector<std::pair<double, double>> tab;
        for (const auto& row : t) {
            if (!row.is_array() || row.size() != 2) fail(ErrorKind::Validation, "filter.table: rows must be [omega, f]");
            tab.emplace_back(row[0].get<double>(), row[1].get<double>());
        }
        FilterSpec fs = table_filter(std::move(tab));
        fs.tau = tau;
        return fs;
    }
    fail(ErrorKind::Validation, "filter.kind: unknown kind '" + kind + "'");
}

bool reserved_model_name(const std::string& n) {
    return is_reserved_name(n) || n == "tau" || n == "t" || n == "delta_shift";
}

}  // namespace

std::map<FreqExpr, OperatorSum> frequency_groups(const std::vector<HamiltonianTermSpec>& terms,
                                                 const ModeTablePtr& modes) {
    std::map<FreqExpr, OperatorSum> g;
    for (const auto& t : terms) {
        auto it = g.find(t.freq);
        if (it == g.end()) it = g.emplace(t.freq, OperatorSum(modes)).first;
        it->second = it->second + t.op.scaled(t.coeff);
    }
    for (auto it = g.begin(); it != g.end();) {
        if (it->second.is_zero())
            it = g.erase(it);
        else
            ++it;
    }
    return g;
}

void check_hermiticity(const std::vector<HamiltonianTermSpec>& terms, const ModeTablePtr& modes) {
    auto g = frequency_groups(terms, modes);
    for (const auto& [w, h] : g) {
        auto it = g.find(-w);
        if (it == g.end())
            fail(ErrorKind::Hermiticity, "term " + h.str() + " at frequency " + w.str() +
                                             " has no conjugate partner at frequency " + (-w).str());
        if (!it->second.equals(h.adjoint()))
            fail(ErrorKind::Hermiticity, "terms at frequency " + (-w).str() + " are not the adjoint of those at " +
                                             w.str() + ": expected " + h.adjoint().str() + ", found " +
                                             it->second.str());
    }
}

namespace {

void autocomplete_terms(std::vector<HamiltonianTermSpec>& terms, const ModeTablePtr& modes) {
    auto g = frequency_groups(terms, modes);
    for (const auto& [w, h] : g) {
        FreqExpr partner = -w;
        auto it = g.find(partner);
        OperatorSum adj = h.adjoint();
        for (const auto& [k, c] : adj.terms()) {
            if (it != g.end() && !it->second.coefficient(k).is_zero()) continue;
            terms.push_back({c, partner, OperatorSum::monomial(modes, k)});
        }
    }
}

}  // namespace

ModelSpec load_model(const json& doc, const LoadOptions& opts) {
    if (!doc.is_object()) fail(ErrorKind::Validation, "model document must be an object");
    ModelSpec m;
    std::vector<ModeSpec> modes;
    if (doc.contains("modes")) {
        for (std::size_t i = 0; i < doc.at("modes").size(); ++i) {
            const json& md = doc.at("modes")[i];
            std::string where = "modes[" + std::to_string(i) + "]";
            ModeSpec s;
            s.name = require_string(md, "name", where);
            std::string kind = md.value("kind", "boson");
            if (kind == "boson" || kind == "bosonic") {
                s.kind = ModeKind::Boson;
                s.truncation = md.value("truncation", 10);
            } else if (kind == "tls" || kind == "two-level" || kind == "qubit") {
                s.kind = ModeKind::TwoLevel;
            } else {
                fail(ErrorKind::Validation, where + ".kind: unknown kind '" + kind + "'");
            }
            modes.push_back(s);
        }
    }
    int cap = doc.value("degree_cap", 12);
    try {
        m.modes = std::make_shared<ModeTable>(modes, cap);
    } catch (const Error& e) {
        fail(ErrorKind::Validation, std::string("modes: ") + e.what());
    }

    if (doc.contains("symbols")) {
        for (std::size_t i = 0; i < doc.at("symbols").size(); ++i) {
            const json& sd = doc.at("symbols")[i];
            std::string where = "symbols[" + std::to_string(i) + "]";
            SymbolDecl d;
            d.name = require_string(sd, "name", where);
            if (!is_identifier(d.name) || reserved_model_name(d.name))
                fail(ErrorKind::Validation, where + ".name: '" + d.name + "' is not a valid symbol name");
            if (m.find(d.name)) fail(ErrorKind::Validation, where + ".name: duplicate symbol '" + d.name + "'");
            if (m.modes->index_of(d.name) >= 0)
                fail(ErrorKind::Validation, where + ".name: '" + d.name + "' clashes with a mode name");
            d.complex = sd.value("complex", false);
            try {
                d.id = intern_symbol(d.name, !d.complex);
            } catch (const Error& e) {
                fail(ErrorKind::Validation, where + ": " + e.what());
            }
            if (sd.contains("value") && !sd.at("value").is_null()) {
                auto v = parse_value(sd.at("value"), where + ".value");
                if (sd.contains("unit")) v *= parse_value(json(sd.at("unit")), where + ".unit");
                if (!d.complex && v.imag() != 0) fail(ErrorKind::Validation, where + ".value: real symbol given a complex value");
                d.value = v;
            }
            m.symbols.push_back(d);
        }
        // aliases after all names are known
        for (std::size_t i = 0; i < doc.at("symbols").size(); ++i) {
            const json& sd = doc.at("symbols")[i];
            if (!sd.contains("equals")) continue;
            std::string where = "symbols[" + std::to_string(i) + "].equals";
            if (!sd.at("equals").is_string()) fail(ErrorKind::Validation, where + ": expected a frequency string");
            FreqExpr f;
            try {
                f = parse_freq(sd.at("equals").get<std::string>(), m.resolver());
            } catch (const Error& e) {
                fail(e.kind() == ErrorKind::Reference ? ErrorKind::Reference : ErrorKind::Validation,
                     where + ": " + e.what());
            }
            if (f.contains(m.symbols[i].id)) fail(ErrorKind::Validation, where + ": alias refers to itself");
            m.symbols[i].equals = f;
        }
        for (auto& s : m.symbols)
            if (s.equals) {
                s.equals = m.substitute_aliases(*s.equals);
                if (s.equals->contains(s.id)) fail(ErrorKind::Validation, "symbol '" + s.name + "' has a cyclic alias");
            }
        Assignment vals = m.values();
        for (auto& s : m.symbols)
            if (s.equals && !s.value) {
                bool all = true;
                for (const auto& [id, c] : s.equals->terms()) all = all && vals.has(id);
                if (all) s.value = s.equals->eval(vals);
            }
    }

    m.filter = load_filter(doc);

    if (doc.contains("terms")) {
        for (std::size_t i = 0; i < doc.at("terms").size(); ++i) {
            const json& td = doc.at("terms")[i];
            std::string where = "terms[" + std::to_string(i) + "]";
            HamiltonianTermSpec t;
            try {
                t.coeff = parse_scalar(require_string(td, "coupling", where), m.resolver(), m.filter.kind);
                t.freq = m.substitute_aliases(parse_freq(require_string(td, "frequency", where), m.resolver()));
                t.op = parse_operator(require_string(td, "operator", where), m.modes);
            } catch (const Error& e) {
                ErrorKind k = e.kind() == ErrorKind::Reference ? ErrorKind::Reference : ErrorKind::Validation;
                fail(k, where + ": " + e.what());
            }
            for (SymId s : t.coeff.free_symbols()) {
                if (s == sym_t() || s == sym_tau())
                    fail(ErrorKind::Validation, where + ".coupling: couplings must not depend on t or tau");
                for (const auto& d : m.symbols)
                    if (d.id == s && d.equals)
                        fail(ErrorKind::Validation, where + ".coupling: aliased symbol '" + d.name + "' in a coupling");
            }
            if (t.freq.contains(sym_t()) || t.freq.contains(sym_tau()))
                fail(ErrorKind::Validation, where + ".frequency: frequencies must be built from declared symbols");
            m.terms.push_back(std::move(t));
        }
    }

    if (doc.contains("ramps")) {
        for (std::size_t i = 0; i < doc.at("ramps").size(); ++i) {
            const json& rd = doc.at("ramps")[i];
            std::string where = "ramps[" + std::to_string(i) + "]";
            RampSpec r;
            auto sym_of = [&](const char* key) {
                std::string n = require_string(rd, key, where);
                const SymbolDecl* d = m.find(n);
                if (!d) fail(ErrorKind::Reference, where + "." + key + ": undeclared symbol '" + n + "'");
                return d->id;
            };
            r.symbol = sym_of("symbol");
            r.duration = sym_of("duration");
            std::string prof = rd.value("profile", "up");
            if (prof == "up")
                r.profile = RampProfile::Up;
            else if (prof == "down")
                r.profile = RampProfile::Down;
            else
                fail(ErrorKind::Validation, where + ".profile: expected 'up' or 'down'");
            if (rd.contains("base_frequency"))
                r.base_frequency = parse_freq(rd.at("base_frequency").get<std::string>(), m.resolver());
            for (const auto& o : m.ramps)
                if (o.symbol == r.symbol) fail(ErrorKind::Validation, where + ": symbol ramped twice");
            m.ramps.push_back(r);
        }
    }

    bool autocomplete = opts.autocomplete || doc.value("autocomplete", false);
    if (autocomplete) autocomplete_terms(m.terms, m.modes);
    check_hermiticity(m.terms, m.modes);
    return m;
}

ModelSpec load_model_file(const std::string& path, const LoadOptions& opts) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot read model file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        fail(ErrorKind::Validation, "model file '" + path + "': " + e.what());
    }
    return load_model(doc, opts);
}

json model_to_json(const ModelSpec& m) {
    json doc;
    doc["modes"] = json::array();
    for (const auto& md : m.modes->modes()) {
        json j{{"name", md.name}, {"kind", md.kind == ModeKind::Boson ? "boson" : "tls"}};
        if (md.kind == ModeKind::Boson) j["truncation"] = md.truncation;
        doc["modes"].push_back(j);
    }
    doc["symbols"] = json::array();
    for (const auto& s : m.symbols) {
        json j{{"name", s.name}};
        if (s.complex) j["complex"] = true;
        if (s.equals) j["equals"] = s.equals->str();
        if (s.value && !s.equals) {
            if (s.complex)
                j["value"] = {s.value->real(), s.value->imag()};
            else
                j["value"] = s.value->real();
        }
        doc["symbols"].push_back(j);
    }
    json f{{"kind", m.filter.kind == FilterKind::Gaussian ? "gaussian" : "table"}};
    if (m.filter.tau) f["tau"] = *m.filter.tau;
    if (m.filter.kind == FilterKind::CustomTable) {
        f["table"] = json::array();
        for (const auto& [w, v] : m.filter.table) f["table"].push_back({w, v});
    }
    doc["filter"] = f;
    doc["terms"] = json::array();
    for (const auto& t : m.terms)
        for (const auto& [k, c] : t.op.terms())
            doc["terms"].push_back({{"coupling", (t.coeff * c).str()},
                                    {"frequency", t.freq.str()},
                                    {"operator", key_str(*m.modes, k)}});
    if (!m.ramps.empty()) {
        doc["ramps"] = json::array();
        for (const auto& r : m.ramps)
            doc["ramps"].push_back({{"symbol", symbol_name(r.symbol)},
                                    {"duration", symbol_name(r.duration)},
                                    {"profile", r.profile == RampProfile::Up ? "up" : "down"},
                                    {"base_frequency", r.base_frequency.str()}});
    }
    return doc;
}

std::vector<HamiltonianTermSpec> encode_ramps(const ModelSpec& m) {
    if (m.ramps.empty()) return m.terms;
    SymId delta = sym_delta();
    FreqExpr d = FreqExpr::symbol(delta);
    // 1/(2 i delta)
    ScalarExpr inv2id = ScalarExpr::sym(delta, -1).scaled(Coef(Rational(0), Rational(-1, 2)));
    std::vector<HamiltonianTermSpec> out;
    for (std::size_t i = 0; i < m.terms.size(); ++i) {
        const auto& t = m.terms[i];
        const RampSpec* ramp = nullptr;
        for (const auto& r : m.ramps)
            if (t.coeff.depends_on(r.symbol)) {
                if (ramp)
                    fail(ErrorKind::Validation,
                         "terms[" + std::to_string(i) + "]: coupling depends on more than one ramped symbol");
                ramp = &r;
            }
        if (!ramp) {
            out.push_back(t);
            continue;
        }
        auto series = t.coeff.laurent(ramp->symbol, 1);
        if (series.size() != 1 || series.begin()->first != 1)
            fail(ErrorKind::Validation, "terms[" + std::to_string(i) + "]: coupling must be linear in ramped symbol '" +
                                            symbol_name(ramp->symbol) + "'");
        ScalarExpr slope = t.coeff * ScalarExpr::sym(ramp->duration, -1);
        if (ramp->profile == RampProfile::Down) {
            out.push_back(t);
            slope = -slope;
        }
        // slope * t * e^{-i w t} as the regulator limit of a symmetric phasor pair
        out.push_back({slope * inv2id, t.freq - d, t.op});
        out.push_back({-(slope * inv2id), t.freq + d, t.op});
    }
    return out;
}

void apply_params(ModelSpec& m, const json& params) {
    if (!params.is_object()) fail(ErrorKind::Validation, "params: expected an object of name: value pairs");
    for (const auto& [name, v] : params.items()) {
        if (name == "tau") {
            m.filter.tau = parse_value(v, "params.tau").real();
            continue;
        }
        SymbolDecl* d = nullptr;
        for (auto& s : m.symbols)
            if (s.name == name) d = &s;
        if (!d) fail(ErrorKind::Reference, "params: undeclared symbol '" + name + "'");
        d->value = parse_value(v, "params." + name);
    }
    Assignment vals = m.values();
    for (auto& s : m.symbols)
        if (s.equals) {
            bool all = true;
            for (const auto& [id, c] : s.equals->terms()) all = all && vals.has(id);
            if (all) s.value = s.equals->eval(vals);
        }
}

}  // namespace stcg
