#include <cmath>
#include <fstream>

#include "doctest.h"
#include "effective.hpp"
#include "error.hpp"
#include "expr_parse.hpp"

using namespace stcg;
using nlohmann::json;

namespace {

std::string preset(const std::string& name) { return std::string(STCG_SOURCE_DIR) + "/presets/" + name + ".json"; }

const ScalarExpr* find_h(const EffectiveModel& e, const std::string& op) {
    for (const auto& h : e.hamiltonian)
        if (key_str(*e.modes, h.op.terms().begin()->first) == op && h.freq.is_zero()) return &h.coeff;
    return nullptr;
}

const ScalarExpr* find_d(const EffectiveModel& e, const std::string& L, const std::string& J) {
    for (const auto& d : e.dissipators)
        if (key_str(*e.modes, d.L) == L && key_str(*e.modes, d.J) == J && d.freq.is_zero()) return &d.rate;
    return nullptr;
}

bool same(const ModelSpec& m, const ScalarExpr& x, const std::string& ref) {
    return (x - parse_scalar(ref, m.resolver())).is_zero();
}

// Rational coefficient of one monomial of x.
std::optional<Coef> coefficient_of(const ScalarExpr& x, const ScalarExpr& monomial) {
    REQUIRE(monomial.terms().size() == 1);
    auto it = x.terms().find(monomial.terms().begin()->first);
    if (it == x.terms().end()) return std::nullopt;
    return it->second;
}

json moderate_parametron() {
    json doc = json::parse(std::ifstream(preset("parametron")));
    std::map<std::string, double> v{{"wp", 3.0}, {"Delta0", -0.3}, {"beta0", 0.4}, {"chi", 0.2}, {"T", 5.0}};
    for (auto& s : doc["symbols"]) s["value"] = v.at(s["name"].get<std::string>());
    doc["filter"]["tau"] = 0.5;
    return doc;
}

}  // namespace

TEST_CASE("presets load without autocomplete") {
    for (const char* n : {"rabi", "parametron", "duffing"}) {
        ModelSpec m = load_model_file(preset(n));
        CHECK(!m.terms.empty());
        for (const auto& s : m.symbols) CHECK(s.value.has_value());
        CHECK(m.filter.tau.has_value());
    }
    ModelSpec r = load_model_file(preset("rabi"));
    CHECK(*r.filter.tau == doctest::Approx(0.2e-9));
    CHECK(r.values().get(*find_symbol("g")).real() == doctest::Approx(2 * M_PI * 0.4e9));
}

TEST_CASE("parametron ramp encoding") {
    ModelSpec m = load_model_file(preset("parametron"));
    auto enc = encode_ramps(m);
    CHECK(enc.size() == 22);
    SymId beta0 = *find_symbol("beta0");
    int beta_regulated = 0;
    for (const auto& t : enc)
        if (t.coeff.depends_on(beta0) && t.freq.contains(sym_delta())) ++beta_regulated;
    CHECK(beta_regulated == 12);
}

TEST_CASE("parametron second order in the IR limit") {
    ModelSpec m = load_model_file(preset("parametron"));
    DeriveOptions o;
    o.order = 2;
    o.ir_limit = true;
    EffectiveModel e = derive(m, o);
    const ScalarExpr* gamma = find_d(e, "a'^2", "a^2");
    REQUIRE(gamma);
    CHECK(same(m, *gamma, "beta0/T*(2*tau^2 + 1/2*wp^-2)*beta0*t/T"));
    const ScalarExpr* g11 = find_h(e, "a'*a");
    REQUIRE(g11);
    CHECK(same(m, *g11, "Delta0*(1 - t/T) - 2*((beta0*t/T)^2 + (beta0*tau/T)^2)/wp - 4*chi^2/wp"));
    const ScalarExpr* g22 = find_h(e, "a'^2*a^2");
    REQUIRE(g22);
    CHECK(same(m, *g22, "-chi/2 - 17/4*chi^2/wp"));
    SymId T = *find_symbol("T");
    for (const auto& d : e.dissipators)
        for (const auto& [mono, c] : d.rate.terms()) {
            ScalarExpr single = ScalarExpr(c);
            for (const auto& [a, p] : mono) single *= ScalarExpr::atom_power(a, p);
            auto series = single.laurent(T, 0);
            REQUIRE(series.size() == 1);
            CHECK(series.begin()->first < 0);
        }
    std::string why;
    CHECK_MESSAGE(hermiticity_closed(e, &why), why);
}

TEST_CASE("regulator limit agrees with the numeric fallback") {
    ModelSpec m = load_model(moderate_parametron());
    DeriveOptions o;
    o.order = 2;
    EffectiveModel limit = derive(m, o);
    o.keep_regulator = true;
    o.drop_numeric_zeros = false;
    EffectiveModel kept = derive(m, o);
    Assignment a = m.values();
    a.set(sym_t(), 1.3);

    std::map<std::pair<std::string, std::string>, std::vector<std::pair<ScalarExpr, Rational>>> groups;
    for (const auto& h : kept.hamiltonian) {
        std::string key = key_str(*m.modes, h.op.terms().begin()->first);
        groups[{key, h.freq.without(sym_delta()).str()}].push_back({h.coeff, h.freq.coeff(sym_delta())});
    }
    int compared = 0;
    for (const auto& h : limit.hamiltonian) {
        std::string key = key_str(*m.modes, h.op.terms().begin()->first);
        auto it = groups.find({key, h.freq.str()});
        REQUIRE(it != groups.end());
        auto exact = h.coeff.eval(a, &m.filter);
        auto numeric = numeric_regulator_limit(it->second, a, m.filter);
        CHECK(std::abs(exact - numeric) <= 1e-6 * std::max(1.0, std::abs(exact)));
        ++compared;
    }
    CHECK(compared >= 8);
}

TEST_CASE("non-cancelling regulator powers are divergent") {
    std::vector<std::pair<ScalarExpr, Rational>> parts{{ScalarExpr::sym(sym_delta(), -1), Rational(1)}};
    try {
        regulator_limit(parts, "test term");
        FAIL("expected a divergent-limit error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Divergent);
    }
    std::vector<std::pair<ScalarExpr, Rational>> cancel{{ScalarExpr::sym(sym_delta(), -1), Rational(1)},
                                                        {-ScalarExpr::sym(sym_delta(), -1), Rational(-1)}};
    ScalarExpr r = regulator_limit(cancel, "test term");
    CHECK(r.structurally_equal(ScalarExpr::sym(sym_t()).scaled(Coef(Rational(0), Rational(-2)))));
}

TEST_CASE("duffing third order in the IR limit") {
    ModelSpec m = load_model_file(preset("duffing"));
    DeriveOptions o;
    o.order = 3;
    o.ir_limit = true;
    EffectiveModel e = derive(m, o);
    const ScalarExpr* k4 = find_h(e, "a'^4*a^4");
    const ScalarExpr* k3 = find_h(e, "a'^3*a^3");
    REQUIRE(k4);
    REQUIRE(k3);
    auto c4 = coefficient_of(*k4, parse_scalar("g4^3*w^-2", m.resolver()));
    auto c3 = coefficient_of(*k3, parse_scalar("g4^3*w^-2", m.resolver()));
    REQUIRE(c4);
    REQUIRE(c3);
    CHECK(*c4 == Coef(Rational(60)));
    CHECK(*c3 == Coef(Rational(480)));
    auto k3_quad = coefficient_of(*k3, parse_scalar("g4^2*w^-1", m.resolver()));
    REQUIRE(k3_quad);
    CHECK(*k3_quad == Coef(Rational(-68, 5)));
    for (const auto& h : e.hamiltonian) CHECK(h.freq.is_zero());
}
