#include <cmath>

#include "doctest.h"
#include "error.hpp"
#include "expr_parse.hpp"
#include "model.hpp"

using namespace stcg;
using nlohmann::json;

namespace {

SymbolResolver names(std::initializer_list<const char*> real, std::initializer_list<const char*> complex = {}) {
    std::map<std::string, SymId> ids;
    for (const char* n : real) ids[n] = intern_symbol(n, true);
    for (const char* n : complex) ids[n] = intern_symbol(n, false);
    return [ids](const std::string& n) -> SymId {
        if (n == "tau") return sym_tau();
        auto it = ids.find(n);
        if (it == ids.end()) fail(ErrorKind::Reference, "undeclared symbol '" + n + "'");
        return it->second;
    };
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::Usage;
}

}  // namespace

TEST_CASE("quantities with units") {
    CHECK(parse_quantity("2pi*2GHz") == doctest::Approx(2 * M_PI * 2e9));
    CHECK(parse_quantity("0.2ns") == doctest::Approx(0.2e-9));
    CHECK(parse_quantity("-58.4MHz") == doctest::Approx(-58.4e6));
    CHECK(parse_quantity("-2pi*67MHz") == doctest::Approx(-2 * M_PI * 67e6));
    CHECK(parse_quantity("1e9") == doctest::Approx(1e9));
    CHECK(parse_quantity("50ns") == doctest::Approx(50e-9));
    CHECK(parse_quantity("3us") == doctest::Approx(3e-6));
    CHECK_THROWS_AS(parse_quantity("2 parsecs"), Error);
    CHECK_THROWS_AS(parse_quantity(""), Error);
}

TEST_CASE("scalar expression grammar") {
    auto r = names({"g", "wa", "wc"}, {"Pz"});
    Assignment a;
    a.set("g", 0.5);
    a.set("wa", 2.0);
    a.set("wc", 1.5);
    a.set("Pz", std::complex<double>(0.3, -0.7));
    a.set(sym_tau(), 0.4);
    auto ev = [&](const std::string& s) { return parse_scalar(s, r).eval(a); };
    CHECK(ev("g/2").real() == doctest::Approx(0.25));
    CHECK(ev("g^2/(wa - wc)").real() == doctest::Approx(0.5));
    CHECK(ev("3*i*g").imag() == doctest::Approx(1.5));
    CHECK(ev("Pz*conj(Pz)").real() == doctest::Approx(0.58));
    CHECK(ev("Pz^2*g^-1").real() == doctest::Approx((0.09 - 0.49) / 0.5));
    CHECK(ev("f(wa - wc)").real() == doctest::Approx(std::exp(-0.25 * 0.16 / 2)));
    CHECK(ev("1.5e-1*wa").real() == doctest::Approx(0.3));
    CHECK(ev("-(g + wa)").real() == doctest::Approx(-2.5));
    CHECK(kind_of([&] { parse_scalar("g +", r); }) == ErrorKind::Parse);
    CHECK(kind_of([&] { parse_scalar("h", r); }) == ErrorKind::Reference);
    CHECK(kind_of([&] { parse_scalar("g/(g + wa^2)", r); }) == ErrorKind::Parse);
    auto round = parse_scalar("1/2*g^2*tau^2*(wa - wc)^-1*f(wa + wc)", r);
    CHECK(parse_scalar(round.str(), r).structurally_equal(round));
}

TEST_CASE("model validation errors name the field") {
    json base = json::parse(R"({
      "modes": [{"name": "a", "kind": "boson", "truncation": 4}],
      "symbols": [{"name": "g", "value": "2pi*1MHz"}, {"name": "w"}],
      "terms": [{"coupling": "g", "frequency": "w", "operator": "a"},
                {"coupling": "g", "frequency": "-w", "operator": "a'"}]})");
    CHECK(load_model(base).terms.size() == 2);

    json bad_kind = base;
    bad_kind["modes"][0]["kind"] = "fermion";
    try {
        load_model(bad_kind);
        FAIL("expected a validation error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Validation);
        CHECK(std::string(e.what()).find("modes[0].kind") != std::string::npos);
    }
    json bad_op = base;
    bad_op["terms"][1]["operator"] = "b'";
    CHECK(kind_of([&] { load_model(bad_op); }) == ErrorKind::Validation);
    json bad_ref = base;
    bad_ref["terms"][1]["frequency"] = "-v";
    CHECK(kind_of([&] { load_model(bad_ref); }) == ErrorKind::Reference);
    json dup = base;
    dup["symbols"].push_back({{"name", "g"}});
    CHECK(kind_of([&] { load_model(dup); }) == ErrorKind::Validation);
    json missing = base;
    missing["terms"].erase(1);
    CHECK(kind_of([&] { load_model(missing); }) == ErrorKind::Hermiticity);
    missing["autocomplete"] = true;
    CHECK(load_model(missing).terms.size() == 2);
    json time_coupling = base;
    time_coupling["terms"][0]["coupling"] = "g*t";
    time_coupling["terms"][1]["coupling"] = "g*t";
    CHECK(kind_of([&] { load_model(time_coupling); }) == ErrorKind::Validation);
}

TEST_CASE("parameter overrides and json round trip") {
    json doc = json::parse(R"J({
      "modes": [{"name": "a", "kind": "boson", "truncation": 4}, {"name": "q", "kind": "qubit"}],
      "symbols": [{"name": "g", "value": 1.0}, {"name": "wq", "value": 2.0}, {"name": "wr", "equals": "wq"},
                  {"name": "Pc", "complex": true, "value": [0, 2]}],
      "filter": {"kind": "gaussian", "tau": "0.5ns"},
      "terms": [{"coupling": "g*Pc", "frequency": "wr", "operator": "a*sp"},
                {"coupling": "g*conj(Pc)", "frequency": "-wq", "operator": "a'*sm"}]})J");
    ModelSpec m = load_model(doc);
    CHECK(frequency_groups(m.terms, m.modes).size() == 2);
    CHECK(m.find("wr")->value->real() == doctest::Approx(2.0));
    apply_params(m, json{{"g", "2pi*1MHz"}, {"tau", 1e-9}});
    CHECK(m.values().get(*find_symbol("g")).real() == doctest::Approx(2 * M_PI * 1e6));
    CHECK(*m.filter.tau == doctest::Approx(1e-9));
    CHECK(kind_of([&] { apply_params(m, json{{"zz", 1}}); }) == ErrorKind::Reference);
    ModelSpec back = load_model(model_to_json(m));
    CHECK(model_to_json(back).dump() == model_to_json(m).dump());
}
