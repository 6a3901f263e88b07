#include <cmath>
#include <random>

#include "doctest.h"
#include "error.hpp"
#include "filter.hpp"
#include "freq.hpp"
#include "scalar.hpp"

using namespace stcg;

namespace {

SymbolResolver resolver() {
    return [](const std::string& n) { return intern_symbol(n); };
}

FreqExpr F(const std::string& s) { return parse_freq(s, resolver()); }

}  // namespace

TEST_CASE("freq zero test is exact") {
    CHECK((F("wa") - F("wa")).is_zero());
    CHECK_FALSE((F("wa") - F("wc")).is_zero());
    CHECK((F("2*wc") - F("2*wc") + F("wa").scaled(0)).is_zero());
    CHECK(F("0").is_zero());
}

TEST_CASE("freq grammar") {
    CHECK(F("wc + wa").str() == "wa + wc");
    CHECK(F("-2*wp").str() == "-2*wp");
    CHECK(F("5/6*wd").str() == "5/6*wd");
    CHECK_THROWS_AS(F("wc +"), Error);
    CHECK_THROWS_AS(F("2*"), Error);
}

TEST_CASE("freq zero-test soundness on random pairs") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
    std::vector<SymId> s{intern_symbol("za"), intern_symbol("zb"), intern_symbol("zc")};
    auto sample = [&] {
        FreqExpr x;
        for (SymId id : s) x += FreqExpr::symbol(id, rat(num(rng), den(rng)));
        return x;
    };
    for (int i = 0; i < 1000; ++i) {
        FreqExpr x = sample(), y = sample();
        CHECK((x - x).is_zero());
        if (x != y) CHECK_FALSE((x - y).is_zero());
    }
}

TEST_CASE("filter normalization and values") {
    FilterSpec g = gaussian_filter(0.2e-9);
    CHECK(filter_eval(g, 0.0, 0.2e-9) == 1.0);
    double w = 2 * M_PI * 4e9, tau = 0.2e-9;
    CHECK(filter_eval(g, w, tau) == doctest::Approx(std::exp(-w * w * tau * tau / 2)));
    CHECK(filter_eval(g, w, tau) == doctest::Approx(3.2686e-6).epsilon(1e-3));
    CHECK(ScalarExpr::filter(FilterKind::Gaussian, FreqExpr()).is_constant());
    CHECK(ScalarExpr::filter(FilterKind::Gaussian, F("wa - wc")).str(RenderStyle::Pretty) ==
          "exp(-(wa - wc)^2*tau^2/2)");
    FilterSpec t = table_filter({{-1, 0.5}, {0, 2}, {1, 0.5}});
    CHECK(t.eval(0, 0) == 1.0);
    CHECK_THROWS_AS(t.eval(2, 0), Error);
}

TEST_CASE("scalar evaluation") {
    CHECK(ScalarExpr(1).eval(Assignment{}) == std::complex<double>(1));
    SymId g = intern_symbol("g"), tau = sym_tau();
    ScalarExpr e = (ScalarExpr::sym(g, 2) * ScalarExpr::sym(tau, 2)).scaled(rat(1, 2)) * ScalarExpr::lin(F("wc - wa"));
    Assignment a;
    a.set(g, 2 * M_PI * 0.4e9);
    a.set(tau, 0.2e-9);
    a.set(intern_symbol("wc"), 1.0);
    a.set(intern_symbol("wa"), 1.0);
    CHECK(e.eval(a) == std::complex<double>(0));
    a.set(intern_symbol("wc"), 2 * M_PI * 0.1e9);
    a.set(intern_symbol("wa"), 0.0);
    double gv = 2 * M_PI * 0.4e9, tv = 0.2e-9;
    CHECK(e.eval(a).real() == doctest::Approx(gv * gv * tv * tv / 2 * 2 * M_PI * 0.1e9).epsilon(1e-14));
    Assignment empty;
    CHECK_THROWS_AS(e.eval(empty), Error);
    ScalarExpr inv = ScalarExpr::lin(F("wc - wa"), -1);
    a.set(intern_symbol("wc"), 0.0);
    try {
        inv.eval(a);
        FAIL("expected division error");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::Division);
    }
    CHECK_THROWS_AS(ScalarExpr::lin(F("wa - wa"), -1), Error);
}

TEST_CASE("scalar eval is a homomorphism") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2, 2);
    SymId x = intern_symbol("hx"), y = intern_symbol("hy");
    ScalarExpr a = ScalarExpr::sym(x, 2) + ScalarExpr::filter(FilterKind::Gaussian, F("hx - hy")) * ScalarExpr::imag();
    ScalarExpr b = ScalarExpr::lin(F("hx + 2*hy"), -1) + ScalarExpr(3);
    for (int i = 0; i < 50; ++i) {
        Assignment as;
        as.set(x, u(rng));
        as.set(y, u(rng));
        as.set(sym_tau(), 0.5 + std::abs(u(rng)));
        auto va = a.eval(as), vb = b.eval(as);
        CHECK(std::abs((a * b).eval(as) - va * vb) <= 1e-12 * std::abs(va * vb));
        CHECK(std::abs((a + b).eval(as) - (va + vb)) <= 1e-12 * (std::abs(va) + std::abs(vb)));
    }
}

TEST_CASE("gaussian expansion coefficients") {
    CHECK(gaussian_expansion_c(0, 0) == 1);
    CHECK(gaussian_expansion_c(3, -1) == 0);
    CHECK(gaussian_expansion_c(1, 1) == 0);
    CHECK(gaussian_expansion_c(1, 0) == -1);
    CHECK(gaussian_expansion_c(2, 1) == -1);
    CHECK(gaussian_expansion_c(4, 2) == 3);
}

TEST_CASE("laurent expansion matches numeric series") {
    SymId x = intern_symbol("lx");
    FreqExpr L = F("lw") + FreqExpr::symbol(x);
    ScalarExpr e = ScalarExpr::filter(FilterKind::Gaussian, L) * ScalarExpr::sym(x, -1) * ScalarExpr::lin(L, -1);
    auto series = e.laurent(x, 2);
    Assignment a;
    a.set(intern_symbol("lw"), 0.7);
    a.set(sym_tau(), 1.3);
    double h = 1e-3;
    a.set(x, h);
    std::complex<double> approx = 0;
    for (auto& [n, c] : series) approx += c.eval(a) * std::pow(h, n);
    CHECK(std::abs(approx - e.eval(a)) < 1e-8);
}
