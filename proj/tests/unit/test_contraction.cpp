#include <cmath>
#include <random>

#include "contraction.hpp"
#include "doctest.h"
#include "error.hpp"

using namespace stcg;

namespace {

FreqExpr sym(const std::string& n) { return FreqExpr::symbol(intern_symbol(n)); }

// Generic tuple of fresh symbols x1.., y1.. of the given weight.
FrequencyTuple generic(int l, int r) {
    FrequencyTuple t;
    for (int i = 1; i <= l; ++i) t.mu.push_back(sym("x" + std::to_string(i)));
    for (int i = 1; i <= r; ++i) t.nu.push_back(sym("y" + std::to_string(i)));
    return t;
}

Assignment assign_generic(const std::vector<double>& mu, const std::vector<double>& nu, double tau) {
    Assignment a;
    for (std::size_t i = 0; i < mu.size(); ++i) a.set("x" + std::to_string(i + 1), mu[i]);
    for (std::size_t i = 0; i < nu.size(); ++i) a.set("y" + std::to_string(i + 1), nu[i]);
    a.set(sym_tau(), tau);
    return a;
}

double f(double w, double tau) { return std::exp(-w * w * tau * tau / 2); }

const FilterSpec gauss = gaussian_filter();

}  // namespace

TEST_CASE("vector factorial") {
    FreqExpr a = sym("m1"), b = sym("m2"), c = sym("m3");
    auto v = vector_factorial({a, b, c});
    CHECK_FALSE(v.singular());
    CHECK(v.value.structurally_equal(ScalarExpr::lin(a) * ScalarExpr::lin(a + b) * ScalarExpr::lin(a + b + c)));
    CHECK(vector_factorial({}).value.structurally_equal(ScalarExpr(1)));
    auto s = vector_factorial({a, -a});
    CHECK(s.singular());
    CHECK(s.zero_indices == std::vector<int>{2});
}

TEST_CASE("diagram contributions") {
    FreqExpr w = sym("w"), wp = sym("wq");
    auto d10 = enumerate_diagrams(1, 0)[0];
    CHECK(diagram_contribution(d10, {{w}, {}}, gauss).structurally_equal(ScalarExpr::filter(FilterKind::Gaussian, w)));
    Diagram single{{{2, 0}}, 2, 0};
    Diagram split{{{1, 0}, {1, 0}}, 2, 0};
    ScalarExpr fw = ScalarExpr::filter(FilterKind::Gaussian, w), fp = ScalarExpr::filter(FilterKind::Gaussian, wp);
    CHECK(diagram_contribution(single, {{w, wp}, {}}, gauss)
              .structurally_equal(ScalarExpr::filter(FilterKind::Gaussian, w + wp) * ScalarExpr::lin(w, -1)));
    CHECK(diagram_contribution(split, {{w, wp}, {}}, gauss).structurally_equal(-(fw * fp * ScalarExpr::lin(w, -1))));
    try {
        diagram_contribution(single, {{w, -w}, {}}, gauss);
        FAIL("expected singular error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Singular);
    }
}

TEST_CASE("low-order closed forms at random points") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-3, 3), ut(0.2, 2);
    ScalarExpr c10 = contraction_coefficient(generic(1, 0), gauss).value;
    ScalarExpr c20 = contraction_coefficient(generic(2, 0), gauss).value;
    ScalarExpr c11 = contraction_coefficient(generic(1, 1), gauss).value;
    for (int i = 0; i < 100; ++i) {
        double w = u(rng), wp = u(rng), tau = ut(rng);
        // argument order: mu_1 sits next to the density matrix
        double ref20 = (f(w + wp, tau) - f(w, tau) * f(wp, tau)) / wp;
        auto a = assign_generic({wp, w}, {}, tau);
        CHECK(std::abs(c20.eval(a) - ref20) <= 1e-10 * std::abs(ref20));
        CHECK(std::abs(c10.eval(assign_generic({w}, {}, tau)) - f(w, tau)) <= 1e-12);
        auto b = assign_generic({w}, {wp}, tau);
        double ref11 = -(f(w + wp, tau) - f(w, tau) * f(wp, tau)) / wp;
        CHECK(std::abs(c11.eval(b) - ref11) <= 1e-10 * std::abs(ref11));
    }
}

TEST_CASE("singular regularization matches the numeric limit") {
    FreqExpr w = sym("w");
    auto r = contraction_coefficient({{FreqExpr(), w}, {}}, gauss);
    CHECK(r.singular_regularized);
    Assignment a;
    a.set("w", 1.3);
    a.set(sym_tau(), 0.8);
    double expect = -1.3 * 0.64 * f(1.3, 0.8);
    CHECK(std::abs(r.value.eval(a) - expect) <= 1e-12);
    CHECK_FALSE(r.value.depends_on(sym_eps()));

    FilterSpec table = table_filter({{-10, 0}, {0, 1}, {10, 0}});
    Diagram single{{{2, 0}}, 2, 0};
    try {
        regularize_singular(single, {{FreqExpr(), w}, {}}, table);
        FAIL("expected unsupported filter");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnsupportedFilter);
    }
}

TEST_CASE("continuity at singular points") {
    FreqExpr a = sym("ca"), b = sym("cb");
    std::vector<FrequencyTuple> cases = {
        {{a, -a}, {}},           {{a, b, -b}, {}},     {{a}, {-a}},        {{a, -a}, {b}},
        {{FreqExpr(), a}, {}},   {{a, -a, b}, {}},     {{a, b}, {-a - b}}, {{a}, {b, -b}},
        {{a, -a, a, -a}, {}},    {{a, -a}, {a, -a}},
    };
    int regularized = 0;
    for (const auto& t : cases) {
        auto res = contraction_coefficient(t, gauss);
        int singular = 0;
        for_each_diagram(t.l(), t.r(), [&](const Diagram& d) { singular += diagram_is_singular(d, t); });
        CHECK(res.singular_regularized == (singular > 0));
        ScalarExpr gen = contraction_coefficient(generic(t.l(), t.r()), gauss).value;
        Assignment at;
        at.set("ca", 0.9);
        at.set("cb", -0.6);
        at.set(sym_tau(), 1.1);
        std::complex<double> reg = res.value.eval(at);
        std::vector<double> mu, nu;
        for (const auto& m : t.mu) mu.push_back(m.eval(at).real());
        for (const auto& n : t.nu) nu.push_back(n.eval(at).real());
        // Approach along a generic direction with five shrinking offsets, extrapolated to zero.
        std::vector<double> dir = {0.31, -0.17, 0.23, 0.11, -0.29, 0.07};
        std::vector<double> hs;
        std::vector<std::complex<double>> vals;
        for (int k = 0; k < 5; ++k) {
            double h = 1e-3 * std::pow(0.5, k);
            auto m = mu, n = nu;
            std::size_t d = 0;
            for (auto& x : m) x += h * dir[d++];
            for (auto& x : n) x += h * dir[d++];
            hs.push_back(h);
            vals.push_back(gen.eval(assign_generic(m, n, 1.1)));
        }
        for (std::size_t j = 1; j < vals.size(); ++j)
            for (std::size_t i = vals.size() - 1; i >= j; --i)
                vals[i] = (hs[i - j] * vals[i] - hs[i] * vals[i - 1]) / (hs[i - j] - hs[i]);
        double scale = std::max(std::abs(reg), 1e-3);
        CHECK(std::abs(vals.back() - reg) <= 1e-6 * scale);
        regularized += res.singular_regularized;
    }
    CHECK(regularized >= 7);
}

TEST_CASE("oracle agrees with the closed form") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-2.5, 2.5);
    std::vector<double> times = {0.0, 0.37, 1.1, 2.9, 5.3, 8.0};
    for (int l = 1; l <= 3; ++l)
        for (int r = 0; l + r <= 3; ++r) {
            ScalarExpr c = contraction_coefficient(generic(l, r), gauss).value;
            for (int s = 0; s < 50; ++s) {
                std::vector<double> mu(l), nu(r);
                for (auto& x : mu) x = u(rng);
                for (auto& x : nu) x = u(rng);
                double tau = 0.9;
                auto o = bubble_factor_oracle(mu, nu, gauss, tau, times);
                CHECK(o.homogeneous);
                auto v = c.eval(assign_generic(mu, nu, tau));
                CHECK(std::abs(o.amplitude - v) <= 1e-9 * std::max(std::abs(v), 1e-12));
                CHECK(std::abs(v.imag()) <= 1e-12 * std::abs(v));
            }
        }
    auto o = bubble_factor_oracle({0.7}, {}, gauss, 1.2, times);
    CHECK(std::abs(o.amplitude - f(0.7, 1.2)) < 1e-14);
}

TEST_CASE("parity and mirror symmetries") {
    std::mt19937_64 rng(3);
    for (int l = 1; l <= 4; ++l)
        for (int r = 0; l + r <= 4; ++r) {
            auto t = generic(l, r);
            auto p = symmetry_check(t, SymmetryRelation::Parity, gauss, 100, rng);
            CHECK_MESSAGE(p.ok, "parity " << l << "," << r << " err " << p.worst_rel_error);
            auto m = symmetry_check(t, SymmetryRelation::Mirror, gauss, 100, rng);
            CHECK_MESSAGE(m.ok, "mirror " << l << "," << r << " err " << m.worst_rel_error);
        }
}

TEST_CASE("cache returns memoized values") {
    ContractionCache cache(gauss, {});
    auto t = generic(2, 1);
    auto a = cache.get(t);
    auto b = cache.get(t);
    CHECK(a.value.structurally_equal(b.value));
    CHECK(cache.size() == 1);
    CHECK(cache.hits() == 1);
}
