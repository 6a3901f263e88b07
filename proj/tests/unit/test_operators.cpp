#include <random>

#include "doctest.h"
#include "error.hpp"
#include "operators.hpp"

using namespace stcg;

namespace {

ModeTablePtr rabi_modes(int n = 12) {
    return std::make_shared<ModeTable>(std::vector<ModeSpec>{{"a", ModeKind::Boson, n}, {"s", ModeKind::TwoLevel, 2}});
}

Eigen::MatrixXcd M(const OperatorSum& x) { return matrix_realization(x, Assignment{}); }

}  // namespace

TEST_CASE("parse and canonical form") {
    auto m = rabi_modes();
    CHECK(key_str(*m, parse_operator("a'*sm", m).terms().begin()->first) == "a'*sm");
    auto p = parse_operator("a'^2*a^2", m);
    CHECK(p.size() == 1);
    CHECK(key_str(*m, p.terms().begin()->first) == "a'^2*a^2");
    auto q = parse_operator("a*a'", m);
    CHECK(q.equals(parse_operator("a'*a", m) + OperatorSum::identity(m)));
    CHECK(parse_operator("t(e,g)", m).equals(parse_operator("sp", m)));
    CHECK(parse_operator("sp*sm", m).equals(parse_operator("t(e,e)", m)));
    CHECK(parse_operator("s.sz", m).equals(parse_operator("sz", m)));
    for (std::string bad : {"b", "a^", "sp'", "a*", "a'^x", "sz sz", "2"}) {
        try {
            parse_operator(bad, m);
            FAIL("expected parse error for " << bad);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Parse);
            CHECK(std::string(e.what()).find("position") != std::string::npos);
        }
    }
}

TEST_CASE("products") {
    auto m = rabi_modes();
    auto x = multiply(parse_operator("a*sp", m), parse_operator("a'*sm", m));
    CHECK(x.equals(multiply(parse_operator("a'*a", m) + OperatorSum::identity(m), parse_operator("t(e,e)", m))));
    auto y = parse_operator("a'*sp", m);
    CHECK(multiply(OperatorSum::identity(m), y).equals(y));
    auto big = rabi_modes(14);
    auto z = multiply(parse_operator("a'^2*a^2", big), parse_operator("a", big));
    Eigen::MatrixXcd direct = M(parse_operator("a'^2*a^2", big)) * M(parse_operator("a", big));
    // rows below the truncation edge are free of artifacts
    CHECK((M(z) - direct).topLeftCorner(10, 10).cwiseAbs().maxCoeff() < 1e-12);
    auto sz = parse_operator("sz", m);
    CHECK(multiply(sz, sz).equals(OperatorSum::identity(m)));
    CHECK(multiply(parse_operator("sp", m), parse_operator("sp", m)).is_zero());
    auto other = std::make_shared<ModeTable>(std::vector<ModeSpec>{{"b", ModeKind::Boson, 3}});
    CHECK_THROWS_AS(multiply(y, parse_operator("b", other)), Error);
}

TEST_CASE("adjoint") {
    auto m = rabi_modes();
    CHECK(parse_operator("a*sm", m).adjoint().equals(parse_operator("a'*sp", m)));
    CHECK(parse_operator("sz", m).adjoint().equals(parse_operator("sz", m)));
    auto x = parse_operator("a^2", m).scaled(ScalarExpr::imag());
    CHECK(x.adjoint().equals(parse_operator("a'^2", m).scaled(-ScalarExpr::imag())));
    CHECK(x.adjoint().adjoint().equals(x));
    CHECK((M(x.adjoint()) - M(x).adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("matrix realization conventions") {
    auto one = std::make_shared<ModeTable>(std::vector<ModeSpec>{{"a", ModeKind::Boson, 3}});
    auto a = M(parse_operator("a", one));
    CHECK(a(0, 1).real() == doctest::Approx(1));
    CHECK(a(1, 2).real() == doctest::Approx(std::sqrt(2.0)));
    CHECK(a(1, 0) == std::complex<double>(0));
    auto tls = std::make_shared<ModeTable>(std::vector<ModeSpec>{{"s", ModeKind::TwoLevel, 2}});
    auto z = M(parse_operator("sz", tls));
    CHECK(z(0, 0).real() == -1);
    CHECK(z(1, 1).real() == 1);
    auto m = rabi_modes(4);
    auto n = M(parse_operator("a'*a", m));
    for (int i = 0; i < 8; ++i) CHECK(n(i, i).real() == doctest::Approx(i / 2));
    long cap = dimension_cap();
    dimension_cap() = 4;
    CHECK_THROWS_AS(M(parse_operator("a", m)), Error);
    dimension_cap() = cap;
}

TEST_CASE("canonical form soundness on random sums") {
    auto m = rabi_modes(16);
    std::mt19937_64 rng(9);
    std::vector<std::string> atoms = {"a", "a'", "sp", "sm", "sz", "a'*a", "a^2"};
    std::uniform_int_distribution<std::size_t> pick(0, atoms.size() - 1);
    for (int trial = 0; trial < 30; ++trial) {
        OperatorSum x = OperatorSum::identity(m);
        Eigen::MatrixXcd dense = Eigen::MatrixXcd::Identity(32, 32);
        for (int f = 0; f < 3; ++f) {
            auto y = parse_operator(atoms[pick(rng)], m) + OperatorSum::identity(m, ScalarExpr(rat(1, 3)));
            x = multiply(x, y);
            dense = dense * M(y);
        }
        // degree <= 6, so levels below 16-6 are exact
        CHECK((M(x) - dense).topLeftCorner(18, 18).cwiseAbs().maxCoeff() < 1e-10);
        auto again = multiply(x, OperatorSum::identity(m));
        CHECK(again.equals(x));
    }
}

TEST_CASE("degree cap") {
    auto m = std::make_shared<ModeTable>(std::vector<ModeSpec>{{"a", ModeKind::Boson, 3}}, 4);
    try {
        parse_operator("a'^3*a^2", m);
        FAIL("expected resource error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Resource);
    }
}
