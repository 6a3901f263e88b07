#include <functional>

#include "diagrams.hpp"
#include "doctest.h"
#include "error.hpp"

using namespace stcg;

namespace {

// Independent count: ordered compositions into nonempty (a,b) blocks with the last a >= 1.
long brute_count(int l, int r) {
    std::function<long(int, int, bool)> rec = [&](int L, int R, bool last) -> long {
        if (L == 0 && R == 0) return last ? 0 : 1;
        long n = 0;
        for (int a = 0; a <= L; ++a)
            for (int b = 0; b <= R; ++b) {
                if (a + b == 0) continue;
                bool closes = (a == L && b == R);
                if (closes && a == 0) continue;
                n += rec(L - a, R - b, false);
            }
        return n;
    };
    return rec(l, r, true);
}

}  // namespace

TEST_CASE("diagram counts") {
    CHECK(enumerate_diagrams(1, 0).size() == 1);
    CHECK(enumerate_diagrams(2, 0).size() == 2);
    CHECK(enumerate_diagrams(1, 1).size() == 2);
    CHECK(enumerate_diagrams(1, 0).size() + enumerate_diagrams(2, 0).size() + enumerate_diagrams(1, 1).size() == 5);
    CHECK(enumerate_diagrams(2, 1).size() == 6);
    for (int l = 1; l <= 6; ++l)
        for (int r = 0; l + r <= 6; ++r) CHECK(static_cast<long>(enumerate_diagrams(l, r).size()) == brute_count(l, r));
}

TEST_CASE("diagram invariants and determinism") {
    for (int l = 1; l <= 5; ++l)
        for (int r = 0; l + r <= 5; ++r) {
            auto ds = enumerate_diagrams(l, r);
            CHECK(ds == enumerate_diagrams(l, r));
            for (std::size_t i = 0; i < ds.size(); ++i) {
                int sl = 0, sr = 0;
                for (const auto& b : ds[i].bubbles) {
                    CHECK(b.left + b.right >= 1);
                    sl += b.left;
                    sr += b.right;
                }
                CHECK(sl == l);
                CHECK(sr == r);
                CHECK(ds[i].bubbles.back().left >= 1);
                for (std::size_t j = 0; j < i; ++j) CHECK_FALSE(ds[i] == ds[j]);
            }
        }
    CHECK(enumerate_diagrams(1, 0)[0].bubbles == std::vector<Bubble>{{1, 0}});
    CHECK(enumerate_diagrams(2, 0)[0].bubbles.size() == 1);
}

TEST_CASE("invalid weight") {
    try {
        enumerate_diagrams(0, 2);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidWeight);
    }
}

TEST_CASE("slicing") {
    FreqExpr w1 = FreqExpr::symbol(intern_symbol("s1")), w2 = FreqExpr::symbol(intern_symbol("s2")),
             v1 = FreqExpr::symbol(intern_symbol("s3"));
    Diagram one{{{2, 0}}, 2, 0};
    auto b = slice_frequencies(one, {w1, w2}, {});
    REQUIRE(b.size() == 1);
    CHECK(b[0].mu == std::vector<FreqExpr>{w1, w2});
    Diagram two{{{1, 0}, {1, 0}}, 2, 0};
    b = slice_frequencies(two, {w1, w2}, {});
    CHECK(b[0].mu == std::vector<FreqExpr>{w1});
    CHECK(b[1].mu == std::vector<FreqExpr>{w2});
    Diagram mixed{{{0, 1}, {2, 0}}, 2, 1};
    b = slice_frequencies(mixed, {w1, w2}, {v1});
    CHECK(b[0].nu == std::vector<FreqExpr>{v1});
    CHECK(b[0].mu.empty());
    CHECK(b[1].mu == std::vector<FreqExpr>{w1, w2});
    CHECK_THROWS_AS(slice_frequencies(mixed, {w1}, {v1}), Error);
}
