#include "diagrams.hpp"

#include <map>
#include <mutex>

#include "error.hpp"

namespace stcg {

namespace {

// Splits (l, r) into nonempty bubbles, peeling blocks off the special-mode end.
// Left modes are moved out before right modes; the single-bubble diagram leads.
void compose(int l, int r, bool special, std::vector<Bubble>& tail,
             const std::function<void(const std::vector<Bubble>&)>& emit) {
    if (l == 0 && r == 0) {
        emit(tail);
        return;
    }
    for (int b = r; b >= 0; --b) {
        for (int a = l; a >= (special ? 1 : 0); --a) {
            if (a + b == 0) continue;
            tail.push_back({a, b});
            compose(l - a, r - b, false, tail, emit);
            tail.pop_back();
        }
    }
}

}  // namespace

void for_each_diagram(int l, int r, const std::function<void(const Diagram&)>& fn) {
    if (l < 1) fail(ErrorKind::InvalidWeight, "weight (" + std::to_string(l) + "," + std::to_string(r) +
                                                  ") has no left slot for the special mode");
    if (r < 0) fail(ErrorKind::InvalidWeight, "negative right weight");
    std::vector<Bubble> tail;
    compose(l, r, true, tail, [&](const std::vector<Bubble>& t) {
        Diagram d;
        d.l = l;
        d.r = r;
        d.bubbles.assign(t.rbegin(), t.rend());
        fn(d);
    });
}

std::vector<Diagram> enumerate_diagrams(int l, int r) {
    std::vector<Diagram> out;
    for_each_diagram(l, r, [&](const Diagram& d) { out.push_back(d); });
    return out;
}

const std::vector<Diagram>& diagrams_cached(int l, int r) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::vector<Diagram>> cache;
    std::lock_guard lk(mu);
    auto key = std::make_pair(l, r);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, enumerate_diagrams(l, r)).first;
    return it->second;
}

std::vector<BubbleBlock> slice_frequencies(const Diagram& d, const std::vector<FreqExpr>& mu,
                                           const std::vector<FreqExpr>& nu) {
    if (static_cast<int>(mu.size()) != d.l || static_cast<int>(nu.size()) != d.r)
        fail(ErrorKind::Shape, "frequency vectors of lengths (" + std::to_string(mu.size()) + "," +
                                   std::to_string(nu.size()) + ") do not match diagram weight (" +
                                   std::to_string(d.l) + "," + std::to_string(d.r) + ")");
    std::vector<BubbleBlock> out;
    std::size_t i = 0, j = 0;
    for (const auto& b : d.bubbles) {
        BubbleBlock blk;
        blk.mu.assign(mu.begin() + i, mu.begin() + i + b.left);
        blk.nu.assign(nu.begin() + j, nu.begin() + j + b.right);
        i += b.left;
        j += b.right;
        out.push_back(std::move(blk));
    }
    return out;
}

}  // namespace stcg
