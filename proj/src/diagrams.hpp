#pragma once
#include <functional>
#include <vector>

#include "freq.hpp"

namespace stcg {

struct Bubble {
    int left = 0;
    int right = 0;
    bool operator==(const Bubble& o) const { return left == o.left && right == o.right; }
};

// bubbles[0] acts closest to the density matrix; the last bubble hosts the special mode.
struct Diagram {
    std::vector<Bubble> bubbles;
    int l = 0;
    int r = 0;
    bool operator==(const Diagram& o) const { return bubbles == o.bubbles && l == o.l && r == o.r; }
};

std::vector<Diagram> enumerate_diagrams(int l, int r);
// Streams diagrams in the same order without materializing the list.
void for_each_diagram(int l, int r, const std::function<void(const Diagram&)>& fn);
// Cached materialized list for small weights.
const std::vector<Diagram>& diagrams_cached(int l, int r);

struct BubbleBlock {
    std::vector<FreqExpr> mu;
    std::vector<FreqExpr> nu;
};

std::vector<BubbleBlock> slice_frequencies(const Diagram& d, const std::vector<FreqExpr>& mu,
                                           const std::vector<FreqExpr>& nu);

}  // namespace stcg
