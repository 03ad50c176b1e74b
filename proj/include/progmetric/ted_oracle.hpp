#pragma once

// Exhaustive tree edit distance for tiny trees, used as a test oracle.
// Enumerates every one-to-one mapping that preserves ancestry and sibling
// order (the mappings that correspond to edit scripts) and takes the
// cheapest. Shares no code with the dynamic program in tree_edit.hpp.

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "progmetric/syntax_tree.hpp"
#include "progmetric/tree_edit.hpp"

namespace progmetric {

inline constexpr std::size_t kOracleMaxNodes = 8;

namespace detail {

struct FlatTree {
    std::vector<std::string> labels;  // preorder
    std::vector<int> end;             // one past the last descendant, preorder

    bool ancestor(int u, int v) const { return u < v && v < end[u]; }
    bool left_of(int u, int v) const { return end[u] <= v; }
};

inline void flatten(const SyntaxTree& t, FlatTree& out) {
    int me = static_cast<int>(out.labels.size());
    out.labels.push_back(t.label);
    out.end.push_back(0);
    for (const auto& c : t.children) flatten(c, out);
    out.end[me] = static_cast<int>(out.labels.size());
}

}  // namespace detail

inline std::int64_t ted_oracle(const SyntaxTree& t1, const SyntaxTree& t2, const EditCosts& costs = {}) {
    for (const SyntaxTree* t : {&t1, &t2}) {
        std::size_t n = tree_size(*t);
        if (n > kOracleMaxNodes) throw TreeTooLarge(n, kOracleMaxNodes);
    }
    detail::FlatTree a, b;
    detail::flatten(t1, a);
    detail::flatten(t2, b);
    const int n1 = static_cast<int>(a.labels.size()), n2 = static_cast<int>(b.labels.size());

    std::vector<int> partner(n1, -1);
    std::vector<bool> used(n2, false);
    std::int64_t best = std::numeric_limits<std::int64_t>::max();

    auto consistent = [&](int u, int v) {
        for (int w = 0; w < u; ++w) {
            int x = partner[w];
            if (x < 0) continue;
            // w precedes u in preorder, so w is either an ancestor of u or to its left.
            if (a.ancestor(w, u) != b.ancestor(x, v)) return false;
            if (a.left_of(w, u) != b.left_of(x, v)) return false;
        }
        return true;
    };

    std::function<void(int, int, std::int64_t)> search = [&](int u, int mapped, std::int64_t relabels) {
        if (u == n1) {
            std::int64_t cost = relabels + (n1 - mapped) * costs.remove + (n2 - mapped) * costs.insert;
            best = std::min(best, cost);
            return;
        }
        search(u + 1, mapped, relabels);
        for (int v = 0; v < n2; ++v) {
            if (used[v] || !consistent(u, v)) continue;
            partner[u] = v;
            used[v] = true;
            search(u + 1, mapped + 1, relabels + (a.labels[u] == b.labels[v] ? 0 : costs.relabel));
            used[v] = false;
            partner[u] = -1;
        }
    };
    search(0, 0, 0);
    return best;
}

}  // namespace progmetric
