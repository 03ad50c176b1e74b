#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "progmetric/syntax_tree.hpp"

namespace progmetric {

/// Per-operation costs. Defaults count operations.
template <class Cost = std::int64_t>
struct BasicEditCosts {
    Cost relabel = 1;
    Cost insert = 1;
    Cost remove = 1;

    void validate() const {
        if (relabel < 0 || insert < 0 || remove < 0) throw std::invalid_argument("edit costs must be non-negative");
        if (relabel > insert + remove) throw std::invalid_argument("relabel cost exceeds insert + delete");
    }
};

using EditCosts = BasicEditCosts<>;

inline constexpr std::size_t kDefaultMaxTreeNodes = 50000;

class TreeTooLarge : public std::runtime_error {
public:
    TreeTooLarge(std::size_t nodes, std::size_t limit)
        : std::runtime_error("tree has " + std::to_string(nodes) + " nodes, limit is " + std::to_string(limit)),
          nodes_(nodes) {}
    std::size_t nodes() const noexcept { return nodes_; }

private:
    std::size_t nodes_;
};

/// Maps label strings to dense integers so the inner loop compares ints.
class LabelTable {
public:
    int intern(const std::string& label) {
        auto [it, inserted] = ids_.try_emplace(label, static_cast<int>(ids_.size()));
        return it->second;
    }
    std::size_t size() const { return ids_.size(); }

private:
    std::unordered_map<std::string, int> ids_;
};

/// Postorder view of a tree: label ids, leftmost-leaf indices and keyroots.
struct PreparedTree {
    std::vector<int> labels;
    std::vector<int> leftmost;
    std::vector<int> keyroots;

    std::size_t size() const { return labels.size(); }
};

inline PreparedTree prepare_tree(const SyntaxTree& t, LabelTable& table) {
    PreparedTree p;
    // Explicit stack: parser output can be deeper than is comfortable for recursion.
    struct Frame {
        const SyntaxTree* node;
        std::size_t next_child;
        int first_leaf;
    };
    std::vector<Frame> stack{{&t, 0, -1}};
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next_child < f.node->children.size()) {
            const SyntaxTree* child = &f.node->children[f.next_child++];
            stack.push_back({child, 0, -1});
            continue;
        }
        int index = static_cast<int>(p.labels.size());
        int lml = f.first_leaf < 0 ? index : f.first_leaf;
        p.labels.push_back(table.intern(f.node->label));
        p.leftmost.push_back(lml);
        stack.pop_back();
        if (!stack.empty() && stack.back().first_leaf < 0) stack.back().first_leaf = lml;
    }
    // A keyroot is the highest node for each distinct leftmost leaf.
    std::vector<int> highest(p.size(), -1);
    for (int i = 0; i < static_cast<int>(p.size()); ++i) highest[p.leftmost[i]] = i;
    for (int k : highest)
        if (k >= 0) p.keyroots.push_back(k);
    std::sort(p.keyroots.begin(), p.keyroots.end());
    return p;
}

/// Scratch buffers reused across calls; one per worker thread.
template <class Cost = std::int64_t>
struct TedWorkspace {
    std::vector<Cost> tree_dist;
    std::vector<Cost> forest_dist;
};

/// Zhang-Shasha ordered tree edit distance over prepared trees.
/// O(n1*n2) memory, O(n1*n2*min(depth,leaves)^2) time.
template <class Cost = std::int64_t>
Cost ted(const PreparedTree& a, const PreparedTree& b, const BasicEditCosts<Cost>& costs,
         TedWorkspace<Cost>& ws) {
    const std::size_t n1 = a.size(), n2 = b.size();
    if (n1 == 0 || n2 == 0) throw std::invalid_argument("ted of an empty tree");
    ws.tree_dist.assign(n1 * n2, Cost{});
    ws.forest_dist.resize((n1 + 1) * (n2 + 1));
    Cost* td = ws.tree_dist.data();
    Cost* fd = ws.forest_dist.data();

    for (int i : a.keyroots) {
        for (int j : b.keyroots) {
            const int li = a.leftmost[i], lj = b.leftmost[j];
            const int rows = i - li + 2, cols = j - lj + 2;
            auto F = [&](int r, int c) -> Cost& { return fd[static_cast<std::size_t>(r) * cols + c]; };
            F(0, 0) = 0;
            for (int r = 1; r < rows; ++r) F(r, 0) = F(r - 1, 0) + costs.remove;
            for (int c = 1; c < cols; ++c) F(0, c) = F(0, c - 1) + costs.insert;
            for (int r = 1; r < rows; ++r) {
                const int x = li + r - 1;
                const bool x_on_path = a.leftmost[x] == li;
                for (int c = 1; c < cols; ++c) {
                    const int y = lj + c - 1;
                    Cost best = std::min(F(r - 1, c) + costs.remove, F(r, c - 1) + costs.insert);
                    Cost& tree_xy = td[static_cast<std::size_t>(x) * n2 + y];
                    if (x_on_path && b.leftmost[y] == lj) {
                        Cost sub = a.labels[x] == b.labels[y] ? Cost{} : costs.relabel;
                        best = std::min(best, F(r - 1, c - 1) + sub);
                        tree_xy = best;
                    } else {
                        best = std::min(best, F(a.leftmost[x] - li, b.leftmost[y] - lj) + tree_xy);
                    }
                    F(r, c) = best;
                }
            }
        }
    }
    return td[(n1 - 1) * n2 + (n2 - 1)];
}

/// Tree edit distance between two syntax trees. Refuses trees larger than
/// `max_nodes` with TreeTooLarge.
template <class Cost = std::int64_t>
Cost ted(const SyntaxTree& t1, const SyntaxTree& t2, const BasicEditCosts<Cost>& costs = {},
         std::size_t max_nodes = kDefaultMaxTreeNodes) {
    costs.validate();
    for (const SyntaxTree* t : {&t1, &t2}) {
        std::size_t n = tree_size(*t);
        if (n > max_nodes) throw TreeTooLarge(n, max_nodes);
    }
    LabelTable table;
    PreparedTree a = prepare_tree(t1, table);
    PreparedTree b = prepare_tree(t2, table);
    TedWorkspace<Cost> ws;
    return ted(a, b, costs, ws);
}

}  // namespace progmetric
