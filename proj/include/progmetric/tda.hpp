#pragma once

// Vietoris-Rips persistent homology over Z2 in dimensions 0 and 1.
//
// A simplex enters the filtration at the largest pairwise distance among its
// vertices (non-strict membership: d <= r). Simplices are ordered by
// filtration value, then dimension, then combinatorial index, which is a
// lexicographic order on the descending vertex tuple.
//
// H0 comes from Kruskal's algorithm. H1 is computed as persistent cohomology
// with an implicit coboundary, processing edges in reverse filtration order;
// edges that merged components in H0 are cleared up front.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "progmetric/distance_matrix.hpp"
#include "progmetric/union_find.hpp"

namespace progmetric {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct PersistencePair {
    int dim = 0;
    double birth = 0;
    double death = kInfinity;

    friend bool operator==(const PersistencePair&, const PersistencePair&) = default;
};

struct FiltrationConfig {
    int max_dim = 1;
    std::optional<double> r_max;  // unset: the largest matrix entry
    std::size_t max_points = 2000;
};

struct BettiCurve {
    int dim = 0;
    std::vector<double> radii;
    std::vector<std::size_t> counts;
};

class FiltrationTooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

struct FiltrationEdge {
    double diam;
    std::uint64_t index;
    std::uint32_t i, j;  // i > j
};

inline bool edge_before(const FiltrationEdge& a, const FiltrationEdge& b) {
    return a.diam < b.diam || (a.diam == b.diam && a.index < b.index);
}

template <class T>
std::vector<FiltrationEdge> sorted_edges(const BasicDistanceMatrix<T>& d, double threshold) {
    std::vector<FiltrationEdge> edges;
    const std::size_t n = d.size();
    edges.reserve(n * (n - 1) / 2);
    for (std::uint32_t i = 1; i < n; ++i)
        for (std::uint32_t j = 0; j < i; ++j) {
            double w = static_cast<double>(d(i, j));
            if (w <= threshold)
                edges.push_back({w, static_cast<std::uint64_t>(i) * (i - 1) / 2 + j, i, j});
        }
    std::sort(edges.begin(), edges.end(), edge_before);
    return edges;
}

inline std::vector<PersistencePair> sorted_pairs(std::vector<PersistencePair> pairs) {
    std::sort(pairs.begin(), pairs.end(), [](const PersistencePair& a, const PersistencePair& b) {
        if (a.dim != b.dim) return a.dim < b.dim;
        if (a.birth != b.birth) return a.birth < b.birth;
        return a.death < b.death;
    });
    return pairs;
}

struct KruskalResult {
    std::vector<PersistencePair> pairs;
    std::vector<char> merged;  // per sorted edge: did it join two components
};

template <class T>
KruskalResult kruskal(const BasicDistanceMatrix<T>& d, const std::vector<FiltrationEdge>& edges) {
    KruskalResult r;
    UnionFind uf(d.size());
    r.merged.assign(edges.size(), 0);
    for (std::size_t e = 0; e < edges.size(); ++e)
        if (uf.unite(edges[e].i, edges[e].j)) {
            r.merged[e] = 1;
            r.pairs.push_back({0, 0.0, edges[e].diam});
        }
    // Every component still alive never dies.
    for (std::size_t comps = d.size() - r.pairs.size(); comps > 0; --comps) r.pairs.push_back({0, 0.0, kInfinity});
    return r;
}

}  // namespace detail

/// Dimension-0 pairs: one (0, w) per minimum spanning tree edge w and one
/// (0, inf) per connected component.
template <class T>
std::vector<PersistencePair> vr_h0(const BasicDistanceMatrix<T>& d) {
    if (d.size() == 0) return {};
    auto edges = detail::sorted_edges(d, kInfinity);
    return detail::sorted_pairs(detail::kruskal(d, edges).pairs);
}

/// Dimension-1 pairs with positive persistence. Classes still alive at r_max
/// get death = inf.
template <class T>
std::vector<PersistencePair> vr_h1(const BasicDistanceMatrix<T>& d, const FiltrationConfig& config = {}) {
    const std::size_t n = d.size();
    if (n > config.max_points)
        throw FiltrationTooLarge("filtration over " + std::to_string(n) + " points exceeds the limit of " +
                                 std::to_string(config.max_points));
    if (n < 3 || config.max_dim < 1) return {};
    const double threshold = config.r_max ? *config.r_max : static_cast<double>(d.max_value());

    auto edges = detail::sorted_edges(d, threshold);
    auto h0 = detail::kruskal(d, edges);

    auto dist = [&](std::uint32_t a, std::uint32_t b) { return static_cast<double>(d(a, b)); };
    auto binom3 = [](std::uint64_t x) { return x < 3 ? 0 : x * (x - 1) * (x - 2) / 6; };
    auto binom2 = [](std::uint64_t x) { return x < 2 ? 0 : x * (x - 1) / 2; };

    struct Tri {
        double diam;
        std::uint64_t index;
        bool operator==(const Tri& o) const { return index == o.index; }
        bool operator>(const Tri& o) const { return diam > o.diam || (diam == o.diam && index > o.index); }
    };
    using Heap = std::priority_queue<Tri, std::vector<Tri>, std::greater<Tri>>;

    auto push_coboundary = [&](Heap& heap, const detail::FiltrationEdge& e) {
        for (std::uint32_t k = 0; k < n; ++k) {
            if (k == e.i || k == e.j) continue;
            double diam = std::max({e.diam, dist(e.i, k), dist(e.j, k)});
            if (diam > threshold) continue;
            std::uint32_t v[3] = {e.i, e.j, k};
            std::sort(v, v + 3, std::greater<>());
            heap.push({diam, binom3(v[0]) + binom2(v[1]) + v[2]});
        }
    };
    // Earliest surviving entry of a Z2 column held as a heap; equal entries cancel.
    auto pivot = [](Heap& heap) -> std::optional<Tri> {
        while (!heap.empty()) {
            Tri t = heap.top();
            heap.pop();
            if (!heap.empty() && heap.top() == t) {
                heap.pop();
                continue;
            }
            heap.push(t);
            return t;
        }
        return std::nullopt;
    };

    std::vector<PersistencePair> out;
    std::unordered_map<std::uint64_t, std::size_t> pivot_owner;  // triangle index -> edge position
    std::unordered_map<std::size_t, std::vector<std::size_t>> cocycles;

    for (std::size_t pos = edges.size(); pos-- > 0;) {
        if (h0.merged[pos]) continue;  // cleared: this edge killed a component
        const auto& e = edges[pos];
        Heap heap;
        push_coboundary(heap, e);
        std::vector<std::size_t> cocycle{pos};
        while (true) {
            auto p = pivot(heap);
            if (!p) {
                out.push_back({1, e.diam, kInfinity});
                break;
            }
            auto owner = pivot_owner.find(p->index);
            if (owner == pivot_owner.end()) {
                pivot_owner.emplace(p->index, pos);
                std::sort(cocycle.begin(), cocycle.end());
                std::vector<std::size_t> reduced;
                for (std::size_t k = 0; k < cocycle.size();) {
                    std::size_t m = k;
                    while (m < cocycle.size() && cocycle[m] == cocycle[k]) ++m;
                    if ((m - k) % 2) reduced.push_back(cocycle[k]);
                    k = m;
                }
                cocycles.emplace(pos, std::move(reduced));
                if (p->diam > e.diam) out.push_back({1, e.diam, p->diam});
                break;
            }
            for (std::size_t f : cocycles.at(owner->second)) {
                push_coboundary(heap, edges[f]);
                cocycle.push_back(f);
            }
        }
    }
    return detail::sorted_pairs(std::move(out));
}

/// H0 and H1 pairs together, sorted by (dim, birth, death).
template <class T>
std::vector<PersistencePair> vr_persistence(const BasicDistanceMatrix<T>& d, const FiltrationConfig& config = {}) {
    if (d.size() > config.max_points)
        throw FiltrationTooLarge("filtration over " + std::to_string(d.size()) + " points exceeds the limit of " +
                                 std::to_string(config.max_points));
    auto pairs = vr_h0(d);
    auto h1 = vr_h1(d, config);
    pairs.insert(pairs.end(), h1.begin(), h1.end());
    return pairs;
}

/// counts[k] = #{pairs of dimension `dim` with birth <= radii[k] < death}.
inline BettiCurve betti_curve(const std::vector<PersistencePair>& pairs, const std::vector<double>& radii, int dim) {
    for (std::size_t k = 1; k < radii.size(); ++k)
        if (!(radii[k] > radii[k - 1])) throw std::invalid_argument("radii must be strictly increasing");
    BettiCurve c{dim, radii, std::vector<std::size_t>(radii.size(), 0)};
    for (const auto& p : pairs) {
        if (p.dim != dim) continue;
        for (std::size_t k = 0; k < radii.size(); ++k)
            if (p.birth <= radii[k] && radii[k] < p.death) ++c.counts[k];
    }
    return c;
}

struct LogPoint {
    int dim;
    double log_birth;
    double log_death;
};

struct HistogramBin {
    int dim;
    std::string axis;  // "birth" or "death"
    double lo, hi;
    std::size_t count;
};

struct LogDiagram {
    std::vector<LogPoint> points;
    std::size_t n_infinite = 0;
    std::vector<HistogramBin> histogram;
};

inline double log_scale(double x) { return std::log10(1.0 + x); }

/// Finite pairs mapped through x -> log10(1 + x), with marginal histograms of
/// each coordinate per dimension over `bins` equal-width bins.
inline LogDiagram log_diagram(const std::vector<PersistencePair>& pairs, std::size_t bins = 20) {
    LogDiagram out;
    double top = 0;
    for (const auto& p : pairs) {
        if (std::isinf(p.death)) {
            ++out.n_infinite;
            continue;
        }
        out.points.push_back({p.dim, log_scale(p.birth), log_scale(p.death)});
        top = std::max(top, out.points.back().log_death);
    }
    if (bins == 0) return out;
    const double width = top > 0 ? top / static_cast<double>(bins) : 1.0;
    for (int dim = 0; dim <= 1; ++dim) {
        for (const char* axis : {"birth", "death"}) {
            std::vector<std::size_t> counts(bins, 0);
            for (const auto& q : out.points) {
                if (q.dim != dim) continue;
                double v = std::string_view(axis) == "birth" ? q.log_birth : q.log_death;
                std::size_t k = std::min(bins - 1, static_cast<std::size_t>(v / width));
                ++counts[k];
            }
            for (std::size_t k = 0; k < bins; ++k)
                out.histogram.push_back({dim, axis, width * static_cast<double>(k), width * static_cast<double>(k + 1),
                                         counts[k]});
        }
    }
    return out;
}

}  // namespace progmetric
