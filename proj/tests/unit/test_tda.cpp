#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "progmetric/distmat_engine.hpp"
#include "progmetric/fixtures.hpp"
#include "progmetric/tda.hpp"
#include "support/oracles.hpp"

using namespace progmetric;

namespace {

std::vector<double> finite_deaths(const std::vector<PersistencePair>& pairs, int dim) {
    std::vector<double> out;
    for (const auto& p : pairs)
        if (p.dim == dim && !std::isinf(p.death)) out.push_back(p.death);
    std::sort(out.begin(), out.end());
    return out;
}

BasicDistanceMatrix<double> unit_square() { return oracle::euclidean({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

}  // namespace

TEST(H0, Examples) {
    auto tri = vr_h0(DistanceMatrix::from_rows({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}));
    EXPECT_EQ(tri, (std::vector<PersistencePair>{{0, 0, 1}, {0, 0, 1}, {0, 0, kInfinity}}));
    auto line = vr_h0(oracle::euclidean({{0, 0}, {1, 0}, {3, 0}}));
    EXPECT_EQ(finite_deaths(line, 0), (std::vector<double>{1, 2}));
    EXPECT_EQ(line.size(), 3u);
    EXPECT_EQ(vr_h0(DistanceMatrix(1)), (std::vector<PersistencePair>{{0, 0, kInfinity}}));
}

TEST(H0, EqualsKruskalOnRandomMetrics) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        auto d = oracle::random_metric(rng, 2 + trial % 39, 15);
        auto pairs = vr_h0(d);
        EXPECT_EQ(pairs.size(), d.size());
        EXPECT_EQ(finite_deaths(pairs, 0), oracle::mst_weights(d));
        for (const auto& p : pairs) EXPECT_EQ(p.birth, 0);
    }
}

TEST(H1, UnitSquare) {
    auto h1 = vr_h1(unit_square());
    ASSERT_EQ(h1.size(), 1u);
    EXPECT_NEAR(h1[0].birth, 1.0, 1e-9);
    EXPECT_NEAR(h1[0].death, std::sqrt(2.0), 1e-9);
}

TEST(H1, EquilateralTriangleHasNoLoop) {
    EXPECT_TRUE(vr_h1(DistanceMatrix::from_rows({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}})).empty());
}

TEST(H1, CensoredLoopsNeverDie) {
    FiltrationConfig cfg;
    cfg.r_max = 1.2;
    auto h1 = vr_h1(unit_square(), cfg);
    ASSERT_EQ(h1.size(), 1u);
    EXPECT_TRUE(std::isinf(h1[0].death));
}

TEST(H1, SizeGuard) {
    FiltrationConfig cfg;
    cfg.max_points = 3;
    EXPECT_THROW(vr_h1(unit_square(), cfg), FiltrationTooLarge);
}

TEST(H1, BettiCurveMatchesBoundaryRanks) {
    // Small random point clouds and integer metrics; at every radius the
    // persistence-derived Betti numbers must equal rank-based ones.
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 4 + trial % 9;
        BasicDistanceMatrix<double> d;
        if (trial % 2) {
            std::vector<std::array<double, 2>> pts(n);
            for (auto& p : pts) p = {u(rng), u(rng)};
            d = oracle::euclidean(pts);
        } else {
            auto m = oracle::random_metric(rng, n, 6);
            d = BasicDistanceMatrix<double>(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) d(i, j) = static_cast<double>(m(i, j));
        }
        auto pairs = vr_persistence(d);
        std::vector<double> radii;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) radii.push_back(d(i, j));
        radii.push_back(0);
        std::sort(radii.begin(), radii.end());
        radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
        std::vector<double> grid;
        for (std::size_t k = 0; k < radii.size(); ++k) {
            grid.push_back(radii[k]);
            if (k + 1 < radii.size()) grid.push_back((radii[k] + radii[k + 1]) / 2);
        }
        auto b0 = betti_curve(pairs, grid, 0), b1 = betti_curve(pairs, grid, 1);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            auto ref = oracle::betti_at(d, grid[k]);
            ASSERT_EQ(b0.counts[k], ref.b0) << "trial " << trial << " r=" << grid[k];
            ASSERT_EQ(b1.counts[k], ref.b1) << "trial " << trial << " r=" << grid[k];
        }
        for (const auto& p : pairs) EXPECT_GE(p.death, p.birth);
    }
}

TEST(H1, BirthsAndDeathsAreRealizedDistances) {
    std::mt19937_64 rng(14);
    auto d = oracle::random_metric(rng, 14, 10);
    for (const auto& p : vr_h1(d)) {
        bool birth_found = false, death_found = false;
        for (std::size_t i = 0; i < d.size(); ++i)
            for (std::size_t j = i + 1; j < d.size(); ++j) {
                birth_found |= static_cast<double>(d(i, j)) == p.birth;
                death_found |= static_cast<double>(d(i, j)) == p.death;
            }
        EXPECT_TRUE(birth_found);
        EXPECT_TRUE(death_found);
    }
}

TEST(H1, DuplicatePointAddsOneZeroPair) {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<std::array<double, 2>> pts(10);
    for (auto& p : pts) p = {u(rng), u(rng)};
    auto before = vr_persistence(oracle::euclidean(pts));
    pts.push_back(pts[3]);
    auto after = vr_persistence(oracle::euclidean(pts));
    auto zero_pairs = [](const std::vector<PersistencePair>& v) {
        return std::count_if(v.begin(), v.end(), [](const PersistencePair& p) { return p.dim == 0 && p.death == 0; });
    };
    EXPECT_EQ(zero_pairs(after), zero_pairs(before) + 1);
    auto dim1 = [](const std::vector<PersistencePair>& v) {
        std::vector<PersistencePair> out;
        for (const auto& p : v)
            if (p.dim == 1) out.push_back(p);
        return out;
    };
    EXPECT_EQ(dim1(after), dim1(before));
}

TEST(H1, RenameCycleHasALoopBornAtOne) {
    auto m = compute_matrix(rename_cycle_fixture()).matrix;
    auto h1 = vr_h1(m);
    bool born_at_one = std::any_of(h1.begin(), h1.end(), [](const PersistencePair& p) { return p.birth == 1.0; });
    EXPECT_TRUE(born_at_one);
    auto at1 = oracle::betti_at(m, 1.0), at2 = oracle::betti_at(m, 2.0);
    auto curve = betti_curve(h1, {1.0, 2.0}, 1);
    EXPECT_GE(at1.b1, 1u);
    EXPECT_EQ(curve.counts[0], at1.b1);
    EXPECT_EQ(curve.counts[1], at2.b1);
}

TEST(BettiCurve, Examples) {
    std::vector<PersistencePair> pairs{{0, 0, 1}, {0, 0, 1}, {0, 0, kInfinity}};
    EXPECT_EQ(betti_curve(pairs, {0, 0.5, 1, 2}, 0).counts, (std::vector<std::size_t>{3, 3, 1, 1}));
    EXPECT_EQ(betti_curve({}, {0, 1}, 1).counts, (std::vector<std::size_t>{0, 0}));
    std::vector<PersistencePair> sq{{1, 1.0, std::sqrt(2.0)}};
    EXPECT_EQ(betti_curve(sq, {0.5, 1, 1.2, 1.5}, 1).counts, (std::vector<std::size_t>{0, 1, 1, 0}));
}

TEST(LogDiagram, Transform) {
    auto ld = log_diagram({{1, 1.0, std::sqrt(2.0)}, {0, 0.0, 3.0}, {0, 0.0, kInfinity}});
    ASSERT_EQ(ld.points.size(), 2u);
    EXPECT_EQ(ld.n_infinite, 1u);
    EXPECT_DOUBLE_EQ(ld.points[0].log_birth, std::log10(2.0));
    EXPECT_DOUBLE_EQ(ld.points[0].log_death, std::log10(1 + std::sqrt(2.0)));
    EXPECT_DOUBLE_EQ(ld.points[1].log_birth, 0.0);
    std::size_t total = 0;
    for (const auto& h : ld.histogram) total += h.count;
    EXPECT_EQ(total, 4u);  // two points, birth and death marginals each
    EXPECT_EQ(ld.histogram.size(), 2u * 2u * 20u);
}
