#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "progmetric/distance_matrix.hpp"

namespace progmetric {

using Point2 = std::array<double, 2>;

struct Embedding {
    std::vector<Point2> points;
    double raw_stress = 0;
    double avg_stress = 0;
    int iterations = 0;
    bool converged = false;
    int restart = 0;                    // which restart produced this result
    std::vector<double> stress_history;  // raw stress after every iteration, starting with the initial value
};

struct SmacofOptions {
    std::uint64_t seed = 0;
    int restarts = 4;
    int max_iterations = 300;
    double tolerance = 1e-6;  // relative stress decrease that counts as converged
};

/// Sum over i<j of (d_ij - |p_i - p_j|)^2, and that sum divided by n.
template <class T>
std::pair<double, double> stress(const BasicDistanceMatrix<T>& d, const std::vector<Point2>& points) {
    const std::size_t n = d.size();
    if (points.size() != n)
        throw std::invalid_argument("stress: " + std::to_string(points.size()) + " points for a " + std::to_string(n) +
                                    "x" + std::to_string(n) + " matrix");
    double raw = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double e = std::hypot(points[i][0] - points[j][0], points[i][1] - points[j][1]);
            double r = static_cast<double>(d(i, j)) - e;
            raw += r * r;
        }
    return {raw, n ? raw / static_cast<double>(n) : 0.0};
}

namespace detail {

inline constexpr double kExactFit = 1e-24;

template <class T>
Embedding smacof_run(const BasicDistanceMatrix<T>& d, std::uint64_t seed, int restart, const SmacofOptions& opt) {
    const std::size_t n = d.size();
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(restart)};
    std::mt19937_64 rng(seq);
    double scale = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) scale = std::max(scale, static_cast<double>(d(i, j)));
    if (scale == 0) scale = 1;
    std::uniform_real_distribution<double> unit(-0.5 * scale, 0.5 * scale);
    double eta2 = 0;  // sum of squared dissimilarities
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) eta2 += static_cast<double>(d(i, j)) * static_cast<double>(d(i, j));

    Embedding e;
    e.restart = restart;
    e.points.resize(n);
    for (auto& p : e.points) p = {unit(rng), unit(rng)};
    e.raw_stress = stress(d, e.points).first;
    e.stress_history.push_back(e.raw_stress);

    std::vector<Point2> next(n);
    for (int it = 0; it < opt.max_iterations; ++it) {
        // Guttman transform with unit weights: X <- B(X) X / n.
        for (std::size_t i = 0; i < n; ++i) {
            double bx = 0, by = 0, diag = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                double dx = e.points[i][0] - e.points[j][0], dy = e.points[i][1] - e.points[j][1];
                double dist = std::hypot(dx, dy);
                double b = dist > 0 ? -static_cast<double>(d(i, j)) / dist : 0.0;
                bx += b * e.points[j][0];
                by += b * e.points[j][1];
                diag -= b;
            }
            next[i] = {(bx + diag * e.points[i][0]) / static_cast<double>(n),
                       (by + diag * e.points[i][1]) / static_cast<double>(n)};
        }
        std::swap(e.points, next);
        double before = e.raw_stress;
        e.raw_stress = stress(d, e.points).first;
        e.stress_history.push_back(e.raw_stress);
        e.iterations = it + 1;
        // Below kExactFit * eta2 the fit is exact to working precision; going
        // on only stirs rounding noise, which can nudge stress upwards.
        if (before == 0 || e.raw_stress <= kExactFit * eta2 || (before - e.raw_stress) / before < opt.tolerance) {
            e.converged = true;
            break;
        }
    }
    e.avg_stress = e.raw_stress / static_cast<double>(n);
    return e;
}

}  // namespace detail

/// Metric MDS into the plane by SMACOF from seeded random starts. Restarts
/// run concurrently; the lowest stress wins, ties to the lowest restart.
template <class T>
Embedding mds_embed(const BasicDistanceMatrix<T>& d, const SmacofOptions& opt = {}) {
    if (d.size() < 2) throw std::invalid_argument("mds needs at least 2 points");
    if (opt.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
    std::vector<Embedding> runs(static_cast<std::size_t>(opt.restarts));
    {
        std::vector<std::thread> pool;
        for (int r = 0; r < opt.restarts; ++r)
            pool.emplace_back([&, r] { runs[r] = detail::smacof_run(d, opt.seed, r, opt); });
        for (auto& t : pool) t.join();
    }
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r)
        if (runs[r].raw_stress < runs[best].raw_stress) best = r;
    return std::move(runs[best]);
}

}  // namespace progmetric
