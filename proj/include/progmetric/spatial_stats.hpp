#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "progmetric/distance_matrix.hpp"

namespace progmetric {

struct DispersionSummary {
    std::size_t medoid = 0;  // row index
    int medoid_program_id = 0;
    double avg_dispersion = 0;
    double median_dispersion = 0;
    double mad = 0;
    std::size_t n = 0;
};

struct KFunctionCurve {
    std::vector<double> radii;
    std::vector<double> values;
    double lambda = 1;
};

namespace detail {

inline double median_of(std::vector<double> v) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2;
}

}  // namespace detail

/// Row index minimizing the row sum; the lowest index wins ties.
template <class T>
std::size_t medoid(const BasicDistanceMatrix<T>& d) {
    if (d.size() == 0) throw std::invalid_argument("medoid of an empty matrix");
    std::size_t best = 0;
    T best_sum{};
    for (std::size_t i = 0; i < d.size(); ++i) {
        T s{};
        for (std::size_t j = 0; j < d.size(); ++j) s += d(i, j);
        if (i == 0 || s < best_sum) {
            best = i;
            best_sum = s;
        }
    }
    return best;
}

/// Mean and median distance to the medoid over the other points, and the
/// median distance to the medoid over all points (mad).
template <class T>
DispersionSummary dispersion(const BasicDistanceMatrix<T>& d) {
    DispersionSummary s;
    s.n = d.size();
    s.medoid = medoid(d);
    s.medoid_program_id = d.program_ids()[s.medoid];
    std::vector<double> others, all;
    for (std::size_t i = 0; i < d.size(); ++i) {
        double v = static_cast<double>(d(i, s.medoid));
        all.push_back(v);
        if (i != s.medoid) others.push_back(v);
    }
    if (!others.empty())
        s.avg_dispersion = std::accumulate(others.begin(), others.end(), 0.0) / static_cast<double>(others.size());
    s.median_dispersion = detail::median_of(others);
    s.mad = detail::median_of(all);
    return s;
}

/// Integer grid 0..max(D), the points where an integer-valued K steps.
template <class T>
std::vector<double> default_radii(const BasicDistanceMatrix<T>& d) {
    std::vector<double> r;
    const double top = std::ceil(static_cast<double>(d.max_value()));
    for (double x = 0; x <= top; x += 1) r.push_back(x);
    return r;
}

/// K(r) = sum over ordered pairs i != j of [d_ij < r] / (lambda * n).
/// No edge correction.
template <class T>
KFunctionCurve ripley_k(const BasicDistanceMatrix<T>& d, const std::vector<double>& radii, double lambda = 1.0) {
    if (d.size() == 0) throw std::invalid_argument("ripley_k of an empty matrix");
    if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
    for (std::size_t k = 0; k < radii.size(); ++k) {
        if (radii[k] < 0) throw std::invalid_argument("negative radius");
        if (k && !(radii[k] > radii[k - 1])) throw std::invalid_argument("radii must be strictly increasing");
    }
    std::vector<double> pair_dists;
    pair_dists.reserve(d.size() * (d.size() - 1) / 2);
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i + 1; j < d.size(); ++j) pair_dists.push_back(static_cast<double>(d(i, j)));
    std::sort(pair_dists.begin(), pair_dists.end());

    KFunctionCurve curve;
    curve.radii = radii;
    curve.lambda = lambda;
    const double norm = lambda * static_cast<double>(d.size());
    for (double r : radii) {
        auto below = std::lower_bound(pair_dists.begin(), pair_dists.end(), r) - pair_dists.begin();
        curve.values.push_back(2.0 * static_cast<double>(below) / norm);  // each unordered pair counts twice
    }
    return curve;
}

}  // namespace progmetric
