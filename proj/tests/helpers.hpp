#pragma once

// Shared test utilities: distribution checks and small brute-force oracles.
// Everything here stays independent of the implementation paths it checks.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pite/rng.hpp"

namespace testutil {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// One-sample Kolmogorov-Smirnov statistic against N(0, 1).
inline double ks_statistic_normal(std::vector<double> sample) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (size_t i = 0; i < sample.size(); ++i) {
        const double f = normal_cdf(sample[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    }
    return d;
}

// Asymptotic KS critical value at significance alpha.
inline double ks_critical(double alpha, size_t n) {
    return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

// Exhaustive minimum-total-distance one-to-one assignment between treated
// rows and control rows (whitened Euclidean distance matrix supplied by the
// caller). Feasible up to ~8x8.
inline double optimal_assignment_total(const Eigen::MatrixXd& dist) {
    const int m1 = static_cast<int>(dist.rows());
    const int m0 = static_cast<int>(dist.cols());
    const int k = std::min(m1, m0);
    std::vector<char> used(m0, 0);
    double best = std::numeric_limits<double>::infinity();
    // depth-first over treated units in order, pruning on partial sums
    auto recurse = [&](auto&& self, int i, int assigned, double total) -> void {
        if (total >= best) return;
        if (assigned == k) {
            best = total;
            return;
        }
        if (i >= m1) return;
        for (int j = 0; j < m0; ++j) {
            if (used[j]) continue;
            used[j] = 1;
            self(self, i + 1, assigned + 1, total + dist(i, j));
            used[j] = 0;
        }
        // skipping a treated unit is only allowed when enough remain
        if (m1 - i - 1 >= k - assigned) self(self, i + 1, assigned, total);
    };
    recurse(recurse, 0, 0, 0.0);
    return best;
}

inline Eigen::MatrixXd random_matrix(int rows, int cols, pite::Rng& rng, double sd = 1.0) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.normal(0.0, sd);
    return m;
}

inline Eigen::VectorXd random_vector(int n, pite::Rng& rng, double sd = 1.0) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.normal(0.0, sd);
    return v;
}

inline Eigen::MatrixXd random_invertible(int p, pite::Rng& rng) {
    // well-conditioned so the exact-invariance checks stay in float range
    for (;;) {
        Eigen::MatrixXd a = random_matrix(p, p, rng);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
        const double lo = svd.singularValues().minCoeff();
        const double hi = svd.singularValues().maxCoeff();
        if (lo > 0.0 && hi / lo < 50.0) return a;
    }
}

// Centered orthogonal design scaled so each column has zero mean and unit
// population variance (X'X = n I); the closed-form shrinkage oracles need it.
inline Eigen::MatrixXd orthonormalized_design(int n, int p, pite::Rng& rng) {
    Eigen::MatrixXd raw = random_matrix(n, p + 1, rng);
    raw.col(0).setOnes();  // absorb the mean direction
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p + 1);
    return q.rightCols(p) * std::sqrt(static_cast<double>(n));
}

}  // namespace testutil
