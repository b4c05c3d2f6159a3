#include "pite/matcher.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pite::matcher {

namespace {

// Cholesky of cov_inv after validating symmetry and positive definiteness.
Eigen::MatrixXd validated_factor(const Eigen::MatrixXd& cov_inv) {
    if (cov_inv.rows() != cov_inv.cols())
        throw std::invalid_argument("mahalanobis: cov_inv must be square");
    if (!cov_inv.isApprox(cov_inv.transpose(), 1e-10))
        throw std::invalid_argument("mahalanobis: cov_inv must be symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(cov_inv);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("mahalanobis: cov_inv must be positive definite");
    return llt.matrixL();
}

Eigen::MatrixXd pooled_cov_inverse(const Eigen::MatrixXd& x_treated,
                                   const Eigen::MatrixXd& x_control) {
    const int p = static_cast<int>(x_treated.cols());
    const int n = static_cast<int>(x_treated.rows() + x_control.rows());
    if (n < 2) throw std::invalid_argument("match_nn: need at least 2 subjects");

    Eigen::MatrixXd stacked(n, p);
    stacked.topRows(x_treated.rows()) = x_treated;
    stacked.bottomRows(x_control.rows()) = x_control;
    const Eigen::RowVectorXd mean = stacked.colwise().mean();
    const Eigen::MatrixXd centered = stacked.rowwise() - mean;
    Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (hi <= 0.0) throw std::invalid_argument("match_nn: degenerate covariates");
    if (lo <= 0.0 || hi / lo > 1e10)
        cov.diagonal().array() += 1e-8 * cov.trace() / p;

    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("match_nn: covariance not invertible");
    return llt.solve(Eigen::MatrixXd::Identity(p, p));
}

MatchedPairs greedy_match(const Eigen::MatrixXd& x_treated, const Eigen::MatrixXd& x_control,
                          Eigen::MatrixXd cov_inv) {
    const int m1 = static_cast<int>(x_treated.rows());
    const int m0 = static_cast<int>(x_control.rows());
    if (m1 < 1 || m0 < 1) throw std::invalid_argument("match_nn: both arms must be non-empty");
    if (x_treated.cols() != x_control.cols() || x_treated.cols() == 0)
        throw std::invalid_argument("match_nn: covariate dimension mismatch");

    // Whiten once: with cov_inv = L L', Mahalanobis distance is the Euclidean
    // distance between L'-transformed points.
    const Eigen::MatrixXd factor = validated_factor(cov_inv);
    const Eigen::MatrixXd t_white = x_treated * factor;
    const Eigen::MatrixXd c_white = x_control * factor;

    MatchedPairs out;
    out.cov_inv = std::move(cov_inv);
    const int n_pairs = std::min(m1, m0);
    out.pairs.reserve(n_pairs);
    out.distances.reserve(n_pairs);

    std::vector<char> used(m0, 0);
    for (int i = 0; i < m1 && static_cast<int>(out.pairs.size()) < n_pairs; ++i) {
        int best = -1;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (int j = 0; j < m0; ++j) {
            if (used[j]) continue;
            const double d2 = (t_white.row(i) - c_white.row(j)).squaredNorm();
            if (d2 < best_d2) {  // ties keep the lowest control index
                best_d2 = d2;
                best = j;
            }
        }
        used[best] = 1;
        out.pairs.emplace_back(best, i);
        out.distances.push_back(std::sqrt(best_d2));
    }
    return out;
}

}  // namespace

double mahalanobis(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                   const Eigen::MatrixXd& cov_inv) {
    if (x.size() != y.size() || x.size() != cov_inv.rows())
        throw std::invalid_argument("mahalanobis: dimension mismatch");
    validated_factor(cov_inv);
    const Eigen::VectorXd d = x - y;
    return std::sqrt(d.dot(cov_inv * d));
}

MatchedPairs match_nn(const Eigen::MatrixXd& x_treated, const Eigen::MatrixXd& x_control) {
    if (x_treated.cols() == 0) throw std::invalid_argument("match_nn: p must be positive");
    return greedy_match(x_treated, x_control, pooled_cov_inverse(x_treated, x_control));
}

MatchedPairs match_nn(const Eigen::MatrixXd& x_treated, const Eigen::MatrixXd& x_control,
                      const Eigen::MatrixXd& cov_inv) {
    return greedy_match(x_treated, x_control, cov_inv);
}

PairwiseEffects pairwise_effects(const MatchedPairs& pairs, const Eigen::VectorXd& y_treated,
                                 const Eigen::VectorXd& y_control,
                                 const Eigen::VectorXd& yhat1_treated,
                                 const Eigen::VectorXd& yhat0_control,
                                 const Eigen::VectorXd& delta_true_treated) {
    const int m = static_cast<int>(pairs.pairs.size());
    PairwiseEffects eff;
    eff.observed.resize(m);
    eff.estimated.resize(m);
    eff.truth.resize(m);
    for (int k = 0; k < m; ++k) {
        const auto [i_control, i_treated] = pairs.pairs[k];
        if (i_control < 0 || i_control >= y_control.size() || i_treated < 0 ||
            i_treated >= y_treated.size())
            throw std::out_of_range("pairwise_effects: pair index out of range");
        eff.observed(k) = y_treated(i_treated) - y_control(i_control);
        eff.estimated(k) = yhat1_treated(i_treated) - yhat0_control(i_control);
        eff.truth(k) = delta_true_treated(i_treated);
    }
    return eff;
}

}  // namespace pite::matcher
