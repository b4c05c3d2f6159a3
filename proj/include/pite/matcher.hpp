#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace pite::matcher {

// Greedy one-to-one Mahalanobis matches between treated and control subjects.
// Indices are positions within the respective arm matrices; each index
// appears at most once and the pair count is min(#treated, #control).
struct MatchedPairs {
    std::vector<std::pair<int, int>> pairs;  // (i_control, i_treated)
    std::vector<double> distances;
    Eigen::MatrixXd cov_inv;  // inverse pooled covariance behind the metric
};

// sqrt((x - y)' cov_inv (x - y)); cov_inv must be symmetric positive definite.
double mahalanobis(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                   const Eigen::MatrixXd& cov_inv);

// Greedy nearest-neighbor matching without replacement: treated units in data
// order each take their nearest unmatched control; distance ties break to the
// lowest control index. The metric uses the pooled sample covariance of the
// stacked treated+control rows, ridge-regularized by 1e-8 * trace/p on the
// diagonal when its condition number exceeds 1e10.
MatchedPairs match_nn(const Eigen::MatrixXd& x_treated, const Eigen::MatrixXd& x_control);

// Same matching under a caller-supplied metric.
MatchedPairs match_nn(const Eigen::MatrixXd& x_treated, const Eigen::MatrixXd& x_control,
                      const Eigen::MatrixXd& cov_inv);

// Per-pair observed difference O, predicted difference D_hat, and pair truth
// D_true (the true effect at the treated subject). Inputs are per-arm vectors
// indexed like the matched-pair index spaces.
struct PairwiseEffects {
    Eigen::VectorXd observed;   // y_treated[i_B] - y_control[i_A]
    Eigen::VectorXd estimated;  // yhat1_treated[i_B] - yhat0_control[i_A]
    Eigen::VectorXd truth;      // delta_true_treated[i_B]
};

PairwiseEffects pairwise_effects(const MatchedPairs& pairs, const Eigen::VectorXd& y_treated,
                                 const Eigen::VectorXd& y_control,
                                 const Eigen::VectorXd& yhat1_treated,
                                 const Eigen::VectorXd& yhat0_control,
                                 const Eigen::VectorXd& delta_true_treated);

}  // namespace pite::matcher
