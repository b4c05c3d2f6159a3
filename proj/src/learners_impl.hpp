#pragma once

// Internal machinery shared by the learner family implementations.

#include <Eigen/Dense>
#include <vector>

#include "pite/learners.hpp"

namespace pite::learners::detail {

// Per-feature centering and scaling to zero mean / unit population (1/n)
// variance. Zero-variance features keep scale 1 so they map to a zero column.
struct Standardizer {
    Eigen::RowVectorXd mean, scale;

    static Standardizer from(const Eigen::MatrixXd& X) {
        Standardizer s;
        s.mean = X.colwise().mean();
        const Eigen::MatrixXd centered = X.rowwise() - s.mean;
        s.scale = (centered.array().square().colwise().mean()).sqrt();
        for (Eigen::Index j = 0; j < s.scale.size(); ++j)
            if (s.scale(j) == 0.0) s.scale(j) = 1.0;
        return s;
    }

    Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const {
        return (X.rowwise() - mean).array().rowwise() / scale.array();
    }
};

// Pooled-CV winner: candidates are ordered most-parsimonious-first and the
// first strict minimum of the pooled squared error wins.
int pick_winner(const std::vector<double>& cv_sse);

// Smallest lambda zeroing all lasso coefficients on the standardized data,
// max_j |<xs_j, y - ybar>| / n.
double lasso_lambda_max(const Eigen::MatrixXd& Xs, const Eigen::VectorXd& y_centered);

// 50-point descending log grid from lambda_max to lambda_max * 1e-4.
std::vector<double> default_lambda_grid(double lambda_max);

// Rows of X / entries of y whose fold equals (or differs from) `fold`.
Eigen::MatrixXd rows_where(const Eigen::MatrixXd& X, const std::vector<int>& folds, int fold,
                           bool equal);
Eigen::VectorXd entries_where(const Eigen::VectorXd& y, const std::vector<int>& folds, int fold,
                              bool equal);

// Coordinate descent for the elastic net on standardized features:
//   (1/2n)||y - Xs b||^2 + lambda (alpha |b|_1 + (1-alpha)/2 |b|^2)
// Returns one coefficient column per lambda (descending path, warm starts).
// Sweeps stop when the worst KKT violation falls below kkt_rel_tol times the
// gradient scale at b = 0.
Eigen::MatrixXd enet_path(const Eigen::MatrixXd& Xs, const Eigen::VectorXd& y_centered,
                          const std::vector<double>& lambdas, double alpha,
                          double kkt_rel_tol = 1e-8);

// Family entry points (all take precomputed fold assignments).
PredictorPtr fit_ols(const LearnerSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y);
PredictorPtr fit_ridge(const LearnerSpec& spec, const Eigen::MatrixXd& X,
                       const Eigen::VectorXd& y, const std::vector<int>& folds);
PredictorPtr fit_enet(const LearnerSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const std::vector<int>& folds, double alpha);
PredictorPtr fit_pcr(const LearnerSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const std::vector<int>& folds);
PredictorPtr fit_pls(const LearnerSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const std::vector<int>& folds);
PredictorPtr fit_cart(const LearnerSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const std::vector<int>& folds);
PredictorPtr fit_rf(const LearnerSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    Rng& rng);
PredictorPtr fit_gbm(const LearnerSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

}  // namespace pite::learners::detail
