#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pite/rng.hpp"

namespace pite::learners {

enum class LearnerId { ols, ridge, lasso, enet, pcr, pls, cart, rf, gbm };

const char* to_string(LearnerId id);
std::optional<LearnerId> parse_learner(const std::string& name);
const std::vector<LearnerId>& all_learners();

// Candidate grids per learner. Cross-validation selects over the candidates;
// single-candidate grids (rf, gbm) skip the CV loop outright.
struct HyperGrid {
    // ridge/lasso/enet: empty = 50-point log grid from the data's lasso
    // lambda_max down to lambda_max * 1e-4, searched strongest-penalty-first
    std::vector<double> lambdas;
    double enet_alpha = 0.2;

    std::vector<int> n_components;  // pcr/pls; empty = 1..min(p, 20)

    std::vector<int> cart_depths = {2, 3, 4, 5, 6, 7, 8};
    int min_leaf = 5;

    int rf_trees = 500;
    int rf_mtry = 0;  // 0 = ceil(p / 3)
    int rf_max_depth = 1 << 20;
    bool rf_bootstrap = true;

    int gbm_rounds = 200;
    double gbm_rate = 0.05;
    int gbm_depth = 3;
};

struct LearnerSpec {
    LearnerId id = LearnerId::ols;
    int cv_folds = 10;
    HyperGrid grid;
};

class Predictor {
public:
    virtual ~Predictor() = default;
    virtual Eigen::VectorXd predict(const Eigen::MatrixXd& X) const = 0;
    virtual std::string description() const = 0;
    LearnerId id() const { return id_; }
    int n_features() const { return n_features_; }

protected:
    Predictor(LearnerId id, int p) : id_(id), n_features_(p) {}
    void check_width(const Eigen::MatrixXd& X) const {
        if (static_cast<int>(X.cols()) != n_features_)
            throw std::invalid_argument("predict: feature count mismatch");
    }

private:
    LearnerId id_;
    int n_features_;
};

using PredictorPtr = std::shared_ptr<const Predictor>;

// Averaging ensembles additionally expose their members' predictions; the
// ensemble prediction is exactly the arithmetic mean of the columns.
class EnsemblePredictor : public Predictor {
public:
    virtual Eigen::MatrixXd member_predictions(const Eigen::MatrixXd& X) const = 0;

protected:
    using Predictor::Predictor;
};

// Linear-family fit (ols, ridge, lasso, enet, pcr, pls collapse to this form).
// Coefficients are reported on the original feature scale.
class LinearPredictor final : public Predictor {
public:
    LinearPredictor(LearnerId id, double intercept, Eigen::VectorXd coef, std::string desc)
        : Predictor(id, static_cast<int>(coef.size())),
          intercept_(intercept),
          coef_(std::move(coef)),
          desc_(std::move(desc)) {}

    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const override {
        check_width(X);
        return (X * coef_).array() + intercept_;
    }
    std::string description() const override { return desc_; }
    double intercept() const { return intercept_; }
    const Eigen::VectorXd& coefficients() const { return coef_; }

private:
    double intercept_;
    Eigen::VectorXd coef_;
    std::string desc_;
};

struct RankDeficiencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Random fold assignment: a permutation of 0..n-1 cut into cv_folds blocks of
// near-equal size; entry i is the fold of row i.
std::vector<int> make_folds(int n, int cv_folds, Rng& rng);

PredictorPtr fit(const LearnerSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                 Rng& rng);

// Same fit with a caller-supplied fold assignment. Permuting rows and folds
// together must leave deterministic learners' predictions unchanged.
PredictorPtr fit_with_folds(const LearnerSpec& spec, const Eigen::MatrixXd& X,
                            const Eigen::VectorXd& y, const std::vector<int>& folds, Rng& rng);

}  // namespace pite::learners
