#include <algorithm>
#include <cmath>

#include "learners_impl.hpp"
#include "pite/csv.hpp"
#include "pite/tree.hpp"

namespace pite::learners::detail {

namespace {

class CartPredictor final : public Predictor {
public:
    CartPredictor(RegressionTree tree, int p, int depth)
        : Predictor(LearnerId::cart, p), tree_(std::move(tree)), depth_(depth) {}
    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const override {
        check_width(X);
        return tree_.predict(X);
    }
    std::string description() const override {
        return "cart(max_depth=" + std::to_string(depth_) + ")";
    }

private:
    RegressionTree tree_;
    int depth_;
};

class ForestPredictor final : public EnsemblePredictor {
public:
    ForestPredictor(std::vector<RegressionTree> trees, int p, int mtry)
        : EnsemblePredictor(LearnerId::rf, p), trees_(std::move(trees)), mtry_(mtry) {}

    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const override {
        check_width(X);
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(X.rows());
        for (const auto& t : trees_) sum += t.predict(X);
        return sum / static_cast<double>(trees_.size());
    }
    Eigen::MatrixXd member_predictions(const Eigen::MatrixXd& X) const override {
        check_width(X);
        Eigen::MatrixXd out(X.rows(), trees_.size());
        for (size_t t = 0; t < trees_.size(); ++t) out.col(t) = trees_[t].predict(X);
        return out;
    }
    std::string description() const override {
        return "rf(trees=" + std::to_string(trees_.size()) + ",mtry=" + std::to_string(mtry_) +
               ")";
    }

private:
    std::vector<RegressionTree> trees_;
    int mtry_;
};

class BoostedPredictor final : public Predictor {
public:
    BoostedPredictor(double base, std::vector<RegressionTree> trees, double rate, int p)
        : Predictor(LearnerId::gbm, p), base_(base), trees_(std::move(trees)), rate_(rate) {}

    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const override {
        check_width(X);
        Eigen::VectorXd out = Eigen::VectorXd::Constant(X.rows(), base_);
        for (const auto& t : trees_) out += rate_ * t.predict(X);
        return out;
    }
    std::string description() const override {
        return "gbm(rounds=" + std::to_string(trees_.size()) +
               ",rate=" + io::format_double(rate_) + ")";
    }

private:
    double base_;
    std::vector<RegressionTree> trees_;
    double rate_;
};

}  // namespace

PredictorPtr fit_cart(const LearnerSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const std::vector<int>& folds) {
    std::vector<int> depths = spec.grid.cart_depths;
    if (depths.empty()) throw std::invalid_argument("cart: empty depth grid");
    std::sort(depths.begin(), depths.end());  // shallowest (most parsimonious) first
    const int n_cand = static_cast<int>(depths.size());
    const int deepest = depths.back();

    TreeParams params;
    params.min_leaf = spec.grid.min_leaf;

    int winner = 0;
    if (n_cand > 1) {
        std::vector<double> cv_sse(n_cand, 0.0);
        for (int fold = 0; fold < spec.cv_folds; ++fold) {
            const Eigen::MatrixXd x_tr = rows_where(X, folds, fold, false);
            const Eigen::VectorXd y_tr = entries_where(y, folds, fold, false);
            const Eigen::MatrixXd x_te = rows_where(X, folds, fold, true);
            const Eigen::VectorXd y_te = entries_where(y, folds, fold, true);
            if (x_te.rows() == 0 || x_tr.rows() == 0) continue;

            // grow once at the deepest candidate; shallower candidates are
            // exact truncations of the same greedy tree
            TreeParams grow = params;
            grow.max_depth = deepest;
            RegressionTree tree;
            tree.fit(x_tr, y_tr, grow);
            for (int c = 0; c < n_cand; ++c)
                cv_sse[c] += (tree.predict_at_depth(x_te, depths[c]) - y_te).squaredNorm();
        }
        winner = pick_winner(cv_sse);
    }

    TreeParams final_params = params;
    final_params.max_depth = depths[winner];
    RegressionTree tree;
    tree.fit(X, y, final_params);
    return std::make_shared<CartPredictor>(std::move(tree), static_cast<int>(X.cols()),
                                           depths[winner]);
}

PredictorPtr fit_rf(const LearnerSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    Rng& rng) {
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    const int n_trees = spec.grid.rf_trees;
    if (n_trees < 1) throw std::invalid_argument("rf: need at least one tree");

    TreeParams params;
    params.min_leaf = spec.grid.min_leaf;
    params.max_depth = spec.grid.rf_max_depth;
    params.mtry = spec.grid.rf_mtry > 0 ? spec.grid.rf_mtry : (p + 2) / 3;
    params.mtry = std::min(params.mtry, p);

    std::vector<RegressionTree> trees(n_trees);
    for (int t = 0; t < n_trees; ++t) {
        Rng tree_rng(rng.next_u64());
        if (spec.grid.rf_bootstrap) {
            Eigen::MatrixXd xb(n, p);
            Eigen::VectorXd yb(n);
            for (int i = 0; i < n; ++i) {
                const int r = static_cast<int>(tree_rng.uniform_int(n));
                xb.row(i) = X.row(r);
                yb(i) = y(r);
            }
            trees[t].fit(xb, yb, params, &tree_rng);
        } else {
            trees[t].fit(X, y, params, &tree_rng);
        }
    }
    return std::make_shared<ForestPredictor>(std::move(trees), p, params.mtry);
}

PredictorPtr fit_gbm(const LearnerSpec& spec, const Eigen::MatrixXd& X,
                     const Eigen::VectorXd& y) {
    const int rounds = spec.grid.gbm_rounds;
    if (rounds < 1) throw std::invalid_argument("gbm: need at least one round");
    const double rate = spec.grid.gbm_rate;

    TreeParams params;
    params.min_leaf = spec.grid.min_leaf;
    params.max_depth = spec.grid.gbm_depth;

    const double base = y.mean();
    Eigen::VectorXd resid = (y.array() - base).matrix();
    std::vector<RegressionTree> trees(rounds);
    for (int t = 0; t < rounds; ++t) {
        trees[t].fit(X, resid, params);
        resid -= rate * trees[t].predict(X);
    }
    return std::make_shared<BoostedPredictor>(base, std::move(trees), rate,
                                              static_cast<int>(X.cols()));
}

}  // namespace pite::learners::detail
