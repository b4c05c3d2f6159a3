#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pite/rng.hpp"

namespace pite::learners {

struct TreeParams {
    int max_depth = 1 << 20;  // effectively unlimited
    int min_leaf = 5;
    int mtry = 0;  // candidate features per node; 0 = all
};

// Greedy variance-reduction regression tree. Split search is exhaustive over
// midpoints of sorted distinct values; ties keep the first candidate feature
// and the lowest split value, so growth is deterministic. Every node stores
// its mean response, which makes evaluation of a depth truncation identical
// to growing a shallower tree.
class RegressionTree {
public:
    void fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const TreeParams& params,
             Rng* rng = nullptr);

    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
    Eigen::VectorXd predict_at_depth(const Eigen::MatrixXd& X, int depth) const;
    double predict_row(const double* x) const;

    int node_count() const { return static_cast<int>(nodes_.size()); }

private:
    struct Node {
        int feature = -1;  // -1 = leaf
        double threshold = 0.0;
        double value = 0.0;
        int left = -1, right = -1;
        int depth = 0;
    };

    int build(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::vector<int>& rows,
              int depth, const TreeParams& params, Rng* rng);

    std::vector<Node> nodes_;
};

}  // namespace pite::learners
