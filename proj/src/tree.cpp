#include "pite/tree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace pite::learners {

namespace {

struct Split {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double score = -std::numeric_limits<double>::infinity();
};

}  // namespace

void RegressionTree::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const TreeParams& params, Rng* rng) {
    if (X.rows() != y.size()) throw std::invalid_argument("tree: X/y size mismatch");
    if (X.rows() == 0) throw std::invalid_argument("tree: empty training set");
    if (params.min_leaf < 1) throw std::invalid_argument("tree: min_leaf must be positive");
    nodes_.clear();
    std::vector<int> rows(static_cast<size_t>(X.rows()));
    std::iota(rows.begin(), rows.end(), 0);
    build(X, y, rows, 0, params, rng);
}

int RegressionTree::build(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          std::vector<int>& rows, int depth, const TreeParams& params,
                          Rng* rng) {
    const int m = static_cast<int>(rows.size());
    const int p = static_cast<int>(X.cols());

    double sum = 0.0;
    for (int r : rows) sum += y(r);

    const int node_id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    nodes_[node_id].value = sum / m;
    nodes_[node_id].depth = depth;

    if (depth >= params.max_depth || m < 2 * params.min_leaf) return node_id;

    // candidate features: all, or mtry sampled without replacement
    std::vector<int> features(p);
    std::iota(features.begin(), features.end(), 0);
    if (params.mtry > 0 && params.mtry < p) {
        if (!rng) throw std::invalid_argument("tree: mtry subsampling needs an rng");
        for (int i = 0; i < params.mtry; ++i) {
            const int j = i + static_cast<int>(rng->uniform_int(p - i));
            std::swap(features[i], features[j]);
        }
        features.resize(params.mtry);
    }

    Split best;
    best.score = sum * sum / m;  // no-split baseline; a split must strictly improve
    std::vector<std::pair<double, double>> xy(m);  // (x value, y value)
    for (int f : features) {
        for (int i = 0; i < m; ++i) xy[i] = {X(rows[i], f), y(rows[i])};
        std::sort(xy.begin(), xy.end());

        double left_sum = 0.0;
        for (int k = 1; k < m; ++k) {
            left_sum += xy[k - 1].second;
            if (xy[k].first == xy[k - 1].first) continue;  // not a boundary
            if (k < params.min_leaf || m - k < params.min_leaf) continue;
            const double right_sum = sum - left_sum;
            // variance reduction up to the constant sum(y^2)/m
            const double score =
                left_sum * left_sum / k + right_sum * right_sum / (m - k);
            if (score > best.score) {
                best.found = true;
                best.score = score;
                best.feature = f;
                best.threshold = 0.5 * (xy[k - 1].first + xy[k].first);
            }
        }
    }
    if (!best.found) return node_id;

    std::vector<int> left_rows, right_rows;
    left_rows.reserve(m);
    right_rows.reserve(m);
    for (int r : rows) {
        if (X(r, best.feature) <= best.threshold)
            left_rows.push_back(r);
        else
            right_rows.push_back(r);
    }
    if (left_rows.empty() || right_rows.empty()) return node_id;  // degenerate threshold

    rows.clear();
    rows.shrink_to_fit();

    nodes_[node_id].feature = best.feature;
    nodes_[node_id].threshold = best.threshold;
    const int left_id = build(X, y, left_rows, depth + 1, params, rng);
    nodes_[node_id].left = left_id;
    const int right_id = build(X, y, right_rows, depth + 1, params, rng);
    nodes_[node_id].right = right_id;
    return node_id;
}

double RegressionTree::predict_row(const double* x) const {
    int node = 0;
    while (nodes_[node].feature >= 0)
        node = x[nodes_[node].feature] <= nodes_[node].threshold ? nodes_[node].left
                                                                 : nodes_[node].right;
    return nodes_[node].value;
}

Eigen::VectorXd RegressionTree::predict(const Eigen::MatrixXd& X) const {
    return predict_at_depth(X, 1 << 20);
}

Eigen::VectorXd RegressionTree::predict_at_depth(const Eigen::MatrixXd& X, int depth) const {
    if (nodes_.empty()) throw std::logic_error("tree: predict before fit");
    Eigen::VectorXd out(X.rows());
    Eigen::RowVectorXd row;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        row = X.row(i);
        int node = 0;
        while (nodes_[node].feature >= 0 && nodes_[node].depth < depth)
            node = row(nodes_[node].feature) <= nodes_[node].threshold ? nodes_[node].left
                                                                       : nodes_[node].right;
        out(i) = nodes_[node].value;
    }
    return out;
}

}  // namespace pite::learners
