#include "pite/learners.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <cmath>

#include "learners_impl.hpp"
#include "pite/csv.hpp"

namespace pite::learners {

const char* to_string(LearnerId id) {
    switch (id) {
        case LearnerId::ols: return "ols";
        case LearnerId::ridge: return "ridge";
        case LearnerId::lasso: return "lasso";
        case LearnerId::enet: return "enet";
        case LearnerId::pcr: return "pcr";
        case LearnerId::pls: return "pls";
        case LearnerId::cart: return "cart";
        case LearnerId::rf: return "rf";
        case LearnerId::gbm: return "gbm";
    }
    return "?";
}

std::optional<LearnerId> parse_learner(const std::string& name) {
    for (LearnerId id : all_learners())
        if (name == to_string(id)) return id;
    return std::nullopt;
}

const std::vector<LearnerId>& all_learners() {
    static const std::vector<LearnerId> ids = {
        LearnerId::ols, LearnerId::ridge, LearnerId::lasso, LearnerId::enet, LearnerId::pcr,
        LearnerId::pls, LearnerId::cart,  LearnerId::rf,    LearnerId::gbm};
    return ids;
}

std::vector<int> make_folds(int n, int cv_folds, Rng& rng) {
    if (cv_folds < 2) throw std::invalid_argument("make_folds: need at least 2 folds");
    if (n < cv_folds) throw std::invalid_argument("make_folds: more folds than rows");
    const auto perm = rng.permutation(n);
    std::vector<int> fold(n);
    for (int pos = 0; pos < n; ++pos) fold[perm[pos]] = pos % cv_folds;
    return fold;
}

PredictorPtr fit(const LearnerSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                 Rng& rng) {
    const int n = static_cast<int>(X.rows());
    if (n <= spec.cv_folds)
        throw std::invalid_argument("fit: need more rows than cv folds");
    // rf and gbm carry single-candidate grids; fold assignment is only drawn
    // when a CV search actually happens, keeping the rng budget stable.
    if (spec.id == LearnerId::rf || spec.id == LearnerId::gbm || spec.id == LearnerId::ols) {
        static const std::vector<int> no_folds;
        return fit_with_folds(spec, X, y, no_folds, rng);
    }
    const auto folds = make_folds(n, spec.cv_folds, rng);
    return fit_with_folds(spec, X, y, folds, rng);
}

PredictorPtr fit_with_folds(const LearnerSpec& spec, const Eigen::MatrixXd& X,
                            const Eigen::VectorXd& y, const std::vector<int>& folds, Rng& rng) {
    if (X.rows() != y.size()) throw std::invalid_argument("fit: X/y size mismatch");
    if (X.rows() == 0) throw std::invalid_argument("fit: empty training set");
    if (!X.allFinite() || !y.allFinite())
        throw std::invalid_argument("fit: non-finite entries in training data");
    const bool needs_folds = spec.id != LearnerId::ols && spec.id != LearnerId::rf &&
                             spec.id != LearnerId::gbm;
    if (needs_folds && static_cast<int>(folds.size()) != X.rows())
        throw std::invalid_argument("fit: fold assignment does not cover the rows");

    using namespace detail;
    switch (spec.id) {
        case LearnerId::ols: return fit_ols(spec, X, y);
        case LearnerId::ridge: return fit_ridge(spec, X, y, folds);
        case LearnerId::lasso: return fit_enet(spec, X, y, folds, 1.0);
        case LearnerId::enet: return fit_enet(spec, X, y, folds, spec.grid.enet_alpha);
        case LearnerId::pcr: return fit_pcr(spec, X, y, folds);
        case LearnerId::pls: return fit_pls(spec, X, y, folds);
        case LearnerId::cart: return fit_cart(spec, X, y, folds);
        case LearnerId::rf: return fit_rf(spec, X, y, rng);
        case LearnerId::gbm: return fit_gbm(spec, X, y);
    }
    throw std::logic_error("fit: unknown learner");
}

namespace detail {

int pick_winner(const std::vector<double>& cv_sse) {
    int winner = 0;
    for (int i = 1; i < static_cast<int>(cv_sse.size()); ++i)
        if (cv_sse[i] < cv_sse[winner]) winner = i;
    return winner;
}

double lasso_lambda_max(const Eigen::MatrixXd& Xs, const Eigen::VectorXd& y_centered) {
    const double n = static_cast<double>(Xs.rows());
    return (Xs.transpose() * y_centered).cwiseAbs().maxCoeff() / n;
}

std::vector<double> default_lambda_grid(double lambda_max) {
    if (lambda_max <= 0.0) lambda_max = 1.0;  // constant-response fallback
    std::vector<double> grid(50);
    for (int k = 0; k < 50; ++k) grid[k] = lambda_max * std::pow(10.0, -4.0 * k / 49.0);
    return grid;
}

Eigen::MatrixXd rows_where(const Eigen::MatrixXd& X, const std::vector<int>& folds, int fold,
                           bool equal) {
    int count = 0;
    for (int f : folds) count += (f == fold) == equal;
    Eigen::MatrixXd out(count, X.cols());
    int r = 0;
    for (int i = 0; i < static_cast<int>(folds.size()); ++i)
        if ((folds[i] == fold) == equal) out.row(r++) = X.row(i);
    return out;
}

Eigen::VectorXd entries_where(const Eigen::VectorXd& y, const std::vector<int>& folds, int fold,
                              bool equal) {
    int count = 0;
    for (int f : folds) count += (f == fold) == equal;
    Eigen::VectorXd out(count);
    int r = 0;
    for (int i = 0; i < static_cast<int>(folds.size()); ++i)
        if ((folds[i] == fold) == equal) out(r++) = y(i);
    return out;
}

PredictorPtr fit_ols(const LearnerSpec& spec, const Eigen::MatrixXd& X,
                     const Eigen::VectorXd& y) {
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    if (n <= p)
        throw RankDeficiencyError("ols: n <= p; use a penalized learner");

    Eigen::MatrixXd design(n, p + 1);
    design.col(0).setOnes();
    design.rightCols(p) = X;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < p + 1)
        throw RankDeficiencyError("ols: rank-deficient design");
    const Eigen::VectorXd sol = qr.solve(y);
    (void)spec;
    return std::make_shared<LinearPredictor>(LearnerId::ols, sol(0), sol.tail(p), "ols");
}

PredictorPtr fit_ridge(const LearnerSpec& spec, const Eigen::MatrixXd& X,
                       const Eigen::VectorXd& y, const std::vector<int>& folds) {
    const int p = static_cast<int>(X.cols());

    std::vector<double> lambdas = spec.grid.lambdas;
    if (lambdas.empty()) {
        const Standardizer full = Standardizer::from(X);
        lambdas = default_lambda_grid(
            lasso_lambda_max(full.apply(X), (y.array() - y.mean()).matrix()));
    }
    const int n_lambda = static_cast<int>(lambdas.size());

    auto solve_at = [p](const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs, double lambda) {
        Eigen::MatrixXd a = gram;
        a.diagonal().array() += lambda;
        return Eigen::VectorXd(a.ldlt().solve(rhs));
    };

    int winner = 0;
    if (n_lambda > 1) {
        std::vector<double> cv_sse(n_lambda, 0.0);
        for (int fold = 0; fold < spec.cv_folds; ++fold) {
            const Eigen::MatrixXd x_tr = rows_where(X, folds, fold, false);
            const Eigen::VectorXd y_tr = entries_where(y, folds, fold, false);
            const Eigen::MatrixXd x_te = rows_where(X, folds, fold, true);
            const Eigen::VectorXd y_te = entries_where(y, folds, fold, true);
            if (x_te.rows() == 0 || x_tr.rows() == 0) continue;

            const Standardizer std_tr = Standardizer::from(x_tr);
            const Eigen::MatrixXd xs = std_tr.apply(x_tr);
            const double ybar = y_tr.mean();
            const Eigen::VectorXd yc = (y_tr.array() - ybar).matrix();
            const double n_tr = static_cast<double>(xs.rows());
            const Eigen::MatrixXd gram = xs.transpose() * xs / n_tr;
            const Eigen::VectorXd rhs = xs.transpose() * yc / n_tr;
            const Eigen::MatrixXd xs_te = std_tr.apply(x_te);

            for (int l = 0; l < n_lambda; ++l) {
                const Eigen::VectorXd beta = solve_at(gram, rhs, lambdas[l]);
                cv_sse[l] += (xs_te * beta - (y_te.array() - ybar).matrix()).squaredNorm();
            }
        }
        winner = pick_winner(cv_sse);
    }

    const Standardizer std_full = Standardizer::from(X);
    const Eigen::MatrixXd xs = std_full.apply(X);
    const double ybar = y.mean();
    const double n_all = static_cast<double>(X.rows());
    const Eigen::VectorXd beta_std =
        solve_at(xs.transpose() * xs / n_all, xs.transpose() * (y.array() - ybar).matrix() / n_all,
                 lambdas[winner]);

    Eigen::VectorXd coef = beta_std.array() / std_full.scale.transpose().array();
    const double intercept = ybar - std_full.mean.dot(coef);
    return std::make_shared<LinearPredictor>(
        LearnerId::ridge, intercept, std::move(coef),
        "ridge(lambda=" + io::format_double(lambdas[winner]) + ")");
}

}  // namespace detail
}  // namespace pite::learners
