#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "learners_impl.hpp"

namespace pite::learners::detail {

namespace {

std::vector<int> component_candidates(const LearnerSpec& spec, int p) {
    if (!spec.grid.n_components.empty()) return spec.grid.n_components;
    std::vector<int> ks;
    for (int k = 1; k <= std::min(p, 20); ++k) ks.push_back(k);
    return ks;
}

// Principal-component regression coefficients for every candidate count,
// one column per candidate (counts beyond the rank saturate at the rank).
struct PcrBasis {
    Eigen::MatrixXd v;       // p x rank right singular vectors
    Eigen::VectorXd gamma;   // score-space coefficients u_i'y / s_i
    int rank = 0;

    static PcrBasis from(const Eigen::MatrixXd& xs, const Eigen::VectorXd& yc, int /*max_comp*/) {
        PcrBasis b;
        Eigen::BDCSVD<Eigen::MatrixXd> svd(xs, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::VectorXd& s = svd.singularValues();
        const double cutoff = s.size() ? s(0) * 1e-12 : 0.0;
        int rank = 0;
        while (rank < s.size() && s(rank) > cutoff) ++rank;
        b.rank = rank;
        b.v = svd.matrixV().leftCols(rank);
        b.gamma.resize(rank);
        for (int i = 0; i < rank; ++i) b.gamma(i) = svd.matrixU().col(i).dot(yc) / s(i);
        return b;
    }

    Eigen::VectorXd beta(int k) const {
        const int kk = std::min(k, rank);
        return v.leftCols(kk) * gamma.head(kk);
    }
};

// NIPALS partial least squares (univariate response). Deflation stops early
// when the remaining covariance is numerically zero; later components then
// leave the coefficients unchanged.
struct PlsBasis {
    std::vector<Eigen::VectorXd> betas;  // beta after 1..k_built components

    static PlsBasis from(Eigen::MatrixXd x, Eigen::VectorXd y, int max_comp) {
        PlsBasis b;
        const int p = static_cast<int>(x.cols());
        Eigen::MatrixXd w_star(p, max_comp);
        Eigen::MatrixXd p_load(p, max_comp);
        Eigen::VectorXd q(max_comp);
        int built = 0;
        for (int m = 0; m < max_comp; ++m) {
            Eigen::VectorXd w = x.transpose() * y;
            const double w_norm = w.norm();
            if (w_norm < 1e-12) break;
            w /= w_norm;
            const Eigen::VectorXd t = x * w;
            const double tt = t.squaredNorm();
            if (tt < 1e-24) break;
            w_star.col(m) = w;
            p_load.col(m) = x.transpose() * t / tt;
            q(m) = y.dot(t) / tt;
            y -= q(m) * t;
            x -= t * p_load.col(m).transpose();
            ++built;

            // W (P'W)^{-1} q with the leading built-by-built block
            const Eigen::MatrixXd pw =
                p_load.leftCols(built).transpose() * w_star.leftCols(built);
            b.betas.push_back(w_star.leftCols(built) *
                              pw.colPivHouseholderQr().solve(q.head(built)));
        }
        if (b.betas.empty()) b.betas.push_back(Eigen::VectorXd::Zero(p));
        return b;
    }

    const Eigen::VectorXd& beta(int k) const {
        const int kk = std::clamp(k, 1, static_cast<int>(betas.size()));
        return betas[kk - 1];
    }
};

template <typename Basis>
PredictorPtr fit_projection(const LearnerSpec& spec, const Eigen::MatrixXd& X,
                            const Eigen::VectorXd& y, const std::vector<int>& folds,
                            const char* name) {
    const int p = static_cast<int>(X.cols());
    const std::vector<int> ks = component_candidates(spec, p);
    const int n_cand = static_cast<int>(ks.size());

    int winner = 0;
    if (n_cand > 1) {
        std::vector<double> cv_sse(n_cand, 0.0);
        for (int fold = 0; fold < spec.cv_folds; ++fold) {
            const Eigen::MatrixXd x_tr = rows_where(X, folds, fold, false);
            const Eigen::VectorXd y_tr = entries_where(y, folds, fold, false);
            const Eigen::MatrixXd x_te = rows_where(X, folds, fold, true);
            const Eigen::VectorXd y_te = entries_where(y, folds, fold, true);
            if (x_te.rows() == 0 || x_tr.rows() == 0) continue;

            const Standardizer std_tr = Standardizer::from(x_tr);
            const double ybar = y_tr.mean();
            const Basis basis = Basis::from(std_tr.apply(x_tr), (y_tr.array() - ybar).matrix(),
                                            *std::max_element(ks.begin(), ks.end()));
            const Eigen::MatrixXd xs_te = std_tr.apply(x_te);
            for (int c = 0; c < n_cand; ++c)
                cv_sse[c] +=
                    (xs_te * basis.beta(ks[c]) - (y_te.array() - ybar).matrix()).squaredNorm();
        }
        winner = pick_winner(cv_sse);
    }

    const Standardizer std_full = Standardizer::from(X);
    const double ybar = y.mean();
    const Basis basis = Basis::from(std_full.apply(X), (y.array() - ybar).matrix(), ks[winner]);
    const Eigen::VectorXd beta_std = basis.beta(ks[winner]);

    Eigen::VectorXd coef = beta_std.array() / std_full.scale.transpose().array();
    const double intercept = ybar - std_full.mean.dot(coef);
    return std::make_shared<LinearPredictor>(
        spec.id, intercept, std::move(coef),
        std::string(name) + "(ncomp=" + std::to_string(ks[winner]) + ")");
}

}  // namespace

PredictorPtr fit_pcr(const LearnerSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const std::vector<int>& folds) {
    return fit_projection<PcrBasis>(spec, X, y, folds, "pcr");
}

PredictorPtr fit_pls(const LearnerSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const std::vector<int>& folds) {
    return fit_projection<PlsBasis>(spec, X, y, folds, "pls");
}

}  // namespace pite::learners::detail
