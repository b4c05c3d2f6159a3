#include "pite/metrics.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <stdexcept>

namespace pite::metrics {

namespace {

void check_lengths(const Eigen::VectorXd& est, const Eigen::VectorXd& truth) {
    if (est.size() != truth.size())
        throw std::invalid_argument("metrics: length mismatch");
    if (est.size() == 0) throw std::invalid_argument("metrics: empty input");
}

int sign3(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

double rmse(const Eigen::VectorXd& est, const Eigen::VectorXd& truth) {
    check_lengths(est, truth);
    return std::sqrt((est - truth).squaredNorm() / static_cast<double>(est.size()));
}

double mae(const Eigen::VectorXd& est, const Eigen::VectorXd& truth) {
    check_lengths(est, truth);
    return (est - truth).cwiseAbs().mean();
}

std::pair<double, std::vector<std::uint8_t>> direction(const Eigen::VectorXd& est,
                                                       const Eigen::VectorXd& truth) {
    check_lengths(est, truth);
    const int m = static_cast<int>(est.size());
    std::vector<std::uint8_t> flags(m);
    int agree = 0;
    for (int i = 0; i < m; ++i) {
        flags[i] = sign3(est(i)) == sign3(truth(i)) ? 1 : 0;
        agree += flags[i];
    }
    return {static_cast<double>(agree) / m, std::move(flags)};
}

std::optional<double> r2(const Eigen::VectorXd& est, const Eigen::VectorXd& truth) {
    check_lengths(est, truth);
    const double mean_truth = truth.mean();
    const double ss_tot = (truth.array() - mean_truth).matrix().squaredNorm();
    if (ss_tot == 0.0) return std::nullopt;
    const double ss_res = (truth - est).squaredNorm();
    return 1.0 - ss_res / ss_tot;
}

Calibration calibration(const Eigen::VectorXd& est, const Eigen::VectorXd& truth) {
    check_lengths(est, truth);
    const int m = static_cast<int>(est.size());
    if (m < 3) throw std::invalid_argument("calibration: need at least 3 points");

    Calibration out;
    const double est_mean = est.mean();
    const double sxx = (est.array() - est_mean).matrix().squaredNorm();
    if (sxx == 0.0) return out;  // undefined slope: everything missing

    const double truth_mean = truth.mean();
    const double sxy = ((est.array() - est_mean) * (truth.array() - truth_mean)).sum();
    const double beta = sxy / sxx;
    const double alpha = truth_mean - beta * est_mean;

    const Eigen::VectorXd resid = truth.array() - alpha - beta * est.array();
    const double sigma2 = resid.squaredNorm() / static_cast<double>(m - 2);
    const double beta_se = std::sqrt(sigma2 / sxx);
    const double alpha_se = std::sqrt(sigma2 * (1.0 / m + est_mean * est_mean / sxx));

    const boost::math::students_t tdist(m - 2);
    const double tcrit = boost::math::quantile(tdist, 0.975);

    out.alpha = alpha;
    out.beta = beta;
    out.alpha_se = alpha_se;
    out.beta_se = beta_se;
    out.alpha_covers_zero = std::abs(alpha) <= tcrit * alpha_se;
    out.beta_covers_one = std::abs(beta - 1.0) <= tcrit * beta_se;
    return out;
}

MetricReport compute_report(const Eigen::VectorXd& est, const Eigen::VectorXd& truth) {
    MetricReport rep;
    rep.rmse = rmse(est, truth);
    rep.mae = mae(est, truth);
    auto [dir, flags] = direction(est, truth);
    rep.dir = dir;
    rep.dir_flags = std::move(flags);
    rep.r2 = r2(est, truth);
    if (est.size() >= 3) {
        const Calibration cal = calibration(est, truth);
        rep.alpha = cal.alpha;
        rep.beta = cal.beta;
        rep.alpha_se = cal.alpha_se;
        rep.beta_se = cal.beta_se;
        rep.alpha_covers_zero = cal.alpha_covers_zero;
        rep.beta_covers_one = cal.beta_covers_one;
    }
    return rep;
}

Prop1Report prop1_decompose(const Eigen::VectorXd& est_t, const Eigen::VectorXd& est_c,
                            double truth_t, double truth_c) {
    if (est_t.size() != est_c.size())
        throw std::invalid_argument("prop1_decompose: replication count mismatch");
    if (est_t.size() < 2) throw std::invalid_argument("prop1_decompose: need >= 2 replications");

    const Eigen::ArrayXd e_t = est_t.array() - truth_t;
    const Eigen::ArrayXd e_c = est_c.array() - truth_c;

    Prop1Report rep;
    rep.mse_t = e_t.square().mean();
    rep.mse_c = e_c.square().mean();
    rep.bias_t = e_t.mean();
    rep.bias_c = e_c.mean();
    rep.mse_pite = (e_t - e_c).square().mean();
    rep.decomposed = rep.mse_t + rep.mse_c - 2.0 * rep.bias_t * rep.bias_c;
    rep.gap = rep.mse_pite - rep.decomposed;
    return rep;
}

R2Decomposition r2_decompose(const Eigen::VectorXd& e1, const Eigen::VectorXd& e0,
                             const Eigen::VectorXd& eps1, const Eigen::VectorXd& eps0) {
    if (e1.size() != e0.size() || e1.size() != eps1.size() || e1.size() != eps0.size())
        throw std::invalid_argument("r2_decompose: length mismatch");
    if (e1.size() == 0) throw std::invalid_argument("r2_decompose: empty input");

    R2Decomposition d;
    d.mse_1 = e1.array().square().mean();
    d.mse_0 = e0.array().square().mean();
    d.cov_e = (e1.array() * e0.array()).mean();
    d.var_1 = eps1.array().square().mean();
    d.var_0 = eps0.array().square().mean();
    d.cov_eps = (eps1.array() * eps0.array()).mean();

    const double denom = d.var_1 + d.var_0 - 2.0 * d.cov_eps;
    if (denom != 0.0)
        d.r2 = 1.0 - (d.mse_1 + d.mse_0 - 2.0 * d.cov_e) / denom;
    return d;
}

MaeBounds mae_bounds(const Eigen::VectorXd& e1, const Eigen::VectorXd& e0) {
    if (e1.size() != e0.size()) throw std::invalid_argument("mae_bounds: length mismatch");
    if (e1.size() == 0) throw std::invalid_argument("mae_bounds: empty input");
    const double mae1 = e1.cwiseAbs().mean();
    const double mae0 = e0.cwiseAbs().mean();
    MaeBounds b;
    b.lower = std::abs(mae1 - mae0);
    b.upper = mae1 + mae0;
    b.mae_pite = (e1 - e0).cwiseAbs().mean();
    return b;
}

const std::array<const char*, kComplexityClasses> kComplexityLabels = {
    "0%",      "(0-10]",  "(10-20]", "(20-30]", "(30-40]",  "(40-50]",
    "(50-60]", "(60-70]", "(70-80]", "(80-90]", "(90-100)", "100%"};

int complexity_class(int correct, int total) {
    if (total < 1 || correct < 0 || correct > total)
        throw std::invalid_argument("complexity_class: bad counts");
    if (correct == 0) return 0;
    if (correct == total) return kComplexityClasses - 1;
    // class k covers ((k-1)*10%, k*10%]; exact via integer ceiling
    const int k = (10 * correct + total - 1) / total;
    return k;  // 1..10
}

ComplexityTable complexity_table(const std::vector<std::vector<std::uint8_t>>& dir_flags) {
    const int k_learners = static_cast<int>(dir_flags.size());
    if (k_learners == 0) throw std::invalid_argument("complexity_table: no learners");
    const int m = static_cast<int>(dir_flags[0].size());
    if (m == 0) throw std::invalid_argument("complexity_table: no patients");
    for (const auto& f : dir_flags)
        if (static_cast<int>(f.size()) != m)
            throw std::invalid_argument("complexity_table: flag length mismatch");

    ComplexityTable t;
    t.consensus.resize(m);
    t.class_of.resize(m);
    t.correct.assign(k_learners, {});
    t.accuracy.assign(k_learners, {});

    for (int i = 0; i < m; ++i) {
        int correct = 0;
        for (int k = 0; k < k_learners; ++k) correct += dir_flags[k][i];
        t.consensus[i] = static_cast<double>(correct) / k_learners;
        const int cls = complexity_class(correct, k_learners);
        t.class_of[i] = cls;
        t.count[cls] += 1;
        for (int k = 0; k < k_learners; ++k)
            if (dir_flags[k][i]) t.correct[k][cls] += 1;
    }
    for (int k = 0; k < k_learners; ++k)
        for (int c = 0; c < kComplexityClasses; ++c)
            if (t.count[c] > 0)
                t.accuracy[k][c] = 100.0 * t.correct[k][c] / t.count[c];
    return t;
}

}  // namespace pite::metrics
