#include "pite/verify.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "pite/csv.hpp"
#include "pite/metrics.hpp"
#include "pite/rng.hpp"

namespace pite::verify {

namespace {

Eigen::VectorXd random_vector(int m, Rng& rng, double sd = 1.0) {
    Eigen::VectorXd v(m);
    for (int i = 0; i < m; ++i) v(i) = rng.normal(0.0, sd);
    return v;
}

// Random arm functions and fits; the deviation vectors are exact deviations
// from the arm means, so the reconstruction must equal the direct R^2.
IdentityResult check_r2_reconstruction(Rng& rng) {
    IdentityResult res;
    res.name = "r2-reconstruction";
    res.tolerance = 1e-10;
    constexpr int kInstances = 1000;
    constexpr int m = 100;

    double worst = 0.0;
    for (int it = 0; it < kInstances; ++it) {
        const Eigen::VectorXd f1 = random_vector(m, rng);
        const Eigen::VectorXd f0 = random_vector(m, rng);
        const Eigen::VectorXd f1_hat = f1 + random_vector(m, rng, 0.5);
        const Eigen::VectorXd f0_hat = f0 + random_vector(m, rng, 0.5);

        const Eigen::VectorXd e1 = f1 - f1_hat;
        const Eigen::VectorXd e0 = f0 - f0_hat;
        const Eigen::VectorXd eps1 = (f1.array() - f1.mean()).matrix();
        const Eigen::VectorXd eps0 = (f0.array() - f0.mean()).matrix();

        const auto decomp = metrics::r2_decompose(e1, e0, eps1, eps0);
        const auto direct = metrics::r2(f1_hat - f0_hat, f1 - f0);
        if (!decomp.r2 || !direct) continue;
        worst = std::max(worst, std::abs(*decomp.r2 - *direct));
    }
    res.gap = worst;
    res.pass = worst <= res.tolerance;
    res.detail = "max |reconstructed - direct| over 1000 instances";
    return res;
}

IdentityResult check_mae_bounds(Rng& rng) {
    IdentityResult res;
    res.name = "mae-bounds";
    res.tolerance = 1e-12;
    constexpr int kInstances = 1000;
    constexpr int m = 100;

    double worst = 0.0;
    for (int it = 0; it < kInstances; ++it) {
        const Eigen::VectorXd e1 = random_vector(m, rng);
        const Eigen::VectorXd e0 = random_vector(m, rng);
        const auto b = metrics::mae_bounds(e1, e0);
        worst = std::max(worst, b.lower - b.mae_pite);  // violation if positive
        worst = std::max(worst, b.mae_pite - b.upper);
    }
    res.gap = worst;
    res.pass = worst <= res.tolerance;
    res.detail = "worst envelope violation over 1000 instances";
    return res;
}

IdentityResult check_calibration_identity(Rng& rng) {
    IdentityResult res;
    res.name = "calibration-identity";
    res.tolerance = 1e-12;
    const Eigen::VectorXd est = random_vector(1000, rng);
    const auto cal = metrics::calibration(est, est);
    if (!cal.alpha || !cal.beta) {
        res.gap = 1.0;
        res.pass = false;
        res.detail = "calibration came back undefined";
        return res;
    }
    res.gap = std::max(std::abs(*cal.alpha), std::abs(*cal.beta - 1.0));
    res.pass = res.gap <= res.tolerance;
    res.detail = "max |alpha|, |beta - 1| for calibration(est, est)";
    return res;
}

IdentityResult check_prop1(Rng& rng, bool inject_sign_bug) {
    IdentityResult res;
    res.name = "prop1-decomposition";
    constexpr int kReps = 10000;
    const double truth_t = 2.0, truth_c = 0.5;

    struct Case {
        double bias_t, bias_c, sd_t, sd_c;
    };
    const Case cases[] = {{0.0, 0.0, 1.0, 1.0}, {1.0, -1.0, 1.0, 1.0}, {0.5, 0.5, 0.7, 1.2}};

    double worst_ratio = 0.0;
    std::string detail;
    for (const auto& c : cases) {
        Eigen::VectorXd est_t(kReps), est_c(kReps);
        for (int r = 0; r < kReps; ++r) {
            est_t(r) = truth_t + c.bias_t + rng.normal(0.0, c.sd_t);
            est_c(r) = truth_c + c.bias_c + rng.normal(0.0, c.sd_c);
        }
        const auto rep = metrics::prop1_decompose(est_t, est_c, truth_t, truth_c);

        const double sign = inject_sign_bug ? 1.0 : -1.0;
        const double mse_t = c.sd_t * c.sd_t + c.bias_t * c.bias_t;
        const double mse_c = c.sd_c * c.sd_c + c.bias_c * c.bias_c;
        const double expected = mse_t + mse_c + sign * 2.0 * c.bias_t * c.bias_c;

        // standard error of the measured MSE_PITE: the squared error is a
        // scaled noncentral chi-square with mean m^2 + s^2 and
        // variance (4 m^2 s^2 + 2 s^4) / R
        const double m_diff = c.bias_t - c.bias_c;
        const double s2 = c.sd_t * c.sd_t + c.sd_c * c.sd_c;
        const double se = std::sqrt((4.0 * m_diff * m_diff * s2 + 2.0 * s2 * s2) / kReps);

        const double gap = std::abs(rep.mse_pite - expected);
        const double ratio = gap / (3.0 * se);
        if (ratio > worst_ratio) {
            worst_ratio = ratio;
            res.gap = gap;
            res.tolerance = 3.0 * se;
            detail = "worst case (b_t=" + io::format_double(c.bias_t) +
                     ", b_c=" + io::format_double(c.bias_c) + ") at 10^4 replications";
        }
    }
    res.pass = worst_ratio <= 1.0;
    res.detail = detail;
    return res;
}

}  // namespace

std::vector<IdentityResult> run_identity_suite(const Options& options) {
    std::vector<IdentityResult> results;
    {
        Rng rng(derive(options.seed, "r2"));
        results.push_back(check_r2_reconstruction(rng));
    }
    {
        Rng rng(derive(options.seed, "mae"));
        results.push_back(check_mae_bounds(rng));
    }
    {
        Rng rng(derive(options.seed, "calibration"));
        results.push_back(check_calibration_identity(rng));
    }
    {
        Rng rng(derive(options.seed, "prop1"));
        results.push_back(check_prop1(rng, options.inject_prop1_sign_bug));
    }
    return results;
}

bool all_pass(const std::vector<IdentityResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return true;
}

}  // namespace pite::verify
