#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pite::metrics {

// Scores of one estimate vector against the true individual effects.
// r2 and the calibration coefficients can be undefined (constant truth /
// constant estimate) and are then reported missing, never silently zeroed.
struct MetricReport {
    double rmse = 0.0;
    double mae = 0.0;
    double dir = 0.0;
    std::optional<double> r2;
    std::optional<double> alpha, beta;        // calibration intercept / slope
    std::optional<double> alpha_se, beta_se;
    std::optional<bool> alpha_covers_zero;    // 95% CI for alpha contains 0
    std::optional<bool> beta_covers_one;      // 95% CI for beta contains 1
    std::vector<std::uint8_t> dir_flags;      // per-subject sign agreement
};

double rmse(const Eigen::VectorXd& est, const Eigen::VectorXd& truth);
double mae(const Eigen::VectorXd& est, const Eigen::VectorXd& truth);

// Three-valued sign agreement: flag_i = 1 iff sign(est_i) == sign(truth_i)
// with sign in {-1, 0, +1}. Returns (mean flag, per-subject flags).
std::pair<double, std::vector<std::uint8_t>> direction(const Eigen::VectorXd& est,
                                                       const Eigen::VectorXd& truth);

// 1 - SS_res / SS_tot with the truth vector centered by its own mean;
// missing when the truth has zero variance.
std::optional<double> r2(const Eigen::VectorXd& est, const Eigen::VectorXd& truth);

struct Calibration {
    std::optional<double> alpha, beta;
    std::optional<double> alpha_se, beta_se;
    std::optional<bool> alpha_covers_zero;
    std::optional<bool> beta_covers_one;
};

// OLS of truth on est: truth_i = alpha + beta * est_i + eta_i.
// Perfect calibration is (0, 1). Missing when est is constant.
Calibration calibration(const Eigen::VectorXd& est, const Eigen::VectorXd& truth);

MetricReport compute_report(const Eigen::VectorXd& est, const Eigen::VectorXd& truth);

// --- decomposition identities -----------------------------------------------

// Monte Carlo decomposition of the PITE mean squared error over replicated,
// independently fitted arm predictions of a fixed estimand:
//   MSE_PITE = MSE_t + MSE_c - 2 bias_t bias_c
struct Prop1Report {
    double mse_pite = 0.0;
    double mse_t = 0.0, mse_c = 0.0;
    double bias_t = 0.0, bias_c = 0.0;
    double decomposed = 0.0;  // right-hand side of the identity
    double gap = 0.0;         // mse_pite - decomposed
};

Prop1Report prop1_decompose(const Eigen::VectorXd& est_t, const Eigen::VectorXd& est_c,
                            double truth_t, double truth_c);

// R^2 reconstruction from per-arm error and deviation vectors:
//   R^2 = 1 - (MSE1 + MSE0 - 2 Cov_e) / (VAR1 + VAR0 - 2 Cov_eps)
// Equals the direct computation on the implied PITE vectors when the
// deviation inputs are centered (deviations from the arm means).
struct R2Decomposition {
    double mse_1 = 0.0, mse_0 = 0.0, cov_e = 0.0;
    double var_1 = 0.0, var_0 = 0.0, cov_eps = 0.0;
    std::optional<double> r2;
};

R2Decomposition r2_decompose(const Eigen::VectorXd& e1, const Eigen::VectorXd& e0,
                             const Eigen::VectorXd& eps1, const Eigen::VectorXd& eps0);

// Triangle / reverse-triangle envelope of the PITE mean absolute error.
struct MaeBounds {
    double lower = 0.0, upper = 0.0, mae_pite = 0.0;
};

MaeBounds mae_bounds(const Eigen::VectorXd& e1, const Eigen::VectorXd& e0);

// Umbrella record for the identity/verification suite.
struct DecompositionReport {
    Prop1Report prop1;
    R2Decomposition r2;
    MaeBounds mae;
};

// --- complexity-consensus stratification ------------------------------------

// Twelve ordered consensus classes of C_i = (1/K) sum_k D_i^(k):
// 0%, (0-10], ..., (80-90], (90-100), 100%. 0 and 1 are their own bins and
// 1 is excluded from (90-100).
constexpr int kComplexityClasses = 12;
extern const std::array<const char*, kComplexityClasses> kComplexityLabels;

// Exact integer binning of C_i = correct / total.
int complexity_class(int correct, int total);

struct ComplexityTable {
    std::vector<double> consensus;                 // C_i per patient
    std::vector<int> class_of;                     // class index per patient
    std::array<int, kComplexityClasses> count{};   // patients per class
    // per learner x class: patients in the class this learner got right
    std::vector<std::array<int, kComplexityClasses>> correct;
    // per learner x class: 100 * correct / count (missing when count == 0)
    std::vector<std::array<std::optional<double>, kComplexityClasses>> accuracy;
};

// dir_flags: one flag vector per learner, all of equal length m.
ComplexityTable complexity_table(const std::vector<std::vector<std::uint8_t>>& dir_flags);

}  // namespace pite::metrics
