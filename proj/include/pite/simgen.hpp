#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pite/rng.hpp"

namespace pite::simgen {

enum class Mode { internal, external_correlated, external_interaction };

std::string to_string(Mode mode);
std::optional<Mode> parse_mode(const std::string& name);

// One cell of the simulation grid.
struct ScenarioConfig {
    int n = 500;          // subjects (must be even: exact half/half allocation)
    int p = 5;            // covariate dimension, or interaction-subset size
    double rho = 0.0;     // equicorrelation of covariates, in [0, 1)
    double mu_delta = 0.0;  // mean of the treatment-effect coefficients
    Mode mode = Mode::internal;
    int n_base = 6;       // base covariates in interaction mode (fixed)
    int replications = 20;
    std::uint64_t master_seed = 0;
    std::vector<std::string> learners;
    int cv_folds = 10;

    // Degenerate-DGP switches (zero noise, exactly null effect); used to
    // exercise exact-recovery and null-signal paths.
    double noise_sd = 1.0;
    bool force_null_effect = false;

    void validate() const;   // throws std::invalid_argument
    std::string key() const; // canonical id; seed streams derive from it
};

// A simulated trial population together with its generating truth.
//
// X is the model-facing covariate matrix: n x p in the correlated modes and
// n x 63 (the full interaction expansion) in interaction mode, where the
// treatment effect uses only the w_indices columns.
struct Population {
    Eigen::MatrixXd X;
    Eigen::VectorXi T;           // 0/1, sums to exactly n/2
    Eigen::VectorXd y_obs;
    Eigen::VectorXd delta_true;  // Delta(X_i)
    Eigen::VectorXd f0_true;     // control mean f_0(X_i)
    Eigen::VectorXd beta0;       // length p (length n_base in interaction mode)
    Eigen::VectorXd beta_delta;  // length p
    std::vector<int> w_indices;  // interaction mode only: columns of X forming W

    int n() const { return static_cast<int>(X.rows()); }
};

// Lower-triangular Cholesky factor of the equicorrelation matrix
// (unit diagonal, all off-diagonals rho). rho must lie in [0, 1).
Eigen::MatrixXd equicorrelation_cholesky(int p, double rho);

// n i.i.d. rows from N_p(0, Sigma), Sigma the equicorrelation matrix.
Eigen::MatrixXd sample_covariates(int n, int p, double rho, Rng& rng);

// beta0_j ~ N(0, 0.1^2), beta_delta_j ~ N(mu_delta, 0.01^2)
std::pair<Eigen::VectorXd, Eigen::VectorXd> draw_coefficients(int p, double mu_delta, Rng& rng);

// All 2^6-1 = 63 subset products of the 6 base columns, ordered by subset
// bitmask: output column k-1 is the product over bits set in k, k = 1..63.
Eigen::MatrixXd expand_interactions(const Eigen::MatrixXd& base6);

// p distinct column indices into the 63-column expansion, uniform without
// replacement.
std::vector<int> select_interaction_subset(int p, Rng& rng);

// Structural parameters shared between a training population and its external
// validation population (coefficients fresh unless pinned here).
struct GenOverrides {
    std::optional<Eigen::VectorXd> beta0;
    std::optional<Eigen::VectorXd> beta_delta;
    std::optional<std::vector<int>> w_indices;
    std::optional<double> noise_sd;
};

// Generates one population. All randomness comes from purpose-tagged streams
// derived from `seed` ("cov", "beta0", "betad", "noise", "assign", "wsel"),
// so overriding one component never perturbs the others.
Population generate_population(const ScenarioConfig& cfg, std::uint64_t seed,
                               const GenOverrides& ov = {});

// CSV dump: id,T,y_obs,delta_true,x1..xp (full double precision).
void dump_population_csv(const Population& pop, std::ostream& out);

}  // namespace pite::simgen
