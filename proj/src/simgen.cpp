#include "pite/simgen.hpp"

#include <Eigen/Cholesky>
#include <stdexcept>

#include "pite/csv.hpp"

namespace pite::simgen {

namespace {
constexpr int kExpansionCols = 63;  // 2^6 - 1 nonempty subsets of 6 base covariates
}

std::string to_string(Mode mode) {
    switch (mode) {
        case Mode::internal: return "internal";
        case Mode::external_correlated: return "external-correlated";
        case Mode::external_interaction: return "external-interaction";
    }
    return "?";
}

std::optional<Mode> parse_mode(const std::string& name) {
    if (name == "internal") return Mode::internal;
    if (name == "external-correlated") return Mode::external_correlated;
    if (name == "external-interaction") return Mode::external_interaction;
    return std::nullopt;
}

void ScenarioConfig::validate() const {
    if (n < 4) throw std::invalid_argument("scenario: n must be at least 4");
    if (n % 2 != 0) throw std::invalid_argument("scenario: n must be even (half per arm)");
    if (p < 1) throw std::invalid_argument("scenario: p must be positive");
    if (rho < 0.0 || rho >= 1.0) throw std::invalid_argument("scenario: rho must lie in [0, 1)");
    if (mode == Mode::external_interaction) {
        if (n_base != 6) throw std::invalid_argument("scenario: n_base is fixed at 6");
        if (p > kExpansionCols)
            throw std::invalid_argument("scenario: interaction subset size exceeds 63");
        if (rho != 0.0)
            throw std::invalid_argument("scenario: interaction mode draws independent covariates (rho must be 0)");
    }
    if (replications < 1) throw std::invalid_argument("scenario: replications must be positive");
    if (cv_folds < 2) throw std::invalid_argument("scenario: cv_folds must be at least 2");
    if (noise_sd < 0.0) throw std::invalid_argument("scenario: noise_sd must be nonnegative");
}

std::string ScenarioConfig::key() const {
    std::string k = to_string(mode);
    k += ";mu=" + io::format_double(mu_delta);
    k += ";rho=" + io::format_double(rho);
    k += ";p=" + std::to_string(p);
    k += ";n=" + std::to_string(n);
    return k;
}

Eigen::MatrixXd equicorrelation_cholesky(int p, double rho) {
    if (p < 1) throw std::invalid_argument("equicorrelation: p must be positive");
    if (rho < 0.0 || rho >= 1.0)
        throw std::invalid_argument("equicorrelation: rho must lie in [0, 1)");
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(p, p, rho);
    sigma.diagonal().setOnes();
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("equicorrelation: matrix not positive definite");
    return llt.matrixL();
}

Eigen::MatrixXd sample_covariates(int n, int p, double rho, Rng& rng) {
    if (n < 1) throw std::invalid_argument("sample_covariates: n must be positive");
    Eigen::MatrixXd z(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) z(i, j) = rng.normal();
    if (rho == 0.0) return z;
    const Eigen::MatrixXd chol = equicorrelation_cholesky(p, rho);
    return z * chol.transpose();  // rows x_i = L z_i
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> draw_coefficients(int p, double mu_delta, Rng& rng) {
    if (p < 1) throw std::invalid_argument("draw_coefficients: p must be positive");
    Eigen::VectorXd beta0(p), beta_delta(p);
    for (int j = 0; j < p; ++j) beta0(j) = rng.normal(0.0, 0.1);
    for (int j = 0; j < p; ++j) beta_delta(j) = rng.normal(mu_delta, 0.01);
    return {beta0, beta_delta};
}

Eigen::MatrixXd expand_interactions(const Eigen::MatrixXd& base6) {
    if (base6.cols() != 6)
        throw std::invalid_argument("expand_interactions: expected exactly 6 columns");
    const int n = static_cast<int>(base6.rows());
    Eigen::MatrixXd out(n, kExpansionCols);
    for (int mask = 1; mask <= kExpansionCols; ++mask) {
        Eigen::VectorXd col = Eigen::VectorXd::Ones(n);
        for (int j = 0; j < 6; ++j)
            if (mask & (1 << j)) col.array() *= base6.col(j).array();
        out.col(mask - 1) = col;
    }
    return out;
}

std::vector<int> select_interaction_subset(int p, Rng& rng) {
    if (p < 1 || p > kExpansionCols)
        throw std::invalid_argument("select_interaction_subset: p must lie in 1..63");
    // partial Fisher-Yates: first p entries of a uniform permutation
    std::vector<int> idx(kExpansionCols);
    for (int i = 0; i < kExpansionCols; ++i) idx[i] = i;
    for (int i = 0; i < p; ++i) {
        const int j = i + static_cast<int>(rng.uniform_int(kExpansionCols - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(p);
    return idx;
}

Population generate_population(const ScenarioConfig& cfg, std::uint64_t seed,
                               const GenOverrides& ov) {
    cfg.validate();
    const int n = cfg.n;
    const double noise_sd = ov.noise_sd.value_or(cfg.noise_sd);

    Population pop;

    if (cfg.mode == Mode::external_interaction) {
        Rng cov_rng(derive(seed, "cov"));
        const Eigen::MatrixXd base = sample_covariates(n, cfg.n_base, 0.0, cov_rng);
        pop.X = expand_interactions(base);

        if (ov.w_indices) {
            pop.w_indices = *ov.w_indices;
            if (static_cast<int>(pop.w_indices.size()) != cfg.p)
                throw std::invalid_argument("generate_population: w_indices size mismatch");
        } else {
            Rng wsel_rng(derive(seed, "wsel"));
            pop.w_indices = select_interaction_subset(cfg.p, wsel_rng);
        }

        if (ov.beta0) {
            pop.beta0 = *ov.beta0;
        } else {
            Rng b0_rng(derive(seed, "beta0"));
            pop.beta0.resize(cfg.n_base);
            for (int j = 0; j < cfg.n_base; ++j) pop.beta0(j) = b0_rng.normal(0.0, 0.1);
        }
        if (static_cast<int>(pop.beta0.size()) != cfg.n_base)
            throw std::invalid_argument("generate_population: beta0 size mismatch");

        if (cfg.force_null_effect) {
            pop.beta_delta = Eigen::VectorXd::Zero(cfg.p);
        } else if (ov.beta_delta) {
            pop.beta_delta = *ov.beta_delta;
        } else {
            Rng bd_rng(derive(seed, "betad"));
            pop.beta_delta.resize(cfg.p);
            for (int j = 0; j < cfg.p; ++j) pop.beta_delta(j) = bd_rng.normal(cfg.mu_delta, 0.01);
        }

        pop.f0_true = base * pop.beta0;
        Eigen::MatrixXd w(n, cfg.p);
        for (int j = 0; j < cfg.p; ++j) w.col(j) = pop.X.col(pop.w_indices[j]);
        pop.delta_true = w * pop.beta_delta;
    } else {
        Rng cov_rng(derive(seed, "cov"));
        pop.X = sample_covariates(n, cfg.p, cfg.rho, cov_rng);

        if (ov.beta0) {
            pop.beta0 = *ov.beta0;
        } else {
            Rng b0_rng(derive(seed, "beta0"));
            pop.beta0.resize(cfg.p);
            for (int j = 0; j < cfg.p; ++j) pop.beta0(j) = b0_rng.normal(0.0, 0.1);
        }
        if (cfg.force_null_effect) {
            pop.beta_delta = Eigen::VectorXd::Zero(cfg.p);
        } else if (ov.beta_delta) {
            pop.beta_delta = *ov.beta_delta;
        } else {
            Rng bd_rng(derive(seed, "betad"));
            pop.beta_delta.resize(cfg.p);
            for (int j = 0; j < cfg.p; ++j) pop.beta_delta(j) = bd_rng.normal(cfg.mu_delta, 0.01);
        }

        pop.f0_true = pop.X * pop.beta0;
        pop.delta_true = pop.X * pop.beta_delta;
    }

    // exact half/half allocation by random permutation, independent of X
    Rng assign_rng(derive(seed, "assign"));
    const auto perm = assign_rng.permutation(n);
    pop.T = Eigen::VectorXi::Zero(n);
    for (int i = 0; i < n / 2; ++i) pop.T(perm[i]) = 1;

    Rng noise_rng(derive(seed, "noise"));
    pop.y_obs.resize(n);
    for (int i = 0; i < n; ++i) {
        const double eps = noise_sd == 0.0 ? 0.0 : noise_rng.normal(0.0, noise_sd);
        pop.y_obs(i) = pop.f0_true(i) + eps + (pop.T(i) ? pop.delta_true(i) : 0.0);
    }
    return pop;
}

void dump_population_csv(const Population& pop, std::ostream& out) {
    const int n = pop.n();
    const int p = static_cast<int>(pop.X.cols());
    out << "id,T,y_obs,delta_true";
    for (int j = 1; j <= p; ++j) out << ",x" << j;
    out << '\n';
    for (int i = 0; i < n; ++i) {
        out << i << ',' << pop.T(i) << ',' << io::format_double(pop.y_obs(i)) << ','
            << io::format_double(pop.delta_true(i));
        for (int j = 0; j < p; ++j) out << ',' << io::format_double(pop.X(i, j));
        out << '\n';
    }
}

}  // namespace pite::simgen
