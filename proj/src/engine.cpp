#include "pite/engine.hpp"

#include <algorithm>

namespace pite::engine {

namespace {

simgen::Population subset_population(const simgen::Population& pop, const std::vector<int>& rows) {
    simgen::Population out;
    const int m = static_cast<int>(rows.size());
    out.X.resize(m, pop.X.cols());
    out.T.resize(m);
    out.y_obs.resize(m);
    out.delta_true.resize(m);
    out.f0_true.resize(m);
    for (int i = 0; i < m; ++i) {
        const int r = rows[i];
        out.X.row(i) = pop.X.row(r);
        out.T(i) = pop.T(r);
        out.y_obs(i) = pop.y_obs(r);
        out.delta_true(i) = pop.delta_true(r);
        out.f0_true(i) = pop.f0_true(r);
    }
    out.beta0 = pop.beta0;
    out.beta_delta = pop.beta_delta;
    out.w_indices = pop.w_indices;
    return out;
}

}  // namespace

std::pair<ArmData, ArmData> split_by_arm(const simgen::Population& pop) {
    const int n = pop.n();
    std::vector<int> control_rows, treated_rows;
    for (int i = 0; i < n; ++i) (pop.T(i) ? treated_rows : control_rows).push_back(i);
    if (control_rows.empty() || treated_rows.empty())
        throw std::invalid_argument("split_by_arm: population has a single arm");

    auto make_arm = [&pop](const std::vector<int>& rows) {
        ArmData arm;
        arm.rows = rows;
        arm.X.resize(rows.size(), pop.X.cols());
        arm.y.resize(rows.size());
        for (size_t i = 0; i < rows.size(); ++i) {
            arm.X.row(i) = pop.X.row(rows[i]);
            arm.y(i) = pop.y_obs(rows[i]);
        }
        return arm;
    };
    return {make_arm(control_rows), make_arm(treated_rows)};
}

FittedPair fit_pair(const learners::LearnerSpec& spec, const ArmData& control,
                    const ArmData& treated, std::uint64_t seed) {
    FittedPair pair;
    pair.id = spec.id;
    {
        Rng rng(derive(seed, "arm0"));
        try {
            pair.model_c = learners::fit(spec, control.X, control.y, rng);
        } catch (const std::exception& e) {
            throw ArmFitError("control", e.what());
        }
    }
    {
        Rng rng(derive(seed, "arm1"));
        try {
            pair.model_t = learners::fit(spec, treated.X, treated.y, rng);
        } catch (const std::exception& e) {
            throw ArmFitError("treated", e.what());
        }
    }
    return pair;
}

Eigen::VectorXd predict_pite(const FittedPair& pair, const Eigen::MatrixXd& x_new) {
    return pair.model_t->predict(x_new) - pair.model_c->predict(x_new);
}

std::pair<simgen::Population, simgen::Population> internal_split(const simgen::Population& pop,
                                                                 Rng& rng) {
    const int n = pop.n();
    if (n < 4) throw std::invalid_argument("internal_split: need at least 4 subjects");

    std::vector<int> train_rows, test_rows;
    for (int arm = 0; arm <= 1; ++arm) {
        std::vector<int> arm_rows;
        for (int i = 0; i < n; ++i)
            if (pop.T(i) == arm) arm_rows.push_back(i);
        const int m = static_cast<int>(arm_rows.size());
        const auto perm = rng.permutation(m);
        const int train_count = (m + 1) / 2;  // odd arm sizes favor the train half
        for (int i = 0; i < m; ++i)
            (i < train_count ? train_rows : test_rows).push_back(arm_rows[perm[i]]);
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
    return {subset_population(pop, train_rows), subset_population(pop, test_rows)};
}

}  // namespace pite::engine
