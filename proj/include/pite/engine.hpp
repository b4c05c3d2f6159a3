#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pite/learners.hpp"
#include "pite/rng.hpp"
#include "pite/simgen.hpp"

namespace pite::engine {

// One treatment arm of a population.
struct ArmData {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::vector<int> rows;  // indices into the source population
};

// Disjoint, exhaustive partition by treatment indicator: (control, treated).
std::pair<ArmData, ArmData> split_by_arm(const simgen::Population& pop);

// Two independently fitted arm predictors for one learner. The constructor
// path guarantees model_t saw only treated rows and model_c only controls.
struct FittedPair {
    learners::PredictorPtr model_c;
    learners::PredictorPtr model_t;
    learners::LearnerId id = learners::LearnerId::ols;
};

struct ArmFitError : std::runtime_error {
    ArmFitError(const std::string& arm, const std::string& what)
        : std::runtime_error(arm + " arm: " + what) {}
};

// Fits the learner separately per arm, with independent rng sub-streams
// ("arm0" / "arm1" derived from seed) so the two fits share no randomness.
FittedPair fit_pair(const learners::LearnerSpec& spec, const ArmData& control,
                    const ArmData& treated, std::uint64_t seed);

// f_t(x) - f_c(x), elementwise.
Eigen::VectorXd predict_pite(const FittedPair& pair, const Eigen::MatrixXd& x_new);

// 50:50 random split stratified by arm (both halves keep the exact treatment
// balance). Returns (train, test).
std::pair<simgen::Population, simgen::Population> internal_split(const simgen::Population& pop,
                                                                 Rng& rng);

}  // namespace pite::engine
