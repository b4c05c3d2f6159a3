#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "pite/engine.hpp"

using namespace pite;
using namespace pite::engine;

namespace {

simgen::ScenarioConfig scenario(int n, int p, double mu = 0.5) {
    simgen::ScenarioConfig cfg;
    cfg.n = n;
    cfg.p = p;
    cfg.rho = 0.0;
    cfg.mu_delta = mu;
    return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("engine");

TEST_CASE("split_by_arm partitions the population exactly") {
    const auto pop = simgen::generate_population(scenario(500, 5), 1);
    const auto [d0, d1] = split_by_arm(pop);
    CHECK(d0.rows.size() == 250);
    CHECK(d1.rows.size() == 250);
    std::vector<int> all = d0.rows;
    all.insert(all.end(), d1.rows.begin(), d1.rows.end());
    std::sort(all.begin(), all.end());
    for (int i = 0; i < 500; ++i) CHECK(all[i] == i);
}

TEST_CASE("single-arm populations are rejected") {
    auto pop = simgen::generate_population(scenario(100, 3), 2);
    pop.T.setOnes();
    CHECK_THROWS_AS(split_by_arm(pop), std::invalid_argument);
}

TEST_CASE("fit_pair symmetry, determinism, and exact recovery") {
    learners::LearnerSpec spec;
    spec.id = learners::LearnerId::ols;

    SUBCASE("identical arms give identical predictions") {
        Rng rng(3);
        ArmData arm;
        arm.X = testutil::random_matrix(40, 3, rng);
        arm.y = testutil::random_vector(40, rng);
        const auto pair = fit_pair(spec, arm, arm, 99);
        Rng probe(4);
        const auto x_new = testutil::random_matrix(10, 3, probe);
        CHECK((pair.model_t->predict(x_new) - pair.model_c->predict(x_new)).norm() == 0.0);
        CHECK(predict_pite(pair, x_new).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("same seed gives bit-identical pairs") {
        auto cfg = scenario(200, 4);
        const auto pop = simgen::generate_population(cfg, 5);
        const auto [d0, d1] = split_by_arm(pop);
        const auto a = fit_pair(spec, d0, d1, 123);
        const auto b = fit_pair(spec, d0, d1, 123);
        Rng probe(6);
        const auto x_new = testutil::random_matrix(20, 4, probe);
        CHECK((predict_pite(a, x_new) - predict_pite(b, x_new)).norm() == 0.0);
    }
    SUBCASE("noiseless linear truth recovers beta_delta") {
        auto cfg = scenario(300, 5);
        cfg.noise_sd = 0.0;
        const auto pop = simgen::generate_population(cfg, 7);
        const auto [d0, d1] = split_by_arm(pop);
        const auto pair = fit_pair(spec, d0, d1, 11);
        const auto& t = dynamic_cast<const learners::LinearPredictor&>(*pair.model_t);
        const auto& c = dynamic_cast<const learners::LinearPredictor&>(*pair.model_c);
        const Eigen::VectorXd diff = t.coefficients() - c.coefficients();
        CHECK((diff - pop.beta_delta).cwiseAbs().maxCoeff() < 1e-8);

        Rng probe(8);
        const auto x_new = testutil::random_matrix(50, 5, probe);
        const Eigen::VectorXd expected = x_new * pop.beta_delta;
        CHECK((predict_pite(pair, x_new) - expected).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("fit_pair annotates the failing arm") {
    learners::LearnerSpec spec;
    spec.id = learners::LearnerId::ols;
    spec.cv_folds = 2;
    Rng rng(9);
    ArmData small, large;
    small.X = testutil::random_matrix(4, 6, rng);  // n <= p: ols must fail
    small.y = testutil::random_vector(4, rng);
    large.X = testutil::random_matrix(40, 6, rng);
    large.y = testutil::random_vector(40, rng);
    try {
        fit_pair(spec, small, large, 1);
        FAIL("expected ArmFitError");
    } catch (const ArmFitError& e) {
        CHECK(std::string(e.what()).find("control arm") != std::string::npos);
    }
}

TEST_CASE("predict_pite is the elementwise difference of the arm predictions") {
    learners::LearnerSpec spec;
    spec.id = learners::LearnerId::ridge;
    const auto pop = simgen::generate_population(scenario(200, 3), 10);
    const auto [d0, d1] = split_by_arm(pop);
    const auto pair = fit_pair(spec, d0, d1, 12);
    Rng probe(13);
    const auto x_new = testutil::random_matrix(25, 3, probe);
    const Eigen::VectorXd expected =
        pair.model_t->predict(x_new) - pair.model_c->predict(x_new);
    CHECK((predict_pite(pair, x_new) - expected).norm() == 0.0);
}

TEST_CASE("pite scales with a common rescaling of both arm responses") {
    // linear learners track target scaling exactly
    learners::LearnerSpec spec;
    spec.id = learners::LearnerId::ols;
    Rng rng(14);
    ArmData d0, d1;
    d0.X = testutil::random_matrix(50, 3, rng);
    d0.y = testutil::random_vector(50, rng);
    d1.X = testutil::random_matrix(50, 3, rng);
    d1.y = testutil::random_vector(50, rng);

    ArmData d0s = d0, d1s = d1;
    const double c = 3.5;
    d0s.y *= c;
    d1s.y *= c;

    const auto base = fit_pair(spec, d0, d1, 15);
    const auto scaled = fit_pair(spec, d0s, d1s, 15);
    Rng probe(16);
    const auto x_new = testutil::random_matrix(20, 3, probe);
    CHECK((predict_pite(scaled, x_new) - c * predict_pite(base, x_new)).cwiseAbs().maxCoeff() <
          1e-9);
}

TEST_CASE("internal split is stratified, exhaustive, and deterministic") {
    const auto pop = simgen::generate_population(scenario(500, 4), 17);
    Rng rng_a(18), rng_b(18);
    const auto [train_a, test_a] = internal_split(pop, rng_a);
    const auto [train_b, test_b] = internal_split(pop, rng_b);

    CHECK(train_a.n() == 250);
    CHECK(test_a.n() == 250);
    CHECK(train_a.T.sum() == 125);
    CHECK(test_a.T.sum() == 125);
    CHECK((train_a.X - train_b.X).norm() == 0.0);
    CHECK((test_a.y_obs - test_b.y_obs).norm() == 0.0);

    // union restores the population (as multisets of outcome rows)
    std::vector<double> combined;
    for (int i = 0; i < train_a.n(); ++i) combined.push_back(train_a.y_obs(i));
    for (int i = 0; i < test_a.n(); ++i) combined.push_back(test_a.y_obs(i));
    std::vector<double> original(pop.y_obs.data(), pop.y_obs.data() + pop.n());
    std::sort(combined.begin(), combined.end());
    std::sort(original.begin(), original.end());
    CHECK(combined == original);
}

TEST_CASE("no test-set leakage: the fitted pair depends on the train half only") {
    const auto pop = simgen::generate_population(scenario(300, 4), 19);
    Rng split_rng(20);
    const auto [train, test] = internal_split(pop, split_rng);

    learners::LearnerSpec spec;
    spec.id = learners::LearnerId::lasso;
    const auto [d0, d1] = split_by_arm(train);
    const auto direct = fit_pair(spec, d0, d1, 21);

    // rebuild the train population from scratch and refit
    const auto [d0_again, d1_again] = split_by_arm(train);
    const auto refit = fit_pair(spec, d0_again, d1_again, 21);
    CHECK((predict_pite(direct, test.X) - predict_pite(refit, test.X)).norm() == 0.0);
}

TEST_SUITE_END();
