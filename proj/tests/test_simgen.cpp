#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "pite/csv.hpp"
#include "pite/simgen.hpp"

using namespace pite;
using namespace pite::simgen;

TEST_SUITE_BEGIN("simgen");

TEST_CASE("equicorrelation cholesky matches the hand factorization at p=2") {
    const auto chol = equicorrelation_cholesky(2, 0.95);
    CHECK(chol(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(chol(1, 0) == doctest::Approx(0.95).epsilon(1e-14));
    CHECK(chol(1, 1) == doctest::Approx(std::sqrt(1.0 - 0.95 * 0.95)).epsilon(1e-14));
    CHECK(chol(0, 1) == 0.0);
}

TEST_CASE("rho = 0 gives the identity factor") {
    const auto chol = equicorrelation_cholesky(3, 0.0);
    CHECK((chol - Eigen::MatrixXd::Identity(3, 3)).norm() == doctest::Approx(0.0));
}

TEST_CASE("singular and out-of-range rho are rejected") {
    Rng rng(1);
    CHECK_THROWS_AS(sample_covariates(10, 3, 1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_covariates(10, 3, -0.1, rng), std::invalid_argument);
    CHECK_THROWS_AS(equicorrelation_cholesky(3, 1.0), std::invalid_argument);
}

TEST_CASE("empirical covariance converges to the equicorrelation target") {
    Rng rng(42);
    const int n = 100000, p = 4;
    const double rho = 0.5;
    const Eigen::MatrixXd x = sample_covariates(n, p, rho, rng);
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - mean;
    const Eigen::MatrixXd cov = centered.transpose() * centered / double(n - 1);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            if (i == j)
                CHECK(cov(i, j) == doctest::Approx(1.0).epsilon(0.02));
            else
                CHECK(std::abs(cov(i, j) - rho) < 0.02);
        }
}

TEST_CASE("coefficient draws follow the stated distributions") {
    SUBCASE("mean of beta_delta at mu = 0") {
        Rng rng(7);
        const int draws = 100000;
        double sum = 0.0;
        int count = 0;
        while (count < draws) {
            const auto [b0, bd] = draw_coefficients(5, 0.0, rng);
            sum += bd.sum();
            count += 5;
        }
        CHECK(std::abs(sum / count) < 3.0 * 0.01 / std::sqrt(double(count)));
    }
    SUBCASE("sd of beta_delta near 0.01 at mu = 0.5") {
        Rng rng(8);
        std::vector<double> pool;
        while (pool.size() < 100000) {
            const auto [b0, bd] = draw_coefficients(45, 0.5, rng);
            for (int j = 0; j < bd.size(); ++j) pool.push_back(bd(j));
        }
        double mean = 0.0;
        for (double v : pool) mean += v;
        mean /= double(pool.size());
        double ss = 0.0;
        for (double v : pool) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / double(pool.size() - 1));
        CHECK(sd > 0.0099);
        CHECK(sd < 0.0101);
        CHECK(mean == doctest::Approx(0.5).epsilon(1e-3));
    }
    SUBCASE("fixed seed reproduces the vectors") {
        Rng a(99), b(99);
        const auto [a0, ad] = draw_coefficients(10, 0.25, a);
        const auto [b0, bd] = draw_coefficients(10, 0.25, b);
        CHECK((a0 - b0).norm() == 0.0);
        CHECK((ad - bd).norm() == 0.0);
    }
}

namespace {

ScenarioConfig base_scenario() {
    ScenarioConfig cfg;
    cfg.n = 500;
    cfg.p = 5;
    cfg.rho = 0.0;
    cfg.mu_delta = 0.5;
    cfg.mode = Mode::internal;
    cfg.master_seed = 1234;
    return cfg;
}

}  // namespace

TEST_CASE("generated population satisfies its structural identities") {
    auto cfg = base_scenario();
    const auto pop = generate_population(cfg, 555);

    CHECK(pop.T.sum() == cfg.n / 2);

    // delta recomputes from X and beta_delta to machine precision
    const Eigen::VectorXd recomputed = pop.X * pop.beta_delta;
    CHECK((recomputed - pop.delta_true).norm() <= 1e-12 * (1.0 + pop.delta_true.norm()));

    // recovered noise is i.i.d. N(0,1): KS check at significance 0.001
    std::vector<double> eps(cfg.n);
    for (int i = 0; i < cfg.n; ++i)
        eps[i] = pop.y_obs(i) - pop.f0_true(i) - (pop.T(i) ? pop.delta_true(i) : 0.0);
    CHECK(testutil::ks_statistic_normal(eps) < testutil::ks_critical(0.001, eps.size()));
}

TEST_CASE("odd n is rejected") {
    auto cfg = base_scenario();
    cfg.n = 501;
    CHECK_THROWS_AS(generate_population(cfg, 1), std::invalid_argument);
}

TEST_CASE("null effect forces delta to exactly zero") {
    auto cfg = base_scenario();
    cfg.force_null_effect = true;
    const auto pop = generate_population(cfg, 9);
    CHECK(pop.delta_true.cwiseAbs().maxCoeff() == 0.0);
    CHECK(pop.beta_delta.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("noiseless population with zero baseline reduces to y = T * delta") {
    auto cfg = base_scenario();
    cfg.noise_sd = 0.0;
    GenOverrides ov;
    ov.beta0 = Eigen::VectorXd::Zero(cfg.p);
    const auto pop = generate_population(cfg, 10, ov);
    for (int i = 0; i < cfg.n; ++i) {
        const double expected = pop.T(i) ? pop.delta_true(i) : 0.0;
        CHECK(pop.y_obs(i) == expected);
    }
}

TEST_CASE("mean of delta_true is centered over repeated populations") {
    // brute-force Monte Carlo of E[Delta] = 0 under centered covariates
    auto cfg = base_scenario();
    const int reps = 200;
    std::vector<double> pop_means(reps);
    for (int r = 0; r < reps; ++r) {
        const auto pop = generate_population(cfg, derive(1000, std::uint64_t(r)));
        pop_means[r] = pop.delta_true.mean();
    }
    double mean = 0.0;
    for (double v : pop_means) mean += v;
    mean /= reps;
    double ss = 0.0;
    for (double v : pop_means) ss += (v - mean) * (v - mean);
    const double se = std::sqrt(ss / (reps - 1)) / std::sqrt(double(reps));
    CHECK(std::abs(mean) < 3.0 * se);
}

TEST_CASE("population generation is deterministic in the seed") {
    auto cfg = base_scenario();
    const auto a = generate_population(cfg, 77);
    const auto b = generate_population(cfg, 77);
    CHECK((a.X - b.X).norm() == 0.0);
    CHECK((a.y_obs - b.y_obs).norm() == 0.0);
    CHECK((a.T - b.T).norm() == 0);
}

TEST_CASE("interaction expansion") {
    SUBCASE("all-ones row yields all-ones expansion") {
        Eigen::MatrixXd base = Eigen::MatrixXd::Ones(1, 6);
        const auto w = expand_interactions(base);
        CHECK(w.cols() == 63);
        CHECK(w.row(0).minCoeff() == 1.0);
        CHECK(w.row(0).maxCoeff() == 1.0);
    }
    SUBCASE("pair product lands in the bitmask column") {
        Eigen::MatrixXd base(1, 6);
        base << 2, 3, 1, 1, 1, 1;
        const auto w = expand_interactions(base);
        // subset {1,2} has bitmask 0b11 = 3, column index 2
        CHECK(w(0, 2) == 6.0);
        CHECK(w(0, 0) == 2.0);
        CHECK(w(0, 1) == 3.0);
    }
    SUBCASE("column count is 63 for any n") {
        Rng rng(3);
        const auto w = expand_interactions(testutil::random_matrix(17, 6, rng));
        CHECK(w.rows() == 17);
        CHECK(w.cols() == 63);
    }
    SUBCASE("a zero coordinate zeroes every subset containing it") {
        Rng rng(4);
        Eigen::MatrixXd base = testutil::random_matrix(1, 6, rng);
        base(0, 2) = 0.0;
        const auto w = expand_interactions(base);
        int zeroed = 0;
        for (int mask = 1; mask <= 63; ++mask) {
            if (mask & (1 << 2)) {
                CHECK(w(0, mask - 1) == 0.0);
                ++zeroed;
            } else {
                CHECK(w(0, mask - 1) != 0.0);
            }
        }
        CHECK(zeroed == 32);  // subsets containing a fixed element
    }
    SUBCASE("wrong width is rejected") {
        CHECK_THROWS_AS(expand_interactions(Eigen::MatrixXd::Ones(3, 5)),
                        std::invalid_argument);
    }
}

TEST_CASE("interaction subset selection") {
    Rng rng(11);
    SUBCASE("p = 63 selects every column") {
        auto idx = select_interaction_subset(63, rng);
        std::sort(idx.begin(), idx.end());
        for (int i = 0; i < 63; ++i) CHECK(idx[i] == i);
    }
    SUBCASE("indices are distinct and deterministic under a fixed seed") {
        Rng a(5), b(5);
        const auto ia = select_interaction_subset(5, a);
        const auto ib = select_interaction_subset(5, b);
        CHECK(ia == ib);
        auto sorted = ia;
        std::sort(sorted.begin(), sorted.end());
        CHECK(std::unique(sorted.begin(), sorted.end()) == sorted.end());
    }
    SUBCASE("p > 63 is rejected") {
        CHECK_THROWS_AS(select_interaction_subset(64, rng), std::invalid_argument);
    }
}

TEST_CASE("interaction-mode population uses the selected columns for delta") {
    ScenarioConfig cfg;
    cfg.mode = Mode::external_interaction;
    cfg.n = 100;
    cfg.p = 5;
    cfg.rho = 0.0;
    cfg.mu_delta = 0.5;
    const auto pop = generate_population(cfg, 21);
    CHECK(pop.X.cols() == 63);
    CHECK(pop.w_indices.size() == 5);
    CHECK(pop.beta0.size() == 6);
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(cfg.n);
    for (int j = 0; j < 5; ++j)
        delta += pop.X.col(pop.w_indices[j]) * pop.beta_delta(j);
    CHECK((delta - pop.delta_true).norm() <= 1e-12 * (1.0 + delta.norm()));
}

TEST_CASE("population csv dump has the documented shape and round-trips") {
    auto cfg = base_scenario();
    cfg.n = 10;
    const auto pop = generate_population(cfg, 31);
    std::ostringstream out;
    dump_population_csv(pop, out);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "id,T,y_obs,delta_true,x1,x2,x3,x4,x5");
    std::string first;
    std::getline(in, first);
    const auto fields = io::split_csv_line(first);
    CHECK(fields.size() == 9);
    CHECK(io::parse_double(fields[2]) == pop.y_obs(0));
}

TEST_SUITE_END();
