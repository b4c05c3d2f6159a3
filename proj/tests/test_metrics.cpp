#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "pite/metrics.hpp"

using namespace pite;
using namespace pite::metrics;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
    Eigen::VectorXd v(values.size());
    int i = 0;
    for (double x : values) v(i++) = x;
    return v;
}

}  // namespace

TEST_SUITE_BEGIN("metrics");

TEST_CASE("rmse") {
    CHECK(rmse(vec({1, 2, 3}), vec({1, 2, 3})) == 0.0);
    CHECK(rmse(vec({1, 2}), vec({0, 0})) == doctest::Approx(std::sqrt(2.5)).epsilon(1e-12));
    SUBCASE("translation invariance") {
        Rng rng(1);
        const auto est = testutil::random_vector(50, rng);
        const auto truth = testutil::random_vector(50, rng);
        for (double c : {-3.7, 0.4, 12.0})
            CHECK(rmse((est.array() + c).matrix(), (truth.array() + c).matrix()) ==
                  doctest::Approx(rmse(est, truth)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(rmse(vec({1}), vec({1, 2})), std::invalid_argument);
    CHECK_THROWS_AS(rmse(Eigen::VectorXd(), Eigen::VectorXd()), std::invalid_argument);
}

TEST_CASE("direction") {
    SUBCASE("all signs agree") {
        auto [dir, flags] = direction(vec({0.5, -0.2, 1}), vec({1, -1, 3}));
        CHECK(dir == 1.0);
    }
    SUBCASE("three of four agree") {
        auto [dir, flags] = direction(vec({1, 1, -1, 1}), vec({1, -1, -1, 1}));
        CHECK(dir == 0.75);
        CHECK(flags == std::vector<std::uint8_t>{1, 0, 1, 1});
    }
    SUBCASE("zero agrees with zero under the three-valued sign") {
        auto [dir, flags] = direction(vec({0}), vec({0}));
        CHECK(dir == 1.0);
    }
    SUBCASE("invariant under positive rescaling of the estimate") {
        Rng rng(2);
        const auto est = testutil::random_vector(100, rng);
        const auto truth = testutil::random_vector(100, rng);
        const double base = direction(est, truth).first;
        for (double c : {0.001, 0.5, 40.0})
            CHECK(direction(est * c, truth).first == base);
    }
}

TEST_CASE("mae and r2") {
    CHECK(mae(vec({1, 2}), vec({0, 0})) == doctest::Approx(1.5).epsilon(1e-12));
    SUBCASE("perfect fit") {
        const auto t = vec({1, 2, 3});
        CHECK(mae(t, t) == 0.0);
        CHECK(*r2(t, t) == 1.0);
    }
    SUBCASE("mean predictor has r2 zero") {
        const auto truth = vec({1, 2, 3, 6});
        const auto est = Eigen::VectorXd::Constant(4, truth.mean());
        CHECK(*r2(est, truth) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("constant truth reports missing r2") {
        CHECK(!r2(vec({1, 2, 3}), vec({4, 4, 4})).has_value());
    }
    SUBCASE("mae <= rmse always") {
        Rng rng(3);
        for (int it = 0; it < 200; ++it) {
            const auto est = testutil::random_vector(30, rng);
            const auto truth = testutil::random_vector(30, rng);
            CHECK(mae(est, truth) <= rmse(est, truth) + 1e-15);
        }
    }
}

TEST_CASE("calibration") {
    SUBCASE("identity calibration") {
        Rng rng(4);
        const auto est = testutil::random_vector(100, rng);
        const auto cal = calibration(est, est);
        CHECK(std::abs(*cal.alpha) <= 1e-12);
        CHECK(std::abs(*cal.beta - 1.0) <= 1e-12);
    }
    SUBCASE("exact affine truth recovers the coefficients") {
        Rng rng(5);
        const auto est = testutil::random_vector(60, rng);
        const Eigen::VectorXd truth = (2.0 * est.array() + 3.0).matrix();
        const auto cal = calibration(est, truth);
        CHECK(*cal.alpha == doctest::Approx(3.0).epsilon(1e-10));
        CHECK(*cal.beta == doctest::Approx(2.0).epsilon(1e-10));
    }
    SUBCASE("noisy slope near one with tight tolerance") {
        Rng rng(6);
        const int m = 10000;
        const auto est = testutil::random_vector(m, rng);
        Eigen::VectorXd truth = est;
        for (int i = 0; i < m; ++i) truth(i) += rng.normal(0.0, 0.1);
        const auto cal = calibration(est, truth);
        CHECK(std::abs(*cal.beta - 1.0) < 0.02);
        CHECK(*cal.beta_covers_one);
    }
    SUBCASE("constant estimate reports everything missing") {
        Rng rng(7);
        const auto cal =
            calibration(Eigen::VectorXd::Constant(10, 2.0), testutil::random_vector(10, rng));
        CHECK(!cal.alpha.has_value());
        CHECK(!cal.beta.has_value());
    }
    CHECK_THROWS_AS(calibration(vec({1, 2}), vec({1, 2})), std::invalid_argument);
}

TEST_CASE("proposition 1 decomposition") {
    SUBCASE("constant predictors make the identity exact") {
        const double b_t = 0.7, b_c = -0.3;
        const Eigen::VectorXd est_t = Eigen::VectorXd::Constant(10, 1.0 + b_t);
        const Eigen::VectorXd est_c = Eigen::VectorXd::Constant(10, 2.0 + b_c);
        const auto rep = prop1_decompose(est_t, est_c, 1.0, 2.0);
        CHECK(rep.gap == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(rep.mse_pite ==
              doctest::Approx(b_t * b_t + b_c * b_c - 2.0 * b_t * b_c).epsilon(1e-12));
    }
    SUBCASE("opposite unit biases amplify to four") {
        const Eigen::VectorXd est_t = Eigen::VectorXd::Constant(5, 1.0);  // truth 0, bias +1
        const Eigen::VectorXd est_c = Eigen::VectorXd::Constant(5, -1.0); // truth 0, bias -1
        const auto rep = prop1_decompose(est_t, est_c, 0.0, 0.0);
        CHECK(rep.mse_pite == doctest::Approx(4.0).epsilon(1e-13));
        CHECK(rep.gap == doctest::Approx(0.0).epsilon(1e-13));
    }
    SUBCASE("independent unbiased noise: mse is the variance sum within 3 se") {
        Rng rng(8);
        const int reps = 10000;
        const double sd_t = 0.8, sd_c = 1.1;
        Eigen::VectorXd est_t(reps), est_c(reps);
        for (int r = 0; r < reps; ++r) {
            est_t(r) = 4.0 + rng.normal(0.0, sd_t);
            est_c(r) = 1.0 + rng.normal(0.0, sd_c);
        }
        const auto rep = prop1_decompose(est_t, est_c, 4.0, 1.0);
        const double s2 = sd_t * sd_t + sd_c * sd_c;
        const double se = std::sqrt(2.0 * s2 * s2 / reps);
        CHECK(std::abs(rep.mse_pite - s2) < 3.0 * se);
    }
    SUBCASE("monte carlo gap stays within its sampling band at both scales") {
        // gap = -2 cov_hat(e_t, e_c); sd ~= sd_t sd_c / sqrt(R)
        for (const int reps : {100, 10000}) {
            Rng rng(9 + reps);
            Eigen::VectorXd est_t(reps), est_c(reps);
            for (int r = 0; r < reps; ++r) {
                est_t(r) = 1.0 + rng.normal(0.0, 1.0);
                est_c(r) = 2.0 + rng.normal(0.0, 1.0);
            }
            const auto rep = prop1_decompose(est_t, est_c, 1.0, 2.0);
            CHECK(std::abs(rep.gap) < 6.0 / std::sqrt(double(reps)));
        }
    }
    CHECK_THROWS_AS(prop1_decompose(vec({1}), vec({1}), 0, 0), std::invalid_argument);
}

TEST_CASE("r2 decomposition") {
    SUBCASE("fully cancelling errors give r2 = 1") {
        Rng rng(10);
        const auto e = testutil::random_vector(40, rng);
        auto eps1 = testutil::random_vector(40, rng);
        auto eps0 = testutil::random_vector(40, rng);
        const auto d = r2_decompose(e, e, eps1, eps0);
        REQUIRE(d.r2.has_value());
        CHECK(*d.r2 == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("reconstruction equals the direct r2 on implied vectors") {
        Rng rng(11);
        for (int it = 0; it < 50; ++it) {
            const int m = 100;
            const auto f1 = testutil::random_vector(m, rng);
            const auto f0 = testutil::random_vector(m, rng);
            const Eigen::VectorXd f1_hat = f1 + testutil::random_vector(m, rng, 0.4);
            const Eigen::VectorXd f0_hat = f0 + testutil::random_vector(m, rng, 0.4);
            const auto d = r2_decompose(f1 - f1_hat, f0 - f0_hat,
                                        (f1.array() - f1.mean()).matrix(),
                                        (f0.array() - f0.mean()).matrix());
            const auto direct = r2(f1_hat - f0_hat, f1 - f0);
            REQUIRE(d.r2.has_value());
            REQUIRE(direct.has_value());
            CHECK(std::abs(*d.r2 - *direct) <= 1e-10);
        }
    }
    SUBCASE("one-arm degenerate case reduces to the single-model r2") {
        Rng rng(12);
        const int m = 60;
        const auto f1 = testutil::random_vector(m, rng);
        const Eigen::VectorXd f1_hat = f1 + testutil::random_vector(m, rng, 0.3);
        const Eigen::VectorXd zero = Eigen::VectorXd::Zero(m);
        const auto d = r2_decompose(f1 - f1_hat, zero, (f1.array() - f1.mean()).matrix(), zero);
        const auto direct = r2(f1_hat, f1);
        CHECK(*d.r2 == doctest::Approx(*direct).epsilon(1e-12));
    }
}

TEST_CASE("mae bounds") {
    SUBCASE("same-sign dominated errors are tight at the lower bound") {
        const auto e1 = vec({3, 2, 5});
        const auto e0 = vec({1, 1, 2});
        const auto b = mae_bounds(e1, e0);
        CHECK(b.mae_pite == doctest::Approx(b.lower).epsilon(1e-14));
    }
    SUBCASE("opposite errors are tight at the upper bound") {
        Rng rng(13);
        const auto e1 = testutil::random_vector(30, rng);
        const auto b = mae_bounds(e1, -e1);
        CHECK(b.mae_pite == doctest::Approx(b.upper).epsilon(1e-14));
    }
    SUBCASE("bounds hold on random input") {
        Rng rng(14);
        for (int it = 0; it < 100; ++it) {
            const auto e1 = testutil::random_vector(1000, rng);
            const auto e0 = testutil::random_vector(1000, rng);
            const auto b = mae_bounds(e1, e0);
            CHECK(b.lower <= b.mae_pite + 1e-14);
            CHECK(b.mae_pite <= b.upper + 1e-14);
        }
    }
}

TEST_CASE("complexity classes") {
    SUBCASE("exact binning by integer arithmetic") {
        CHECK(complexity_class(0, 20) == 0);
        CHECK(complexity_class(20, 20) == 11);
        CHECK(complexity_class(19, 20) == 10);  // 0.95 lands in (90-100)
        CHECK(complexity_class(1, 10) == 1);    // 0.1 closes the (0-10] bin
        CHECK(complexity_class(2, 10) == 2);
        CHECK(complexity_class(9, 10) == 9);    // 0.9 closes (80-90]
        CHECK(complexity_class(1, 20) == 1);    // 0.05 in (0-10]
    }
    SUBCASE("labels") {
        CHECK(std::string(kComplexityLabels[0]) == "0%");
        CHECK(std::string(kComplexityLabels[10]) == "(90-100)");
        CHECK(std::string(kComplexityLabels[11]) == "100%");
    }
    SUBCASE("unanimous agreement fills the 100% class") {
        std::vector<std::vector<std::uint8_t>> flags(3, std::vector<std::uint8_t>(4, 1));
        const auto t = complexity_table(flags);
        CHECK(t.count[11] == 4);
        for (int k = 0; k < 3; ++k) CHECK(*t.accuracy[k][11] == 100.0);
    }
    SUBCASE("unanimous failure fills the 0% class with zero accuracy") {
        std::vector<std::vector<std::uint8_t>> flags(4, std::vector<std::uint8_t>(5, 0));
        const auto t = complexity_table(flags);
        CHECK(t.count[0] == 5);
        for (int k = 0; k < 4; ++k) CHECK(*t.accuracy[k][0] == 0.0);
    }
    SUBCASE("mixed consensus splits the classes as expected") {
        // patient 0: 19/20 correct -> (90-100); patient 1: all correct -> 100%
        std::vector<std::vector<std::uint8_t>> flags(20, std::vector<std::uint8_t>(2, 1));
        flags[7][0] = 0;
        const auto t = complexity_table(flags);
        CHECK(t.count[10] == 1);
        CHECK(t.count[11] == 1);
        CHECK(t.class_of[0] == 10);
        CHECK(*t.accuracy[7][10] == 0.0);
        CHECK(*t.accuracy[6][10] == 100.0);
    }
}

TEST_SUITE_END();
