#include "netdetect/errors.hpp"
#include "netdetect/exponents.hpp"
#include "netdetect/detection.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace netdetect;

namespace {

WeightMatrix two_node() { return WeightMatrix::from_rows({{0.8, 0.2}, {0.5, 0.5}}); }

NetworkModel bern(std::size_t n, double p0, double p1) {
    return NetworkModel::homogeneous(n, NodeDistribution::bernoulli(p0), NodeDistribution::bernoulli(p1));
}

NetworkModel symmetric_gaussian(std::size_t n, double mean, double var) {
    return NetworkModel::homogeneous(n, NodeDistribution::gaussian(-mean, var), NodeDistribution::gaussian(mean, var));
}

/// (1 - a) J/4 + a L where L is the lazy 4-ring; symmetric, rho = a/2.
Network lazy_ring_family(double a) {
    Eigen::MatrixXd lazy = Eigen::MatrixXd::Zero(4, 4);
    for (int i = 0; i < 4; ++i) {
        lazy(i, i) = 0.5;
        lazy(i, (i + 1) % 4) += 0.25;
        lazy(i, (i + 3) % 4) += 0.25;
    }
    return analyze(WeightMatrix((1.0 - a) * Eigen::MatrixXd::Constant(4, 4, 0.25) + a * lazy));
}

const double kBer78 = oracle::kl_discrete({0.3, 0.7}, {0.2, 0.8});

}  // namespace

TEST_CASE("optimal exponent") {
    CHECK(exponent_optimal(bern(2, 0.5, 0.6)) == doctest::Approx(2.0 * oracle::kl_discrete({0.5, 0.5}, {0.4, 0.6})).epsilon(1e-13));
    CHECK(exponent_optimal(bern(2, 0.5, 0.6)) == doctest::Approx(0.0408220).epsilon(1e-6));
    CHECK(exponent_optimal(bern(3, 0.4, 0.4)) == 0.0);

    const auto mixed = NetworkModel::binary({{NodeDistribution::bernoulli(0.3), NodeDistribution::bernoulli(0.45)},
                                             {NodeDistribution::gaussian(0.0, 1.5), NodeDistribution::gaussian(0.7, 2.5)}});
    const double expected = oracle::kl_discrete({0.7, 0.3}, {0.55, 0.45}) + oracle::kl_gaussian_quadrature(0.0, 1.5, 0.7, 2.5);
    CHECK(exponent_optimal(mixed) == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("general exponent") {
    SUBCASE("r = c/pi recovers the optimum with lambda* = 1/c") {
        std::mt19937_64 rng(4);
        for (int k = 0; k < 20; ++k) {
            const std::size_t n = 2 + static_cast<std::size_t>(k % 5);
            const Network net = analyze(WeightMatrix(oracle::random_ergodic(n, rng)));
            const auto inst = oracle::random_discrete_model(n, rng);
            for (double c : {1.0, 0.2, 7.0}) {
                const auto res = exponent_general(inst.model, net, inverse_weights(net.profile.pi, c));
                CHECK(res.value == doctest::Approx(exponent_optimal(inst.model)).epsilon(1e-10));
                CHECK(std::abs(res.lambda_star - 1.0 / c) <= 1e-6 / c);
            }
        }
    }
    SUBCASE("unit weights on the imbalanced two-node network against a lambda grid") {
        const Network net = analyze(two_node());
        const auto model = bern(2, 0.7, 0.8);
        const Vector ones{1.0, 1.0};
        const auto res = exponent_general(model, net, ones);
        const std::vector<Vector> p0(2, Vector{0.3, 0.7}), p1(2, Vector{0.2, 0.8});
        const auto grid = oracle::grid_max(
            [&](double l) { return oracle::general_objective(p0, p1, {5.0 / 7.0, 2.0 / 7.0}, ones, l); }, 0.0, 10.0, 1e-4);
        CHECK(res.value == doctest::Approx(grid.value).epsilon(1e-6));
        CHECK(std::abs(res.lambda_star - grid.argmax) < 2e-4);
        CHECK(res.value < 2.0 * kBer78 - 1e-6);
    }
    SUBCASE("identical hypotheses give zero") {
        const auto res = exponent_general(bern(2, 0.6, 0.6), analyze(two_node()), Vector{1.0, 2.0});
        CHECK(res.value == 0.0);
    }
    SUBCASE("objective matches the probability-vector form") {
        std::mt19937_64 rng(12);
        const auto inst = oracle::random_discrete_model(4, rng);
        const auto pi = oracle::random_simplex(4, rng);
        const Vector r{0.5, 1.5, 2.0, 3.0};
        for (double l : {0.0, 0.3, 1.0, 4.0})
            CHECK(general_exponent_objective(inst.model, pi, r, l) ==
                  doctest::Approx(oracle::general_objective(inst.p0, inst.p1, pi, r, l)).epsilon(1e-12));
    }
    SUBCASE("refuses periodic and reducible chains") {
        const auto model = bern(4, 0.5, 0.6);
        const Network ring = analyze(uniform_weights(bidirectional_ring(4, false)));
        CHECK_THROWS_AS(exponent_general(model, ring, Vector(4, 1.0)), AssumptionViolated);
        const Network split = analyze(WeightMatrix::from_rows({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0.5, 0.5}, {0, 0, 0.5, 0.5}}));
        CHECK_THROWS_AS(exponent_general(model, split, Vector(4, 1.0)), ReducibleChainError);
        CHECK_THROWS_AS(exponent_general(model, analyze(two_node()), Vector(4, 1.0)), InvalidArgument);
    }
}

TEST_CASE("bayes exponent") {
    const auto res = exponent_bayes(bern(3, 0.3, 0.7));
    CHECK(res.theta_star == doctest::Approx(0.5).epsilon(1e-6));
    const auto grid = oracle::grid_max([](double s) { return -3.0 * std::log(oracle::affinity_discrete({0.7, 0.3}, {0.3, 0.7}, s)); },
                                       0.0, 1.0, 1e-5);
    CHECK(res.value == doctest::Approx(grid.value).epsilon(1e-9));
    CHECK(res.value <= exponent_optimal(bern(3, 0.3, 0.7)));
}

TEST_CASE("decentralization constants on the two-node example") {
    const Network net = analyze(two_node());
    const auto model = bern(2, 0.7, 0.8);
    const double rho = 0.3;
    const double inv_pi = 7.0 / 5.0 + 7.0 / 2.0;
    const double bound = std::log(1.5);
    const double factors[2] = {(2.0 / 7.0) / (5.0 / 7.0), (5.0 / 7.0) / (2.0 / 7.0)};
    const double stated[2] = {(5.0 / 7.0) / (2.0 / 7.0), (2.0 / 7.0) / (5.0 / 7.0)};

    const auto ch = oracle::grid_max(
        [](double s) { return -2.0 * std::log(oracle::affinity_discrete({0.3, 0.7}, {0.2, 0.8}, s)); }, 0.0, 1.0, 1e-6);
    const double tilt = std::max(ch.argmax, 1.0 - ch.argmax);

    for (std::size_t i = 0; i < 2; ++i) {
        const double cnp = rho / (1.0 - rho) * std::sqrt(factors[i]) *
                           (std::sqrt(kBer78 * kBer78 * inv_pi) + std::sqrt(bound * bound * inv_pi));
        CHECK(cnp_constant(model, net, i) == doctest::Approx(cnp).epsilon(1e-10));
        CHECK(delay(model, net, i) == doctest::Approx(cnp / (2.0 * kBer78)).epsilon(1e-10));
        const double cnp_stated = rho / (1.0 - rho) * std::sqrt(stated[i]) *
                                  (std::sqrt(kBer78 * kBer78 * inv_pi) + std::sqrt(bound * bound * inv_pi));
        CHECK(cnp_constant(model, net, i, DeviationFactor::stated) == doctest::Approx(cnp_stated).epsilon(1e-10));

        const double cb = tilt * rho / (1.0 - rho) * std::sqrt(factors[i] * bound * bound * inv_pi);
        CHECK(cb_constant(model, net, i) == doctest::Approx(cb).epsilon(1e-5));

        const double g = 2.0 * (0.09 / 0.91) * factors[i] * inv_pi;
        CHECK(gaussian_bound_constant(symmetric_gaussian(2, 1.0, 1.0), net, i) == doctest::Approx(g).epsilon(1e-10));
    }
    // Symmetric models tilt halfway.
    const auto sym = bern(2, 0.3, 0.7);
    CHECK(cb_constant(sym, net, 0) ==
          doctest::Approx(0.5 * rho / (1.0 - rho) * std::sqrt(factors[0] * std::pow(std::log(7.0 / 3.0), 2) * inv_pi)).epsilon(1e-6));
}

TEST_CASE("constants vanish at rho = 0 and grow with rho") {
    const auto model = bern(4, 0.55, 0.7);
    const auto gauss = symmetric_gaussian(4, 0.8, 1.3);
    const Network avg = lazy_ring_family(0.0);
    CHECK(avg.profile.rho == 0.0);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(cnp_constant(model, avg, i) == 0.0);
        CHECK(cb_constant(model, avg, i) == 0.0);
        CHECK(delay(model, avg, i) == 0.0);
        CHECK(gaussian_bound_constant(gauss, avg, i) == 0.0);
    }
    double last[3] = {0.0, 0.0, 0.0};
    for (double a = 0.1; a <= 1.0 + 1e-12; a += 0.1) {
        const Network net = lazy_ring_family(a);
        CHECK(net.profile.rho == doctest::Approx(a / 2.0).epsilon(1e-12));
        const double now[3] = {cnp_constant(model, net, 1), cb_constant(model, net, 1), gaussian_bound_constant(gauss, net, 1)};
        for (int k = 0; k < 3; ++k) {
            CHECK(now[k] > last[k]);
            last[k] = now[k];
        }
    }
    // Equal total divergence in one round of delay.
    const Network net = lazy_ring_family(0.6);
    CHECK(delay(model, net, 2) * exponent_optimal(model) == doctest::Approx(cnp_constant(model, net, 2)).epsilon(1e-14));
}

TEST_CASE("constants enforce their assumptions") {
    const Network net = analyze(two_node());
    CHECK_THROWS_AS(cnp_constant(symmetric_gaussian(2, 1.0, 1.0), net, 0), AssumptionViolated);
    CHECK_THROWS_AS(cb_constant(symmetric_gaussian(2, 1.0, 1.0), net, 0), AssumptionViolated);
    CHECK_THROWS_AS(delay(bern(2, 0.4, 0.4), net, 0), InvalidArgument);
    CHECK_THROWS_AS(gaussian_bound_constant(bern(2, 0.4, 0.6), net, 0), InvalidArgument);
    const Network single = analyze(WeightMatrix::from_rows({{1.0}}));
    CHECK_THROWS_AS(gaussian_bound_constant(symmetric_gaussian(1, 1.0, 1.0), single, 0), InvalidArgument);

    // A non-reversible 3-cycle with self-loops.
    const Network cyc = analyze(WeightMatrix::from_rows({{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}}));
    REQUIRE_FALSE(cyc.profile.reversible);
    CHECK_THROWS_AS(cnp_constant(bern(3, 0.4, 0.6), cyc, 0), AssumptionViolated);
}

TEST_CASE("periodic exponent") {
    const auto model = bern(3, 0.4, 0.65);
    const double total = exponent_optimal(model);
    CHECK(periodic_exponent(model, 1) == total);
    CHECK(periodic_exponent(model, 2) == doctest::Approx(total / 2.0));
    CHECK(periodic_exponent(model, 3) == doctest::Approx(total / 3.0));
    CHECK_THROWS_AS(periodic_exponent(model, 0), InvalidArgument);

    const auto report = exponent_report(bern(4, 0.4, 0.65), analyze(uniform_weights(bidirectional_ring(4, false))), Vector(4, 1.0));
    CHECK_FALSE(report.general.has_value());
    CHECK(report.period == 2);
    REQUIRE(report.periodic.has_value());
    CHECK(*report.periodic == doctest::Approx(exponent_optimal(bern(4, 0.4, 0.65)) / 2.0));
}

TEST_CASE("centralized strassen reference") {
    const Network single = analyze(WeightMatrix::from_rows({{1.0}}));
    SUBCASE("single gaussian node against the exact tail") {
        const auto model = symmetric_gaussian(1, 1.0, 1.0);
        for (double eps : {0.05, 0.2, 0.5}) {
            const double exact = gaussian_np_exact(model, single, 100, 0, eps).beta;
            const double approx = strassen_centralized_beta(model, 100, eps);
            CHECK(std::abs(approx / exact - 1.0) < 0.10);
        }
    }
    SUBCASE("epsilon = 1/2 drops the quantile terms") {
        const auto model = bern(2, 0.5, 0.6);
        const auto m = llr_moments(model);
        const double t = 50.0;
        const double expected = m.mean * t - 0.5 * std::log(t) - 0.5 * std::log(2.0 * M_PI) - 0.5 * std::log(m.variance) -
                                m.third / (6.0 * m.variance);
        CHECK(strassen_centralized_log_beta(model, 50, 0.5) == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("per-round decay approaches the total divergence") {
        const auto model = symmetric_gaussian(2, 0.5, 1.0);
        const double total = exponent_optimal(model);
        const double rate = -strassen_centralized_log_beta(model, 1000, 0.5) / 1000.0;
        CHECK(std::abs(rate / total - 1.0) < 0.02);
        double last = 1.0;
        for (std::size_t t : {10u, 100u, 1000u, 10000u}) {
            const double gap = std::abs(-strassen_centralized_log_beta(model, t, 0.05) / static_cast<double>(t) / total - 1.0);
            CHECK(gap < last);
            last = gap;
        }
    }
    SUBCASE("moments of the summed llr") {
        const auto model = NetworkModel::binary({{NodeDistribution::bernoulli(0.3), NodeDistribution::bernoulli(0.6)},
                                                 {NodeDistribution::categorical({0.2, 0.5, 0.3}), NodeDistribution::categorical({0.4, 0.4, 0.2})}});
        const std::vector<Vector> p0{{0.7, 0.3}, {0.2, 0.5, 0.3}}, p1{{0.4, 0.6}, {0.4, 0.4, 0.2}};
        double mean = 0.0, var = 0.0, third = 0.0;
        for (std::size_t j = 0; j < 2; ++j) {
            double m = 0.0, m2 = 0.0, m3 = 0.0;
            for (std::size_t k = 0; k < p0[j].size(); ++k) m += p0[j][k] * std::log(p1[j][k] / p0[j][k]);
            for (std::size_t k = 0; k < p0[j].size(); ++k) {
                const double d = std::log(p1[j][k] / p0[j][k]) - m;
                m2 += p0[j][k] * d * d;
                m3 += p0[j][k] * d * d * d;
            }
            mean += m;
            var += m2;
            third += m3;
        }
        const auto got = llr_moments(model);
        CHECK(got.mean == doctest::Approx(mean).epsilon(1e-13));
        CHECK(got.variance == doctest::Approx(var).epsilon(1e-13));
        CHECK(got.third == doctest::Approx(third).epsilon(1e-12));
        CHECK(got.mean == doctest::Approx(-exponent_optimal(model)).epsilon(1e-13));
    }
}

TEST_CASE("empirical exponent fits") {
    Vector times, exact, flat;
    for (int t = 1; t <= 100; ++t) {
        times.push_back(t);
        exact.push_back(std::exp(-0.037 * t));
        flat.push_back(0.2);
    }
    const auto fit = empirical_exponent(times, exact, 50);
    CHECK(fit.slope == doctest::Approx(0.037).epsilon(1e-12));
    CHECK(fit.points == 50);
    CHECK(fit.r_squared == doctest::Approx(1.0));
    CHECK(empirical_exponent(times, flat, 30).slope == doctest::Approx(0.0).epsilon(1e-15));

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> noise(0.9, 1.1);
    for (std::size_t window : {20u, 40u, 100u}) {
        Vector noisy(exact);
        for (auto& p : noisy) p *= noise(rng);
        const auto f = empirical_exponent(times, noisy, window);
        CHECK(std::abs(f.slope / 0.037 - 1.0) < 0.05);
        CHECK(f.slope_stderr > 0.0);
    }

    // Zero cells and thin cells are skipped.
    Vector sparse(exact);
    for (std::size_t k = 90; k < 100; ++k) sparse[k] = 0.0;
    CHECK(empirical_exponent(times, sparse, 10).points == 10);
    CHECK(empirical_exponent(times, sparse, 200, 1000, 30.0).points ==
          static_cast<std::size_t>(std::count_if(exact.begin(), exact.begin() + 90, [](double p) { return p * 1000 >= 30.0; })));
    CHECK_THROWS_AS(empirical_exponent(Vector{1, 2}, Vector{0.1, 0.01}, 10), InvalidArgument);
    CHECK_THROWS_AS(empirical_exponent(times, Vector(100, 0.0), 10), InvalidArgument);
}

TEST_CASE("exponent report") {
    const Network net = analyze(two_node());
    const auto report = exponent_report(symmetric_gaussian(2, 1.0, 1.0), net, inverse_weights(net.profile.pi));
    REQUIRE(report.general.has_value());
    CHECK(*report.general == doctest::Approx(report.optimal).epsilon(1e-10));
    CHECK_FALSE(report.cnp[0].has_value());
    CHECK(report.gaussian_bound[0].has_value());
    CHECK(report.bayes <= report.optimal);
    CHECK(report.factor == DeviationFactor::classical);
}
