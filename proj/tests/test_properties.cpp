// Randomized invariants that span several modules.

#include "netdetect/detection.hpp"
#include "netdetect/exponents.hpp"
#include "netdetect/learning.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace netdetect;

namespace {

/// Convex mix of the identity, a random n-cycle and random permutations: doubly stochastic,
/// irreducible and aperiodic.
Eigen::MatrixXd random_doubly_stochastic(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const auto nn = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd w = u(rng) * Eigen::MatrixXd::Identity(nn, nn);
    std::shuffle(order.begin(), order.end(), rng);
    const double cycle = u(rng);
    for (std::size_t k = 0; k < n; ++k)
        w(static_cast<Eigen::Index>(order[k]), static_cast<Eigen::Index>(order[(k + 1) % n])) += cycle;
    for (int p = 0; p < 2; ++p) {
        std::shuffle(order.begin(), order.end(), rng);
        const double a = u(rng);
        for (std::size_t k = 0; k < n; ++k) w(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(order[k])) += a;
    }
    return w / w.row(0).sum();
}

Vector random_weights(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.1, 5.0);
    Vector r(n);
    for (auto& v : r) v = u(rng);
    return r;
}

}  // namespace

TEST_CASE("stationary law and spectrum of random ergodic chains") {
    std::mt19937_64 rng(101);
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = 2 + static_cast<std::size_t>(k % 7);
        const Network net = analyze(WeightMatrix(oracle::random_ergodic(n, rng)));
        const auto& p = net.profile;
        REQUIRE(p.irreducible);
        REQUIRE(p.aperiodic);
        double sum = 0.0;
        for (double v : p.pi) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
        Vector moved(n);
        net.weights.left_multiply(p.pi, moved);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(moved[i] - p.pi[i]) <= 1e-10);
        CHECK(p.rho >= 0.0);
        CHECK(p.rho < 1.0);
        CHECK(p.rho == doctest::Approx(oracle::eigen_moduli(net.weights.dense())[1]).epsilon(1e-8));
    }
}

TEST_CASE("row deviation contracts by rho in the pi-weighted norm") {
    std::mt19937_64 rng(202);
    for (int k = 0; k < 100; ++k) {
        const std::size_t n = 2 + static_cast<std::size_t>(k % 5);
        const Network net = analyze(WeightMatrix(oracle::random_reversible(n, rng)));
        const auto& pi = net.profile.pi;
        for (std::size_t i = 0; i < n; ++i) {
            Vector row(n, 0.0), next(n);
            row[i] = 1.0;
            auto norm = [&] {
                double acc = 0.0;
                for (std::size_t j = 0; j < n; ++j) acc += (row[j] - pi[j]) * (row[j] - pi[j]) / pi[j];
                return std::sqrt(acc);
            };
            double before = norm();
            for (int t = 0; t < 50; ++t) {
                net.weights.left_multiply(row, next);
                row.swap(next);
                const double after = norm();
                CHECK(after <= net.profile.rho * before * (1 + 1e-9) + 1e-14);
                before = after;
            }
        }
    }
}

TEST_CASE("weighted l1 deviation can grow relative to rho between rounds") {
    std::mt19937_64 rng(5);
    bool exceeded = false;
    for (int k = 0; k < 200 && !exceeded; ++k) {
        const Network net = analyze(WeightMatrix(oracle::random_reversible(2 + static_cast<std::size_t>(k % 5), rng)));
        const Vector r = random_weights(net.size(), rng);
        for (std::size_t i = 0; i < net.size(); ++i)
            for (std::size_t t = 6; t < 30; ++t) {
                const double now = deviation_bound(net, i, t, r).exact;
                const double next = deviation_bound(net, i, t + 1, r).exact;
                if (now > 1e-8 && next > 1.01 * net.profile.rho * now) exceeded = true;
            }
    }
    CHECK(exceeded);
}

TEST_CASE("deviation bound with the classical factor dominates the exact deviation") {
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int k = 0; k < 60; ++k) {
        const std::size_t n = 2 + static_cast<std::size_t>(k % 5);
        const Network net = analyze(WeightMatrix(oracle::random_reversible(n, rng)));
        Vector r(n);
        for (auto& v : r) v = u(rng);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t t = 0; t <= 30; ++t) {
                const auto d = deviation_bound(net, i, t, r);
                CHECK(d.exact <= d.bound * (1 + 1e-12) + 1e-14);
            }
    }
}

TEST_CASE("decentralization never beats the centralized exponent") {
    std::mt19937_64 rng(404);
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = 2 + static_cast<std::size_t>(k % 5);
        const Network net = analyze(WeightMatrix(oracle::random_ergodic(n, rng)));
        const auto inst = oracle::random_discrete_model(n, rng);
        const Vector r = random_weights(n, rng);
        const double optimal = exponent_optimal(inst.model);
        const auto general = exponent_general(inst.model, net, r);
        CHECK(general.value <= optimal + 1e-9);
        CHECK(exponent_bayes(inst.model).value <= optimal + 1e-12);

        // Scaling r rescales lambda* and leaves the exponent alone.
        const double c = 0.1 + static_cast<double>(k % 9);
        Vector scaled(r);
        for (auto& v : scaled) v *= c;
        const auto rescaled = exponent_general(inst.model, net, scaled);
        CHECK(std::abs(rescaled.value - general.value) <= 1e-9);
        CHECK(rescaled.lambda_star * c == doctest::Approx(general.lambda_star).epsilon(1e-6));
    }
}

TEST_CASE("doubly stochastic networks need no reweighting") {
    std::mt19937_64 rng(505);
    for (int k = 0; k < 50; ++k) {
        const std::size_t n = 2 + static_cast<std::size_t>(k % 6);
        const Network net = analyze(WeightMatrix(random_doubly_stochastic(n, rng)));
        REQUIRE(net.weights.is_doubly_stochastic(1e-12));
        const auto inst = oracle::random_discrete_model(n, rng);
        CHECK(std::abs(exponent_general(inst.model, net, Vector(n, 1.0)).value - exponent_optimal(inst.model)) <= 1e-8);
    }
}

TEST_CASE("modified rule is linear in the geometric weights") {
    std::mt19937_64 rng(606);
    const Network net = analyze(WeightMatrix(oracle::random_ergodic(5, rng)));
    const auto inst = oracle::random_discrete_model(5, rng);
    const Vector r = random_weights(5, rng);
    Vector doubled(r);
    for (auto& v : doubled) v *= 2.0;
    auto a = LearningState::zeros(5), b = LearningState::zeros(5);
    const QuantizerConfig exact;
    for (int t = 0; t < 30; ++t) {
        Vector obs(5);
        for (std::size_t i = 0; i < 5; ++i) obs[i] = inst.model.draw(i, 1, rng);
        step_modified(a, net.weights, r, obs, inst.model, exact);
        step_modified(b, net.weights, doubled, obs, inst.model, exact);
        for (std::size_t i = 0; i < 5; ++i) CHECK(b.ell[i] == doctest::Approx(2.0 * a.ell[i]).epsilon(1e-12));
    }
}

TEST_CASE("at most one hypothesis passes antisymmetric-dominating thresholds") {
    std::mt19937_64 rng(707);
    std::normal_distribution<double> g(0.0, 2.0);
    std::uniform_real_distribution<double> slack(0.0, 1.0);
    for (int k = 0; k < 2000; ++k) {
        const std::size_t m = 2 + static_cast<std::size_t>(k % 4);
        std::vector<Vector> thresholds(m, Vector(m, 0.0));
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = a + 1; b < m; ++b) {
                thresholds[a][b] = g(rng);
                thresholds[b][a] = -thresholds[a][b] + slack(rng);
            }
        Vector beliefs(m);
        for (auto& v : beliefs) v = g(rng);
        std::size_t passing = 0;
        for (std::size_t a = 0; a < m; ++a) {
            bool ok = true;
            for (std::size_t b = 0; b < m; ++b)
                if (b != a && beliefs[a] - beliefs[b] < thresholds[a][b]) ok = false;
            passing += ok ? 1 : 0;
        }
        CHECK(passing <= 1);
        const auto pick = mary_decide_with_rejection(beliefs, thresholds);
        CHECK(pick.has_value() == (passing == 1));
    }
}
