#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hedgefit/aggregator.hpp"
#include "hedgefit/errors.hpp"
#include "test_support.hpp"

using namespace hedgefit;

TEST_CASE("risk measure") {
    const auto model = testsup::constant_model();
    SUBCASE("zero objective gives zero risk") {
        const auto data = testsup::single_target(5.0);
        CHECK(risk_measure(ParamVector({5.0}), model, DataView(data), 0.01) ==
              0.0);
    }
    SUBCASE("gamma=0.01 at objective 100 gives 1 - 1/e") {
        // theta - y = 10 so the quadratic objective is exactly 100
        const auto data = testsup::single_target(0.0);
        const double r =
            risk_measure(ParamVector({10.0}), model, DataView(data), 0.01);
        CHECK(r == doctest::Approx(0.6321205588285577).epsilon(1e-12));
    }
    SUBCASE("huge objective saturates strictly below one") {
        const auto data = testsup::single_target(0.0);
        const double r =
            risk_measure(ParamVector({1e6}), model, DataView(data), 0.01);
        CHECK(r < 1.0);
        CHECK(r > 0.999);
    }
    SUBCASE("strictly increasing in the objective") {
        const auto data = testsup::single_target(0.0);
        double prev = -1.0;
        for (double theta : {0.5, 1.0, 2.0, 5.0, 25.0}) {
            const double r =
                risk_measure(ParamVector({theta}), model, DataView(data), 0.01);
            CHECK(r > prev);
            prev = r;
        }
    }
}

TEST_CASE("weight updates") {
    SUBCASE("beta^r factor at the boundary") {
        // omega = 0.5, r -> 1, beta = 0.5 gives omega' -> 0.25
        MixingState state(std::vector<double>{0.5, 0.5}, 0.5, 0.01);
        const double almost_one = std::nextafter(1.0, 0.0);
        state.update({0.0, almost_one});
        const auto w = state.weights();
        CHECK(w[0] == doctest::Approx(0.5));
        CHECK(w[1] == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("zero risks leave weights unchanged") {
        MixingState state(3, 0.5, 0.01);
        const auto before = state.weights();
        state.update({0.0, 0.0, 0.0});
        CHECK(state.weights() == before);
    }
    SUBCASE("risks outside [0,1) are rejected") {
        MixingState state(2, 0.5, 0.01);
        CHECK_THROWS_AS(state.update({0.0, 1.0}), ConfigError);
        CHECK_THROWS_AS(state.update({-0.1, 0.5}), ConfigError);
        CHECK_THROWS_AS(state.update({0.0, std::nan("")}), ConfigError);
    }
    SUBCASE("weights are non-increasing in every coordinate") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        MixingState state(4, 0.3, 0.01);
        auto prev = state.log_weights();
        for (int n = 0; n < 200; ++n) {
            state.update({u(rng) * 0.999, u(rng) * 0.999, u(rng) * 0.999,
                          u(rng) * 0.999});
            const auto& cur = state.log_weights();
            for (std::size_t k = 0; k < 4; ++k) CHECK(cur[k] <= prev[k]);
            prev = cur;
        }
        CHECK(state.worst_contraction_slack() >= -1e-12);
    }
}

TEST_CASE("mixing distribution") {
    SUBCASE("direct normalization") {
        const auto pi = mixing_distribution({1.0, 1.0, 2.0});
        CHECK(pi == std::vector<double>{0.25, 0.25, 0.5});
    }
    SUBCASE("uniform weights give 1/K") {
        const auto pi = mixing_distribution({0.2, 0.2, 0.2, 0.2});
        for (double p : pi) CHECK(p == doctest::Approx(0.25));
    }
    SUBCASE("hand computation") {
        const auto pi = mixing_distribution({0.5, 0.25});
        CHECK(pi[0] == doctest::Approx(2.0 / 3.0));
        CHECK(pi[1] == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("degenerate inputs rejected") {
        CHECK_THROWS_AS(mixing_distribution({0.0, 0.0}), ConfigError);
        CHECK_THROWS_AS(mixing_distribution({-1.0, 2.0}), ConfigError);
    }
    SUBCASE("simplex preservation in the running state") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(0.0, 0.999);
        MixingState state(6, 0.5, 0.01);
        for (int n = 0; n < 500; ++n) {
            std::vector<double> risks(6);
            for (auto& r : risks) r = u(rng);
            state.update(risks);
            const auto pi = state.mixing();
            double sum = 0.0;
            for (double p : pi) {
                CHECK(p > 0.0);
                sum += p;
            }
            CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("consensus estimate") {
    auto experts = [](std::vector<std::vector<double>> thetas) {
        std::vector<ExpertState> out;
        for (std::size_t k = 0; k < thetas.size(); ++k)
            out.emplace_back(k, ParamVector(std::move(thetas[k])), 0);
        return out;
    };
    SUBCASE("single expert") {
        const auto states = experts({{1.5, -2.0}});
        CHECK(consensus(states, {1.0}) == ParamVector({1.5, -2.0}));
    }
    SUBCASE("midpoint") {
        const auto states = experts({{0.0}, {2.0}});
        CHECK(consensus(states, {0.5, 0.5})[0] == 1.0);
    }
    SUBCASE("weighted average") {
        const auto states = experts({{1.0, 0.0}, {4.0, 3.0}});
        const auto bar = consensus(states, {2.0 / 3.0, 1.0 / 3.0});
        CHECK(bar[0] == doctest::Approx(2.0));
        CHECK(bar[1] == doctest::Approx(1.0));
    }
    SUBCASE("stays in the coordinate-wise hull") {
        std::mt19937_64 rng(23);
        std::uniform_real_distribution<double> u(-10.0, 10.0);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<std::vector<double>> thetas(4);
            for (auto& t : thetas) t = {u(rng), u(rng), u(rng)};
            std::vector<double> w(4);
            for (auto& x : w) x = 0.01 + std::abs(u(rng));
            const auto pi = mixing_distribution(w);
            const auto states = experts(std::move(thetas));
            const auto bar = consensus(states, pi);
            for (std::size_t j = 0; j < 3; ++j) {
                double lo = 1e18, hi = -1e18;
                for (const auto& s : states) {
                    lo = std::min(lo, s.theta[j]);
                    hi = std::max(hi, s.theta[j]);
                }
                CHECK(bar[j] >= lo - 1e-12);
                CHECK(bar[j] <= hi + 1e-12);
            }
        }
    }
    SUBCASE("size mismatch rejected") {
        const auto states = experts({{1.0}, {2.0}});
        CHECK_THROWS_AS(consensus(states, {1.0}), ConfigError);
    }
}

TEST_CASE("mixture loss") {
    CHECK(mixture_loss({0.5, 0.5}, {0.0, 0.0}) == 0.0);
    CHECK(mixture_loss({0.5, 0.5}, {0.0, std::nextafter(1.0, 0.0)}) ==
          doctest::Approx(0.5));
    // convex combination of a constant risk is that risk
    CHECK(mixture_loss({0.25, 0.25, 0.25, 0.25}, {0.3, 0.3, 0.3, 0.3}) ==
          doctest::Approx(0.3));
    CHECK(total_loss({0.1, 0.2, 0.3}) == doctest::Approx(0.6));
}

TEST_CASE("hedge bound") {
    SUBCASE("hand-computed two-expert single-step case") {
        // omega_0 = (1/2, 1/2), beta = 1/2, risks (0, ~1):
        //   L = 1/2, sum omega_1 = 3/4, bound = -ln(3/4)/(1/2) ~ 0.5754
        MixingState state(2, 0.5, 0.01);
        state.update({0.0, std::nextafter(1.0, 0.0)});
        const auto report = state.bound_report();
        CHECK(report.total_loss == doctest::Approx(0.5));
        CHECK(report.bound ==
              doctest::Approx(-std::log(0.75) / 0.5).epsilon(1e-9));
        CHECK(report.satisfied);
    }
    SUBCASE("all-zero risks give equality at zero") {
        MixingState state(3, 0.7, 0.01);
        for (int n = 0; n < 20; ++n) state.update({0.0, 0.0, 0.0});
        const auto report = state.bound_report();
        CHECK(report.total_loss == 0.0);
        CHECK(report.bound == doctest::Approx(0.0));
        CHECK(report.satisfied);
    }
    SUBCASE("holds on randomized adversarial sequences") {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int run = 0; run < 300; ++run) {
            const std::size_t experts = 1 + rng() % 8;
            const std::size_t steps = 1 + rng() % 50;
            const double beta = 0.05 + 0.9 * u(rng);
            MixingState state(experts, beta, 0.01);
            for (std::size_t n = 0; n < steps; ++n) {
                std::vector<double> risks(experts);
                for (auto& r : risks) r = u(rng) * 0.9999;
                state.update(risks);
            }
            const auto report = state.bound_report();
            CHECK(report.satisfied);
            CHECK(report.slack >= -1e-9);
        }
    }
    SUBCASE("pairwise ratio law") {
        // pi'(k)/pi'(j) = (pi(k)/pi(j)) * beta^(r_k - r_j)
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(0.0, 0.999);
        const double beta = 0.4;
        MixingState state(3, beta, 0.01);
        for (int n = 0; n < 50; ++n) {
            const auto before = state.mixing();
            std::vector<double> risks{u(rng), u(rng), u(rng)};
            state.update(risks);
            const auto after = state.mixing();
            for (std::size_t k = 0; k < 3; ++k) {
                for (std::size_t j = 0; j < 3; ++j) {
                    const double expected = (before[k] / before[j]) *
                                            std::pow(beta, risks[k] - risks[j]);
                    CHECK(after[k] / after[j] ==
                          doctest::Approx(expected).epsilon(1e-10));
                }
            }
        }
    }
    SUBCASE("label symmetry") {
        MixingState a(3, 0.5, 0.01);
        MixingState b(3, 0.5, 0.01);
        const std::vector<double> risks{0.1, 0.5, 0.9};
        const std::vector<double> permuted{0.9, 0.1, 0.5};  // k -> (k+1)%3
        for (int n = 0; n < 5; ++n) {
            a.update(risks);
            b.update(permuted);
        }
        const auto pa = a.mixing();
        const auto pb = b.mixing();
        CHECK(pa[0] == doctest::Approx(pb[1]));
        CHECK(pa[1] == doctest::Approx(pb[2]));
        CHECK(pa[2] == doctest::Approx(pb[0]));
    }
}

TEST_CASE("custom initial weights") {
    SUBCASE("must sum to one") {
        CHECK_THROWS_AS(MixingState(std::vector<double>{0.5, 0.6}, 0.5, 0.01),
                        ConfigError);
        CHECK_THROWS_AS(MixingState(std::vector<double>{-0.5, 1.5}, 0.5, 0.01),
                        ConfigError);
    }
    SUBCASE("non-uniform start biases the mixture") {
        MixingState state(std::vector<double>{0.75, 0.25}, 0.5, 0.01);
        const auto pi = state.mixing();
        CHECK(pi[0] == doctest::Approx(0.75));
        CHECK(pi[1] == doctest::Approx(0.25));
    }
    SUBCASE("a zero weight stays out of the mixture") {
        MixingState state(std::vector<double>{1.0, 0.0}, 0.5, 0.01);
        state.update({0.3, 0.3});
        const auto pi = state.mixing();
        CHECK(pi[0] == doctest::Approx(1.0));
        CHECK(pi[1] == 0.0);
    }
}

TEST_CASE("long runs stay numerically sound in log space") {
    // 1e5 updates with risk ~0.5 would underflow plain weights (beta^5e4);
    // the log-space state keeps the bound finite and satisfied
    MixingState state(2, 0.5, 0.01);
    for (int n = 0; n < 100000; ++n) state.update({0.4, 0.6});
    const auto report = state.bound_report();
    CHECK(std::isfinite(report.bound));
    CHECK(report.satisfied);
    const auto pi = state.mixing();
    CHECK(pi[0] + pi[1] == doctest::Approx(1.0));
    CHECK(pi[0] > pi[1]);  // lower-risk expert dominates
}
