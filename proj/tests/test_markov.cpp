#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "htq/errors.hpp"
#include "htq/markov.hpp"
#include "htq/numeric.hpp"
#include "htq/rng.hpp"

using namespace htq;

namespace {

FiniteMarkovChain reference_chain() {
    // pi = (5/6, 1/6), lambda = 1/3, second eigenvalue 0.4.
    return build_chain({"OFF", "ON"}, {{0.9, 0.1}, {0.5, 0.5}}, {0, 2});
}

// Independent stationary oracle: long matrix power instead of a linear solve.
std::vector<double> stationary_by_power(const FiniteMarkovChain& c, int iters) {
    int n = c.size();
    std::vector<double> dist(n, 1.0 / n), next(n);
    for (int it = 0; it < iters; ++it) {
        for (int y = 0; y < n; ++y) {
            double s = 0.0;
            for (int x = 0; x < n; ++x) s += dist[x] * c.p(x, y);
            next[y] = s;
        }
        dist.swap(next);
    }
    return dist;
}

}  // namespace

TEST_CASE("build_chain validates input") {
    CHECK_NOTHROW(reference_chain());
    CHECK(reference_chain().a_max() == 2);

    CHECK_THROWS_AS(build_chain({"a", "b"}, {{1, 0}, {0, 1}}, {0, 1}), Reducible);
    CHECK_THROWS_AS(build_chain({"a", "b"}, {{0, 1}, {1, 0}}, {0, 1}), Periodic);
    CHECK_THROWS_AS(build_chain({"a", "b"}, {{0.5, 0.4}, {0.5, 0.5}}, {0, 1}),
                    NonStochasticRow);
    CHECK_THROWS_AS(build_chain({"a", "b"}, {{-0.1, 1.1}, {0.5, 0.5}}, {0, 1}),
                    NonStochasticRow);
    try {
        build_chain({"a", "b", "c"},
                    {{1.0, 0.0, 0.0}, {0.3, 0.2, 0.5}, {0.1, 0.2, 0.7}}, {0, 1, 2});
        CHECK(false);
    } catch (const Reducible& e) {
        CHECK(e.state >= 0);  // names the unreachable state
    }
    // three-cycle has period 3
    try {
        build_chain({"a", "b", "c"}, {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}, {0, 1, 2});
        CHECK(false);
    } catch (const Periodic& e) {
        CHECK(e.period == 3);
    }
}

TEST_CASE("stationary distribution of the reference chain") {
    auto chain = reference_chain();
    auto stat = stationary_distribution(chain);
    CHECK(stat.probabilities[0] == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    CHECK(stat.probabilities[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(stat.mean_emission == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    auto powered = stationary_by_power(chain, 200);
    CHECK(std::abs(powered[0] - stat.probabilities[0]) < 1e-12);

    // identical rows: pi equals the row
    auto iid = build_chain({"x", "y", "z"},
                           {{0.2, 0.5, 0.3}, {0.2, 0.5, 0.3}, {0.2, 0.5, 0.3}},
                           {0, 1, 2});
    auto s2 = stationary_distribution(iid);
    CHECK(s2.probabilities[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(s2.probabilities[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("mixing profile matches direct TV computation") {
    auto chain = reference_chain();
    auto profile = mixing_profile(chain, 20);
    // d(m) = max over starts; the ON start dominates: (5/6) 0.4^m. The OFF
    // start alone gives (1/6) 0.4^m = 0.0667 at m = 1.
    for (int m = 1; m <= 20; ++m)
        CHECK(profile[m - 1] ==
              doctest::Approx((5.0 / 6.0) * std::pow(0.4, m)).epsilon(1e-10));

    auto pi = stationary_distribution(chain).probabilities;
    double tv_off = 0.5 * (std::abs(0.9 - pi[0]) + std::abs(0.1 - pi[1]));
    CHECK(tv_off == doctest::Approx(1.0 / 15.0).epsilon(1e-12));

    auto iid = build_chain({"x", "y"}, {{0.3, 0.7}, {0.3, 0.7}}, {0, 1});
    for (double d : mixing_profile(iid, 10)) CHECK(d < 1e-14);
}

TEST_CASE("envelope fit") {
    SUBCASE("two-state chain: alpha is the second eigenvalue") {
        auto env = fit_mixing_envelope(mixing_profile(reference_chain(), 25));
        CHECK(env.alpha == doctest::Approx(0.4).epsilon(1e-6));
        CHECK(env.c_const == doctest::Approx(5.0 / 6.0).epsilon(1e-6));
        CHECK(!env.exact_mixing);
    }
    SUBCASE("synthetic exponential profile is reproduced") {
        std::vector<double> profile;
        for (int m = 1; m <= 40; ++m) profile.push_back(0.5 * std::pow(0.9, m));
        auto env = fit_mixing_envelope(profile);
        CHECK(env.alpha == doctest::Approx(0.9).epsilon(1e-6));
        CHECK(env.c_const == doctest::Approx(0.5).epsilon(1e-6));
    }
    SUBCASE("iid chain flags exact mixing") {
        auto iid = build_chain({"x", "y"}, {{0.3, 0.7}, {0.3, 0.7}}, {0, 1});
        auto env = fit_mixing_envelope(mixing_profile(iid, 10));
        CHECK(env.exact_mixing);
        CHECK(env.c_const == 1.0);
        CHECK(env.bound(3) == 0.0);
    }
    SUBCASE("non-decaying profile is infeasible") {
        std::vector<double> stuck(20, 1.0);
        CHECK_THROWS_AS(fit_mixing_envelope(stuck), EnvelopeInfeasible);
    }
}

TEST_CASE("autocovariance of the reference chain") {
    auto summary = autocovariance(reference_chain(), 128, 1e-12);
    CHECK(summary.gamma[0] == doctest::Approx(5.0 / 9.0).epsilon(1e-12));
    for (std::size_t t = 1; t < summary.gamma.size(); ++t)
        CHECK(summary.gamma[t] ==
              doctest::Approx((5.0 / 9.0) * std::pow(0.4, static_cast<double>(t)))
                  .epsilon(1e-9));
    CHECK(summary.sigma_sq == doctest::Approx(35.0 / 27.0).epsilon(1e-9));
    CHECK(summary.truncation_tail < 1e-12);
    CHECK(summary.truncation_tail >= 0.0);

    auto prefix = gamma_prefix(reference_chain(), 6);
    REQUIRE(prefix.size() == 7);
    for (int t = 0; t <= 6; ++t)
        CHECK(prefix[t] == doctest::Approx(summary.gamma[t]).epsilon(1e-12));
}

TEST_CASE("autocovariance degenerate cases") {
    auto iid = build_chain({"x", "y"}, {{0.5, 0.5}, {0.5, 0.5}}, {0, 2});
    auto s = autocovariance(iid, 64, 1e-12);
    CHECK(s.sigma_sq == doctest::Approx(1.0).epsilon(1e-12));  // Var = 4*0.25
    for (std::size_t t = 1; t < s.gamma.size(); ++t)
        CHECK(std::abs(s.gamma[t]) < 1e-14);

    auto constant = build_chain({"a", "b"}, {{0.6, 0.4}, {0.3, 0.7}}, {5, 5});
    auto s2 = autocovariance(constant, 64, 1e-12);
    CHECK(std::abs(s2.sigma_sq) < 1e-12);
    for (double g : s2.gamma) CHECK(std::abs(g) < 1e-13);
}

TEST_CASE("sample paths") {
    auto chain = reference_chain();
    auto stat = stationary_distribution(chain);

    SUBCASE("deterministic for a fixed seed") {
        auto a = sample_path(chain, 0, 5000, 42, true);
        auto b = sample_path(chain, 0, 5000, 42, true);
        CHECK(a.emissions == b.emissions);
        CHECK(a.states == b.states);
        auto c = sample_path(chain, 0, 5000, 43);
        CHECK(a.emissions != c.emissions);
    }

    SUBCASE("unknown initial state") {
        CHECK_THROWS_AS(sample_path(chain, 7, 10, 1), UnknownState);
        CHECK_THROWS_AS(chain.state_index("BAD"), UnknownState);
        CHECK(chain.state_index("ON") == 1);
    }

    SUBCASE("mean within 3 standard errors of lambda") {
        const std::int64_t len = 1000000;
        auto path = sample_path(chain, stat.probabilities, len, 7);
        CompSum s;
        for (int e : path.emissions) s.add(e);
        double mean = s.value() / static_cast<double>(len);
        // long-run variance rate sigma^2 = 35/27 governs the SE of the mean
        double se = std::sqrt(35.0 / 27.0 / static_cast<double>(len));
        CHECK(std::abs(mean - stat.mean_emission) < 3.0 * se);
    }

    SUBCASE("lag-1 autocovariance near gamma(1) = 2/9") {
        const std::int64_t len = 1000000;
        auto path = sample_path(chain, stat.probabilities, len + 1, 11);
        double lambda = stat.mean_emission;
        CompSum s;
        for (std::int64_t t = 0; t < len; ++t)
            s.add((path.emissions[t] - lambda) * (path.emissions[t + 1] - lambda));
        double est = s.value() / static_cast<double>(len);
        CHECK(std::abs(est - 2.0 / 9.0) < 3.0 * 2.5 / std::sqrt(static_cast<double>(len)));
    }
}
