#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "htq/arrival.hpp"
#include "htq/errors.hpp"
#include "htq/markov.hpp"

using namespace htq;

TEST_CASE("two-state family reproduces the reference chain") {
    // offset mapping with mu - eps = 1/3 gives pi_ON = 1/6 and the matrix
    // [[0.9, 0.1], [0.5, 0.5]].
    auto family = make_two_state_family(2, 0.4, 0.5, RateMapping::OffsetFromCapacity);
    auto chain = family.chain(0.5 - 1.0 / 3.0);
    CHECK(chain.p(0, 1) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(chain.p(0, 0) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(chain.p(1, 0) == doctest::Approx(0.5).epsilon(1e-12));

    auto stat = stationary_distribution(chain);
    CHECK(stat.mean_emission == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    auto summary = autocovariance(chain, 64, 1e-12);
    CHECK(summary.sigma_sq == doctest::Approx(35.0 / 27.0).epsilon(1e-9));
}

TEST_CASE("two-state family parameter mapping") {
    SUBCASE("scaled: eps=0.5, k=2, v=1 gives pi_ON=0.25, lambda=0.5") {
        auto family = make_two_state_family(2, 0.4, 1.0);
        auto chain = family.chain(0.5);
        auto stat = stationary_distribution(chain);
        CHECK(stat.probabilities[1] == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(stat.mean_emission == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("r = 0 degenerates to identical rows") {
        auto chain = make_two_state_family(2, 0.0, 0.8).chain(0.1);
        CHECK(chain.p(0, 1) == doctest::Approx(chain.p(1, 1)).epsilon(1e-12));
        auto s = autocovariance(chain, 16, 1e-12);
        for (std::size_t t = 1; t < s.gamma.size(); ++t)
            CHECK(std::abs(s.gamma[t]) < 1e-14);
    }
    SUBCASE("rate validity") {
        CHECK_THROWS_AS(make_two_state_family(2, 0.4, 3.0), InfeasibleRate);
        CHECK_THROWS_AS(make_two_state_family(2, 1.0, 0.5), InfeasibleRate);
        auto family = make_two_state_family(2, 0.4, 0.5,
                                            RateMapping::OffsetFromCapacity);
        CHECK_THROWS_AS(family.chain(0.5), InfeasibleRate);  // rate would be 0
    }
    SUBCASE("mean hits the mapping across the sweep grid") {
        auto scaled = make_two_state_family(3, 0.3, 0.7);
        auto offset = make_two_state_family(3, 0.3, 0.7,
                                            RateMapping::OffsetFromCapacity);
        for (double eps : {0.2, 0.1, 0.05, 0.02, 0.01}) {
            CHECK(std::abs(stationary_distribution(scaled.chain(eps)).mean_emission -
                           (1.0 - eps) * 0.7) < 1e-10);
            CHECK(std::abs(stationary_distribution(offset.chain(eps)).mean_emission -
                           (0.7 - eps)) < 1e-10);
        }
    }
}

TEST_CASE("emission levels are fixed across eps") {
    auto family = make_two_state_family(2, 0.4, 0.5);
    auto a = family.chain(0.2);
    auto b = family.chain(0.01);
    CHECK(a.emissions() == b.emissions());
    CHECK(a.a_max() == family.a_max());
}

TEST_CASE("iid family") {
    SUBCASE("Bernoulli: sigma^2 = lambda (1 - lambda)") {
        auto family = make_iid_family({0, 1}, {0.5, 0.5}, 0.5);
        auto chain = family.chain(0.0);
        auto s = autocovariance(chain, 16, 1e-12);
        CHECK(s.sigma_sq == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(stationary_distribution(chain).mean_emission ==
              doctest::Approx(0.5).epsilon(1e-12));

        auto thinned = family.chain(0.2);  // lambda = 0.4
        CHECK(stationary_distribution(thinned).mean_emission ==
              doctest::Approx(0.4).epsilon(1e-12));
        CHECK(autocovariance(thinned, 16, 1e-12).sigma_sq ==
              doctest::Approx(0.4 * 0.6).epsilon(1e-12));
    }
    SUBCASE("point mass at 1 has sigma^2 = 0") {
        auto chain = make_iid_family({1}, {1.0}, 1.0).chain(0.0);
        CHECK(autocovariance(chain, 16, 1e-12).sigma_sq ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("rate above the base mean is infeasible") {
        auto family = make_iid_family({0, 1}, {0.5, 0.5}, 0.8);
        CHECK_THROWS_AS(family.chain(0.0), InfeasibleRate);  // 0.8 > 0.5
    }
}

TEST_CASE("saturated rate matrices") {
    SUBCASE("uniform presets") {
        auto v2 = saturated_rate_matrix_uniform(2);
        for (double x : v2) CHECK(x == doctest::Approx(0.5).epsilon(1e-15));
        auto v3 = saturated_rate_matrix_uniform(3);
        for (double x : v3) CHECK(x == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    }
    SUBCASE("random variant is doubly stochastic with a positive floor") {
        for (int n : {2, 3, 5}) {
            auto v = saturated_rate_matrix_random(n, 77);
            for (int i = 0; i < n; ++i) {
                double rs = 0.0, cs = 0.0;
                for (int j = 0; j < n; ++j) {
                    rs += v[static_cast<std::size_t>(i) * n + j];
                    cs += v[static_cast<std::size_t>(j) * n + i];
                    CHECK(v[static_cast<std::size_t>(i) * n + j] >=
                          1.0 / (2.0 * n * n) - 1e-15);
                }
                CHECK(rs == doctest::Approx(1.0).epsilon(1e-12));
                CHECK(cs == doctest::Approx(1.0).epsilon(1e-12));
            }
            CHECK(saturated_rate_matrix_random(n, 77) == v);  // seed-deterministic
        }
    }
}

TEST_CASE("gamma convergence along the sweep grid") {
    auto family = make_two_state_family(2, 0.4, 0.8);
    auto limit = gamma_prefix(family.chain(0.0), 10);
    std::vector<double> prev;
    for (double eps : {0.2, 0.1, 0.05, 0.02, 0.01}) {
        auto g = gamma_prefix(family.chain(eps), 10);
        std::vector<double> gap;
        for (int t = 0; t <= 10; ++t) gap.push_back(std::abs(g[t] - limit[t]));
        if (!prev.empty())
            for (int t = 0; t <= 10; ++t) CHECK(gap[t] <= prev[t] + 1e-14);
        prev = gap;
    }
}

TEST_CASE("uniform mixing across the family") {
    auto family = make_two_state_family(2, 0.4, 0.6);
    double lo = 1.0, hi = 0.0;
    for (double eps : {0.2, 0.1, 0.05, 0.02, 0.01}) {
        auto env = fit_mixing_envelope(mixing_profile(family.chain(eps), 25));
        lo = std::min(lo, env.alpha);
        hi = std::max(hi, env.alpha);
        CHECK(env.c_const < 10.0);
    }
    CHECK(hi - lo < 0.05);
    CHECK(hi < 0.95);
}
