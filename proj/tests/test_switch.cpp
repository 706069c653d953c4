#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "htq/arrival.hpp"
#include "htq/errors.hpp"
#include "htq/switch_sim.hpp"

using namespace htq;

namespace {

SwitchModel small_model(int n, double eps, double burstiness = 0.4) {
    auto family = make_two_state_family(2, burstiness, 1.0 / n);
    return SwitchModel::build(family, saturated_rate_matrix_uniform(n), n, eps);
}

}  // namespace

TEST_CASE("switch_step honors the slot identities") {
    std::vector<std::int64_t> q = {0, 2, 1, 0};
    std::vector<std::int64_t> a = {0, 1, 0, 0};
    std::vector<std::int64_t> u(4, 0);
    Schedule s{{0, 1}};  // serve (0,0) and (1,1)
    switch_step(q, a, s, 2, u);
    // both scheduled queues were empty after arrivals: unused service on each
    CHECK(q == std::vector<std::int64_t>{0, 3, 1, 0});
    CHECK(u == std::vector<std::int64_t>{1, 0, 0, 1});

    // all scheduled queues busy: no unused service
    q = {2, 0, 0, 2};
    a = {0, 0, 0, 0};
    switch_step(q, a, s, 2, u);
    CHECK(q == std::vector<std::int64_t>{1, 0, 0, 1});
    CHECK(u == std::vector<std::int64_t>{0, 0, 0, 0});
}

TEST_CASE("simulation determinism") {
    auto model = small_model(2, 0.1);
    auto s1 = simulate_switch(model, 200000, 20000, 4242);
    auto s2 = simulate_switch(model, 200000, 20000, 4242);
    CHECK(s1 == s2);
    auto s3 = simulate_switch(model, 200000, 20000, 4243);
    CHECK(s1.sum_q.mean != s3.sum_q.mean);
}

TEST_CASE("unused service matches N eps") {
    auto model = small_model(2, 0.1);
    auto stats = simulate_switch(model, 1100000, 100000, 99);
    CHECK(stats.unused_identity_ok);
    CHECK(std::abs(stats.sum_unused.mean - 0.2) < 0.01);
}

TEST_CASE("light load keeps both components modest") {
    auto model = small_model(2, 0.5);
    auto stats = simulate_switch(model, 400000, 50000, 7);
    CHECK(stats.perp_k_sq.mean < 10.0);
    CHECK(stats.parallel_k_sq.mean < 50.0);
    CHECK(stats.perp_l_sq.mean <= stats.perp_k_sq.mean + 1e-9);
    CHECK(!stats.warnings.empty());  // eps = 0.5 is far outside the collapse regime
}

TEST_CASE("collapse regime warning is absent for small eps") {
    auto model = small_model(2, 0.05);
    // v_min/(2||v||) = 0.5 / (2 * 1) = 0.25 > 0.05: no warning expected
    auto stats = simulate_switch(model, 400000, 100000, 7);
    CHECK(stats.warnings.empty());
}

TEST_CASE("predictions") {
    SUBCASE("switch_prediction") {
        std::vector<double> ones(4, 1.0);
        CHECK(switch_prediction(ones, 2) == doctest::Approx(3.0));
        std::vector<double> zeros(9, 0.0);
        CHECK(switch_prediction(zeros, 3) == 0.0);
        std::vector<double> ref(9, 35.0 / 27.0);
        CHECK(switch_prediction(ref, 3) ==
              doctest::Approx((5.0 / 6.0) * 9.0 * 35.0 / 27.0).epsilon(1e-12));
    }
    SUBCASE("universal_lower and the optimality ratio") {
        std::vector<double> ones(4, 1.0);
        CHECK(universal_lower(ones) == doctest::Approx(2.0));
        CHECK(optimality_ratio(2) == doctest::Approx(1.5));
        CHECK(optimality_ratio(8) == doctest::Approx(1.875));  // 2 - 1/8
        std::vector<double> zeros(4, 0.0);
        CHECK(universal_lower(zeros) == 0.0);
    }
    SUBCASE("ratio prediction/lower is 2 - 1/N") {
        for (int n : {2, 3, 5}) {
            std::vector<double> sig(static_cast<std::size_t>(n) * n, 0.7);
            CHECK(switch_prediction(sig, n) / universal_lower(sig) ==
                  doctest::Approx(optimality_ratio(n)).epsilon(1e-12));
        }
    }
}

TEST_CASE("model construction validates the rate matrix") {
    auto family = make_two_state_family(2, 0.4, 0.5);
    std::vector<double> bad(3, 0.5);
    CHECK_THROWS_AS(SwitchModel::build(family, bad, 2, 0.1), ConfigInvalid);

    auto model = small_model(3, 0.1);
    CHECK(model.v_min() == doctest::Approx(1.0 / 3.0));
    CHECK(model.v_norm() == doctest::Approx(1.0).epsilon(1e-12));  // uniform 3x3
}

TEST_CASE("trajectory sampling") {
    auto model = small_model(2, 0.1);
    auto traj = switch_total_queue_trajectory(model, {0, 1000, 2000}, 5);
    REQUIRE(traj.size() == 3);
    CHECK(traj[0] == 0);  // starts empty
    for (auto v : traj) CHECK(v >= 0);
}
