#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>

#include "htq/errors.hpp"
#include "htq/scheduler.hpp"

using namespace htq;

namespace {

std::vector<std::int64_t> random_matrix(Rng& rng, int n, int hi) {
    std::vector<std::int64_t> q(static_cast<std::size_t>(n) * n);
    for (auto& v : q) v = static_cast<std::int64_t>(rng.below(hi + 1));
    return q;
}

}  // namespace

TEST_CASE("examples") {
    Rng rng(1);
    SUBCASE("2x2 with a unique optimum picks the identity") {
        std::vector<std::int64_t> q = {3, 1, 2, 4};  // diag weight 7 beats 3
        auto argmax = brute_force_schedules(q, 2);
        REQUIRE(argmax.size() == 1);
        CHECK(argmax[0] == std::vector<int>{0, 1});
        for (int rep = 0; rep < 20; ++rep)
            CHECK(max_weight_schedule(q, 2, rng).perm == std::vector<int>{0, 1});
    }
    SUBCASE("all-zero and all-equal matrices tie every permutation") {
        std::vector<std::int64_t> zeros(4, 0);
        CHECK(brute_force_schedules(zeros, 2).size() == 2);
        std::vector<std::int64_t> ones(4, 1);
        CHECK(brute_force_schedules(ones, 2).size() == 2);
    }
    SUBCASE("strictly dominant diagonal is deterministic") {
        std::vector<std::int64_t> q = {9, 1, 1, 1, 9, 1, 1, 1, 9};
        for (int rep = 0; rep < 20; ++rep)
            CHECK(max_weight_schedule(q, 3, rng).perm == std::vector<int>{0, 1, 2});
    }
    SUBCASE("dimension guard") {
        std::vector<std::int64_t> big(81, 0);
        CHECK_THROWS_AS(brute_force_schedules(big, 9), DimensionTooLarge);
    }
}

TEST_CASE("hungarian equals enumeration on unique optima") {
    Rng rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        int n = 2 + static_cast<int>(rng.below(7));  // 2..8
        auto q = random_matrix(rng, n, 1000);        // large range: ties unlikely
        std::vector<double> w(q.begin(), q.end());
        auto perm = hungarian_max_assignment(w, n);
        auto argmax = brute_force_schedules(q, n);
        std::int64_t got = Schedule{perm}.weight(q, n);
        std::int64_t want = Schedule{argmax.front()}.weight(q, n);
        CHECK(got == want);
    }
}

TEST_CASE("max_weight_schedule agrees with brute force for n <= 5") {
    Rng rng(99);
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 2 + static_cast<int>(rng.below(4));
        auto q = random_matrix(rng, n, trial % 2 == 0 ? 4 : 50);
        auto argmax = brute_force_schedules(q, n);
        auto s = max_weight_schedule(q, n, rng);
        CHECK(std::find(argmax.begin(), argmax.end(), s.perm) != argmax.end());
        CHECK(s.weight(q, n) == Schedule{argmax.front()}.weight(q, n));
        ++checked;
    }
    CHECK(checked == 1000);
}

TEST_CASE("perturbed hungarian path agrees with brute force for n > 5") {
    Rng rng(123);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 6 + static_cast<int>(rng.below(3));  // 6..8
        auto q = random_matrix(rng, n, trial % 2 == 0 ? 3 : 30);
        auto argmax = brute_force_schedules(q, n);
        auto s = max_weight_schedule(q, n, rng);
        CHECK(std::find(argmax.begin(), argmax.end(), s.perm) != argmax.end());
    }
}

TEST_CASE("ties are broken uniformly at n = 3") {
    std::vector<std::int64_t> zeros(9, 0);
    const auto& perms = all_permutations(3);
    REQUIRE(perms.size() == 6);
    Rng rng(31415);
    std::map<std::vector<int>, int> counts;
    const int draws = 6000;
    for (int d = 0; d < draws; ++d)
        counts[max_weight_schedule(zeros, 3, rng).perm] += 1;
    REQUIRE(counts.size() == 6);
    double expected = draws / 6.0;
    double chi_sq = 0.0;
    for (const auto& [perm, cnt] : counts)
        chi_sq += (cnt - expected) * (cnt - expected) / expected;
    CHECK(chi_sq < 15.086);  // df = 5 at significance 0.01
}

TEST_CASE("partial tie sets are sampled across draws") {
    // two optimal matchings out of six
    std::vector<std::int64_t> q = {5, 5, 0, 0, 0, 5, 0, 0, 0};
    auto argmax = brute_force_schedules(q, 3);
    REQUIRE(argmax.size() == 2);
    Rng rng(8);
    std::map<std::vector<int>, int> counts;
    for (int d = 0; d < 2000; ++d)
        counts[max_weight_schedule(q, 3, rng).perm] += 1;
    CHECK(counts.size() == 2);
    for (const auto& [perm, cnt] : counts) {
        CHECK(std::find(argmax.begin(), argmax.end(), perm) != argmax.end());
        CHECK(cnt > 800);  // roughly balanced
    }
}
