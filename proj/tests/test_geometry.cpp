#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "htq/errors.hpp"
#include "htq/numeric.hpp"
#include "htq/rng.hpp"
#include "htq/switch_geometry.hpp"

using namespace htq;

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    CompSum s;
    for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
    return s.value();
}

double norm_sq(const std::vector<double>& a) { return dot(a, a); }

std::vector<double> random_matrix(Rng& rng, int n, double scale) {
    std::vector<double> x(static_cast<std::size_t>(n) * n);
    for (auto& v : x) v = scale * (2.0 * rng.u01() - 1.0);
    return x;
}

}  // namespace

TEST_CASE("project_L examples") {
    SUBCASE("all-ones lies in L") {
        std::vector<double> ones(4, 1.0);
        auto y = project_L(ones, 2);
        for (double v : y) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(norm_parallel_L_sq(ones, 2) == doctest::Approx(4.0).epsilon(1e-14));
    }
    SUBCASE("unit corner") {
        std::vector<double> x = {1, 0, 0, 0};
        auto y = project_L(x, 2);
        CHECK(y[0] == doctest::Approx(0.75).epsilon(1e-14));
        CHECK(y[1] == doctest::Approx(0.25).epsilon(1e-14));
        CHECK(y[2] == doctest::Approx(0.25).epsilon(1e-14));
        CHECK(y[3] == doctest::Approx(-0.25).epsilon(1e-14));
        CHECK(norm_parallel_L_sq(x, 2) == doctest::Approx(0.75).epsilon(1e-12));
    }
    SUBCASE("zero port sums mean x is orthogonal to L") {
        std::vector<double> x = {1, -1, -1, 1};
        CHECK(norm_parallel_L_sq(x, 2) == doctest::Approx(0.0).epsilon(1e-14));
        for (double v : project_L(x, 2)) CHECK(std::abs(v) < 1e-14);
    }
}

TEST_CASE("projection identities on random matrices") {
    Rng rng(2024);
    for (int trial = 0; trial < 400; ++trial) {
        int n = 2 + static_cast<int>(rng.below(5));  // 2..6
        auto x = random_matrix(rng, n, 10.0);
        auto y = random_matrix(rng, n, 10.0);
        double xn = std::sqrt(norm_sq(x)), yn = std::sqrt(norm_sq(y));

        auto xl = project_L(x, n);
        auto xll = project_L(xl, n);
        for (std::size_t k = 0; k < x.size(); ++k)
            CHECK(std::abs(xll[k] - xl[k]) <= 1e-12);

        std::vector<double> x_perp(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) x_perp[k] = x[k] - xl[k];
        auto yl = project_L(y, n);
        CHECK(std::abs(dot(x_perp, yl)) <= 1e-9 * xn * yn);
        // <x_par, y_par> = <x, y_par>
        CHECK(std::abs(dot(xl, yl) - dot(x, yl)) <= 1e-9 * xn * yn);
        CHECK(std::abs(norm_parallel_L_sq(x, n) - norm_sq(xl)) <=
              1e-10 * (1.0 + xn * xn));
    }
}

TEST_CASE("project_K examples") {
    SUBCASE("scaled generator is a fixed point") {
        std::vector<double> x = {2, 2, 0, 0};
        auto d = project_K(x, 2);
        for (std::size_t k = 0; k < x.size(); ++k) {
            CHECK(d.parallel[k] == doctest::Approx(x[k]).epsilon(1e-12));
            CHECK(std::abs(d.perp[k]) <= 1e-12);
        }
        CHECK(d.row_weights[0] == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("matrix with zero generator inner products projects to origin") {
        std::vector<double> x = {1, -1, -1, 1};
        auto d = project_K(x, 2);
        for (double v : d.parallel) CHECK(std::abs(v) <= 1e-12);
    }
    SUBCASE("cone point with mixed weights") {
        // w = (1, 0), wt = (0, 2): y_ij = w_i + wt_j
        std::vector<double> x = {1, 3, 0, 2};
        auto d = project_K(x, 2);
        for (std::size_t k = 0; k < x.size(); ++k)
            CHECK(d.parallel[k] == doctest::Approx(x[k]).epsilon(1e-12));
    }
}

TEST_CASE("cone decomposition invariants on random matrices") {
    Rng rng(77);
    for (int trial = 0; trial < 500; ++trial) {
        int n = 2 + static_cast<int>(rng.below(4));  // 2..5
        auto x = random_matrix(rng, n, 25.0);
        auto d = project_K(x, n);
        double xn_sq = norm_sq(x);

        for (std::size_t k = 0; k < x.size(); ++k)
            CHECK(std::abs(d.parallel[k] + d.perp[k] - x[k]) <= 1e-9);
        CHECK(std::abs(dot(d.parallel, d.perp)) <= 1e-8 * (1.0 + xn_sq));
        for (int i = 0; i < n; ++i) {
            CHECK(d.row_weights[i] >= 0.0);
            CHECK(d.col_weights[i] >= 0.0);
            double gr = 0.0, gc = 0.0;
            for (int j = 0; j < n; ++j) {
                gr += d.perp[static_cast<std::size_t>(i) * n + j];
                gc += d.perp[static_cast<std::size_t>(j) * n + i];
            }
            CHECK(gr <= 1e-9);
            CHECK(gc <= 1e-9);
        }
        // K is contained in L, so the L-residual is never longer
        std::vector<double> xl = project_L(x, n);
        double perp_l = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k)
            perp_l += (x[k] - xl[k]) * (x[k] - xl[k]);
        CHECK(perp_l <= norm_sq(d.perp) + 1e-9 * (1.0 + xn_sq));
    }
}

TEST_CASE("cone projection matches the exhaustive oracle") {
    Rng rng(4242);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        auto x = random_matrix(rng, 3, 10.0);
        auto got = project_K(x, 3).parallel;
        auto want = cone_projection_bruteforce(x, 3);
        for (std::size_t k = 0; k < x.size(); ++k)
            worst = std::max(worst, std::abs(got[k] - want[k]));
    }
    CHECK(worst <= 1e-7);

    // n = 2 as well, including integer-valued inputs
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(4);
        for (auto& v : x) v = static_cast<double>(rng.below(21)) - 10.0;
        auto got = project_K(x, 2).parallel;
        auto want = cone_projection_bruteforce(x, 2);
        for (std::size_t k = 0; k < x.size(); ++k)
            CHECK(std::abs(got[k] - want[k]) <= 1e-9);
    }
}

TEST_CASE("warm-started projector stays exact along a trajectory") {
    // Simulation-style usage: inputs drift slowly, the active set persists.
    Rng rng(99);
    ConeProjector projector(3);
    std::vector<double> x(9, 0.0);
    for (int step = 0; step < 300; ++step) {
        for (auto& v : x) v += (rng.u01() - 0.45) * 3.0;
        double got = projector.perp_norm_sq(x);
        auto want = cone_projection_bruteforce(x, 3);
        double want_sq = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k)
            want_sq += (x[k] - want[k]) * (x[k] - want[k]);
        CHECK(got == doctest::Approx(want_sq).epsilon(1e-9));
    }
}

TEST_CASE("projector convergence on large inputs") {
    Rng rng(31337);
    for (int n : {8, 16, 32}) {
        ConeProjector projector(n);
        for (int trial = 0; trial < 20; ++trial) {
            auto x = random_matrix(rng, n, 1e6 / n);
            CHECK_NOTHROW(projector.perp_norm_sq(x));
        }
    }
}

TEST_CASE("capacity_position") {
    std::vector<double> uniform(4, 0.5);
    CHECK(capacity_position(uniform, 2) == CapacityPosition::OnFaceF);

    std::vector<double> interior(4, 0.45);
    CHECK(capacity_position(interior, 2) == CapacityPosition::Interior);

    std::vector<double> outside = {0.7, 0.5, 0.3, 0.3};  // row sum 1.2
    CHECK(capacity_position(outside, 2) == CapacityPosition::Outside);

    std::vector<double> mixed = {0.5, 0.5, 0.25, 0.25};  // row sums 1 and 0.5
    CHECK(capacity_position(mixed, 2) == CapacityPosition::BoundaryOther);

    std::vector<double> scaled(4, 0.45);  // (1 - 0.1) * uniform
    CHECK(capacity_position(scaled, 2) == CapacityPosition::Interior);
}
