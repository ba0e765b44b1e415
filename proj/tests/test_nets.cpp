#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ldlab/nets.hpp"

using namespace ldlab;
using Catch::Approx;

TEST_CASE("interval nets", "[nets]") {
    SECTION("unit interval at eps = 0.25") {
        const IntervalNet net = net_interval(0.0, 1.0, 0.25);
        REQUIRE(net.points == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
        REQUIRE(net.summary.cardinality == 5);
    }

    SECTION("degenerate interval") {
        const IntervalNet net = net_interval(0.0, 0.0, 0.1);
        REQUIRE(net.points == std::vector<double>{0.0});
    }

    SECTION("cardinality = ceil((b-a)/eps) + 1") {
        REQUIRE(net_interval(0.0, 10.0, 0.3).summary.cardinality == 35);
    }

    SECTION("bad arguments") {
        REQUIRE_THROWS_AS(net_interval(0.0, 1.0, 0.0), argument_error);
        REQUIRE_THROWS_AS(net_interval(0.0, 1.0, -0.5), argument_error);
        REQUIRE_THROWS_AS(net_interval(1.0, 0.0, 0.1), argument_error);
    }

    SECTION("every point of the interval is within eps of the grid") {
        const IntervalNet net = net_interval(-2.0, 7.0, 0.37);
        Rng rng(1);
        for (int i = 0; i < 2000; ++i) {
            const double x = rng.uniform(-2.0, 7.0);
            REQUIRE(std::abs(net.nearest(x) - x) <= 0.37);
        }
    }
}

TEST_CASE("sphere nets", "[nets]") {
    SECTION("verification passes on S^1 at eps = 0.5") {
        Rng rng(2);
        const SphereNet net = net_sphere(2, 0.5, rng);
        REQUIRE(net.summary.worst_gap <= 0.5);
        REQUIRE(net.summary.verification_samples == 10000);
    }

    SECTION("eps = 2 is covered by a single point") {
        Rng rng(3);
        const SphereNet net = net_sphere(5, 2.0, rng);
        REQUIRE(net.points.size() == 1);
        REQUIRE(net.summary.worst_gap <= 2.0);
    }

    SECTION("cardinality stays under the (12/eps)^n reference bound") {
        Rng rng(4);
        const SphereNet net = net_sphere(3, 0.8, rng);
        REQUIRE(net.summary.worst_gap <= 0.8);
        REQUIRE(static_cast<double>(net.summary.cardinality) <= std::pow(12.0 / 0.8, 3.0));
        REQUIRE(net.summary.log_cardinality <= net.summary.bound);
    }

    SECTION("coverage and bound across parameter grid") {
        Rng rng(5);
        const std::vector<std::pair<std::size_t, double>> cases{{2, 0.125}, {3, 0.15}, {4, 0.35}};
        for (const auto& [n, eps] : cases) {
            const SphereNet net = net_sphere(n, eps, rng);
            REQUIRE(net.summary.worst_gap <= eps);
            REQUIRE(net.summary.log_cardinality <=
                    static_cast<double>(n) * std::log(12.0 / eps) + 1e-12);
        }
    }

    SECTION("desk-scale guards") {
        Rng rng(6);
        REQUIRE_THROWS_AS(net_sphere(1, 0.5, rng), argument_error);
        REQUIRE_THROWS_AS(net_sphere(9, 0.5, rng), argument_error);
        REQUIRE_THROWS_AS(net_sphere(3, 0.0, rng), argument_error);
    }
}

TEST_CASE("low-rank operator-ball nets", "[nets]") {
    SECTION("log-cardinality bound 2nk log(12k/eps)") {
        Rng rng(7);
        const LowRankNet net = net_lowrank(2, 1, 0.5, rng);
        REQUIRE(net.summary.log_cardinality <= 2.0 * 2.0 * 1.0 * std::log(24.0));
        REQUIRE(net.summary.bound == Approx(2.0 * 2.0 * std::log(24.0)));
        REQUIRE(net.summary.worst_gap <= 0.5);
        // cardinality really is the product of the factor nets
        const double direct =
            std::pow(static_cast<double>(net.coefficients.points.size()) *
                     static_cast<double>(net.directions.points.size()), 1.0);
        REQUIRE(static_cast<double>(net.summary.cardinality) == Approx(direct));
    }

    SECTION("zero matrix lies in the eps-neighborhood") {
        Rng rng(8);
        for (const auto& [n, k, eps] :
             std::vector<std::tuple<std::size_t, std::size_t, double>>{
                 {2, 1, 0.5}, {3, 1, 0.6}, {4, 2, 0.8}}) {
            const LowRankNet net = net_lowrank(n, k, eps, rng);
            std::vector<double> mu(k, 0.0);
            std::vector<std::vector<double>> dirs(k, std::vector<double>(n, 0.0));
            for (std::size_t r = 0; r < k; ++r) dirs[r][r] = 1.0;
            REQUIRE(net.cover_distance(mu, dirs) <= eps);
        }
    }

    SECTION("random rank-1 unit-norm matrices are covered at (3, 1, 0.6)") {
        Rng rng(9);
        const LowRankNet net = net_lowrank(3, 1, 0.6, rng);
        for (int s = 0; s < 1000; ++s) {
            std::vector<double> mu;
            std::vector<std::vector<double>> dirs;
            random_rank_k_factors(3, 1, rng, mu, dirs);
            mu[0] = (mu[0] >= 0.0) ? 1.0 : -1.0;  // unit operator norm
            REQUIRE(net.cover_distance(mu, dirs) <= 0.6);
        }
    }

    SECTION("guards") {
        Rng rng(10);
        REQUIRE_THROWS_AS(net_lowrank(7, 1, 0.5, rng), argument_error);
        REQUIRE_THROWS_AS(net_lowrank(3, 3, 0.5, rng), argument_error);
        REQUIRE_THROWS_AS(net_lowrank(3, 1, 1.5, rng), argument_error);
    }
}

TEST_CASE("Gaussian mean-width estimator", "[nets]") {
    SECTION("zero matrix") {
        Rng rng(11);
        const auto est = gaussian_mean_width(SymMatrix(4), 200, rng);
        REQUIRE(est.value == 0.0);
        REQUIRE(est.std_err == 0.0);
    }

    SECTION("identity: n E|N(0,1)| = n sqrt(2/pi)") {
        Rng rng(12);
        const std::size_t n = 6;
        const auto est = gaussian_mean_width(SymMatrix::identity(n), 40000, rng);
        const double expected = n * std::sqrt(2.0 / M_PI);
        REQUIRE(est.value == Approx(expected).margin(3.0 * est.std_err));
    }

    SECTION("dominated by sqrt(n) ||A||_2 and symmetric in A -> -A") {
        Rng rng(13);
        const std::size_t n = 5;
        SymMatrix a(n);
        Rng gen(991);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) a.set(i, j, gen.uniform(-1.0, 1.0));
        const auto est = gaussian_mean_width(a, 20000, rng);
        REQUIRE(est.value <= std::sqrt(double(n)) * a.frobenius_norm() + 3.0 * est.std_err);

        const auto est_neg = gaussian_mean_width(a.scaled(-1.0), 20000, rng);
        const double sigma = std::hypot(est.std_err, est_neg.std_err);
        REQUIRE(est.value == Approx(est_neg.value).margin(3.0 * sigma));
    }

    SECTION("trial floor and thread invariance") {
        Rng r1(14);
        REQUIRE_THROWS_AS(gaussian_mean_width(SymMatrix::identity(3), 99, r1), argument_error);

        Rng r2(14), r3(14);
        const auto serial = gaussian_mean_width(SymMatrix::identity(3), 5000, r2, 1);
        const auto parallel = gaussian_mean_width(SymMatrix::identity(3), 5000, r3, 4);
        REQUIRE(serial.value == parallel.value);
        REQUIRE(serial.std_err == parallel.std_err);
    }
}
