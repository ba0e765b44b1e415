#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ldlab/ising.hpp"
#include "ldlab/nets.hpp"

using namespace ldlab;
using Catch::Approx;

namespace {

IsingProblem two_spin(double c) {
    SymMatrix a(2);
    a.set(0, 1, c);
    return IsingProblem(a);
}

IsingProblem random_sparse(std::size_t n, double scale, Rng& rng) {
    SymMatrix a(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.bernoulli(0.5)) a.set(i, j, scale * rng.uniform(-1.0, 1.0));
    return IsingProblem(a);
}

// Solves tanh(2 c x) = x for the positive root by bisection.
double symmetric_fixed_point(double c) {
    double lo = 1e-12, hi = 1.0 - 1e-15;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (std::tanh(2.0 * c * mid) - mid > 0.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("exact log-partition function", "[ising]") {
    SECTION("zero coupling and single spin") {
        REQUIRE(exact_log_partition(IsingProblem(SymMatrix(3))) == Approx(0.0).margin(1e-14));
        REQUIRE(exact_log_partition(IsingProblem(SymMatrix(1))) == Approx(0.0).margin(1e-14));
    }

    SECTION("two spins: log cosh(2c)") {
        REQUIRE(exact_log_partition(two_spin(1.0)) ==
                Approx(std::log(std::cosh(2.0))).margin(1e-12));
        REQUIRE(exact_log_partition(two_spin(-0.7)) ==
                Approx(std::log(std::cosh(1.4))).margin(1e-12));
    }

    SECTION("Gray-code updates agree with direct evaluation") {
        Rng rng(21);
        const IsingProblem p = random_sparse(8, 0.3, rng);
        double direct_max = -kInf;
        std::vector<double> terms;
        for (unsigned mask = 0; mask < 256u; ++mask) {
            std::vector<double> sigma(8);
            for (int i = 0; i < 8; ++i) sigma[i] = (mask >> i & 1u) ? 1.0 : -1.0;
            terms.push_back(p.coupling.quad_form(sigma));
            direct_max = std::max(direct_max, terms.back());
        }
        double s = 0.0;
        for (const double t : terms) s += std::exp(t - direct_max);
        const double direct = direct_max + std::log(s) - 8.0 * std::log(2.0);
        REQUIRE(exact_log_partition(p) == Approx(direct).margin(1e-11));
    }

    SECTION("resource guard") {
        REQUIRE_THROWS_AS(exact_log_partition(IsingProblem(SymMatrix(25))), resource_error);
    }

    SECTION("nonzero diagonal is rejected at construction") {
        SymMatrix a(2);
        a.set(0, 0, 0.5);
        REQUIRE_THROWS_AS(IsingProblem(a), argument_error);
    }
}

TEST_CASE("mean-field supremum", "[ising]") {
    SECTION("zero coupling: value 0 at x = 0") {
        Rng rng(1);
        const auto sol = meanfield_sup(IsingProblem(SymMatrix(4)), 8, rng);
        REQUIRE(sol.converged);
        REQUIRE(sol.value == Approx(0.0).margin(1e-10));
        for (const double xi : sol.x_star) REQUIRE(xi == Approx(0.0).margin(1e-7));
    }

    SECTION("two spins, c = 1: bisection oracle") {
        Rng rng(2);
        const auto sol = meanfield_sup(two_spin(1.0), 16, rng);
        const double xs = symmetric_fixed_point(1.0);
        const double oracle = 2.0 * xs * xs - 2.0 * legendre(ScalarLaw::rademacher(), xs);
        REQUIRE(sol.converged);
        REQUIRE(sol.value == Approx(oracle).margin(1e-8));
        REQUIRE(std::abs(sol.x_star[0]) == Approx(xs).margin(1e-6));
        REQUIRE(oracle == Approx(0.65313).margin(1e-4));
    }

    SECTION("fixed-point residual at the reported solution") {
        Rng rng(3);
        for (int rep = 0; rep < 5; ++rep) {
            const IsingProblem p = random_sparse(6, 0.25, rng);
            const auto sol = meanfield_sup(p, 12, rng);
            REQUIRE(sol.converged);
            REQUIRE(sol.residual <= 1e-8);
            // value is attained at x_star
            REQUIRE(detail::meanfield_objective(p.coupling, sol.x_star) ==
                    Approx(sol.value).margin(1e-10));
            for (const double xi : sol.x_star) REQUIRE(std::abs(xi) <= 1.0);
        }
    }

    SECTION("never exceeds the exact log-partition function") {
        Rng rng(4);
        for (int rep = 0; rep < 10; ++rep) {
            const IsingProblem p = random_sparse(7, 0.3, rng);
            const auto sol = meanfield_sup(p, 12, rng);
            REQUIRE(sol.value <= exact_log_partition(p) + 1e-9);
        }
    }

    SECTION("scaling sanity: exact - sup vanishes as the coupling shrinks") {
        Rng rng(8);
        const IsingProblem base = random_sparse(6, 1.0, rng);
        double first_gap = 0.0, prev_gap = kInf;
        for (const double c : {0.5, 0.1, 0.02}) {
            const IsingProblem p(base.coupling.scaled(c));
            Rng r(9);
            const double gap = exact_log_partition(p) - meanfield_sup(p, 16, r).value;
            REQUIRE(gap >= -1e-9);
            REQUIRE(gap <= prev_gap + 1e-9);
            if (first_gap == 0.0) first_gap = gap;
            prev_gap = gap;
        }
        // the gap shrinks quadratically with the coupling scale
        REQUIRE(prev_gap <= 0.01 * first_gap);
    }

    SECTION("thread count does not change the result") {
        Rng r1(5), r2(5);
        const IsingProblem p = random_sparse(6, 0.3, r1);
        Rng r3(6), r4(6);
        const auto serial = meanfield_sup(p, 16, r3, 1);
        const auto parallel = meanfield_sup(p, 16, r4, 4);
        REQUIRE(serial.value == parallel.value);
        REQUIRE(serial.x_star == parallel.x_star);
        (void)r2;
    }
}

TEST_CASE("partition-function certificate", "[ising]") {
    SECTION("zero coupling: 0 <= 0 + 0 + delta") {
        const auto cert = partition_certificate(IsingProblem(SymMatrix(3)), 0.5);
        REQUIRE(cert.bound_ok);
        REQUIRE(cert.net_cardinality == 1);
        REQUIRE(cert.log_z == Approx(0.0).margin(1e-12));
        REQUIRE(cert.sup == Approx(0.0).margin(1e-9));
    }

    SECTION("two spins at delta = 0.5") {
        const auto cert = partition_certificate(two_spin(1.0), 0.5);
        REQUIRE(cert.bound_ok);
        REQUIRE(cert.log_z == Approx(std::log(std::cosh(2.0))).margin(1e-10));
    }

    SECTION("random sparse 6x6 across 20 seeds") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            Rng rng(seed);
            const IsingProblem p = random_sparse(6, 0.02, rng);
            const auto cert = partition_certificate(p, 0.5, 0.0, 32, seed);
            REQUIRE(cert.bound_ok);
            REQUIRE(cert.sup <= cert.log_z + 1e-9);
        }
    }

    SECTION("explicit mesh too coarse raises certification_error") {
        REQUIRE_THROWS_AS(partition_certificate(two_spin(1.0), 0.5, 1.9), certification_error);
    }

    SECTION("size guard") {
        REQUIRE_THROWS_AS(partition_certificate(IsingProblem(SymMatrix(11)), 0.5),
                          resource_error);
    }
}

TEST_CASE("net covering property of the certificate construction", "[ising]") {
    // The certificate's net must cover 2A[-1,1]^n within delta/D; spot-check
    // by rebuilding the net through the public API on a small instance and
    // sampling random images.
    Rng rng(77);
    const IsingProblem p = random_sparse(4, 0.15, rng);
    const double delta = 0.5;
    const auto cert = partition_certificate(p, delta);
    REQUIRE(cert.bound_ok);

    // Mean-width ratio (logZ - sup) / (n^{1/3} g^{2/3}) is reported, not asserted.
    Rng mw(78);
    const auto g = gaussian_mean_width(p.coupling.scaled(2.0), 2000, mw);
    if (g.value > 0.0) {
        const double ratio =
            (cert.log_z - cert.sup) / (std::cbrt(4.0) * std::pow(g.value, 2.0 / 3.0));
        INFO("mean-width ratio " << ratio);
        REQUIRE(std::isfinite(ratio));
    }
}

TEST_CASE("spectral diagnostics", "[ising]") {
    SECTION("zero matrix") {
        const auto d = spectral_diagnostics(SymMatrix(5));
        REQUIRE(d.hs_norm == 0.0);
        REQUIRE(d.op_norm == 0.0);
        for (const double q : d.esd_quantiles) REQUIRE(q == 0.0);
    }

    SECTION("scaled star graph: two outliers, bulk at zero") {
        const std::size_t n = 25;
        const SymMatrix a = star_adjacency(n).scaled(1.0 / std::sqrt(double(n)));
        const auto d = spectral_diagnostics(a);
        const double outlier = std::sqrt(double(n - 1) / double(n));
        REQUIRE(d.op_norm == Approx(outlier).margin(1e-10));
        REQUIRE(d.esd_quantiles.front() == Approx(-outlier).margin(1e-10));
        REQUIRE(d.esd_quantiles.back() == Approx(outlier).margin(1e-10));
        for (int q = 1; q < 10; ++q) REQUIRE(d.esd_quantiles[q] == Approx(0.0).margin(1e-10));
    }

    SECTION("n^{-1} tr A^2 equals the Frobenius oracle") {
        Rng rng(31);
        const IsingProblem p = random_sparse(9, 0.7, rng);
        const auto d = spectral_diagnostics(p.coupling);
        double fro2 = 0.0;
        for (std::size_t i = 0; i < 9; ++i)
            for (std::size_t j = 0; j < 9; ++j) fro2 += p.coupling(i, j) * p.coupling(i, j);
        REQUIRE(d.hs_norm == Approx(fro2 / 9.0).margin(1e-12));
    }
}

TEST_CASE("graph families", "[ising]") {
    const SymMatrix star = star_adjacency(5);
    REQUIRE(star(0, 4) == 1.0);
    REQUIRE(star(1, 2) == 0.0);
    const SymMatrix cyc = cycle_adjacency(5);
    REQUIRE(cyc(0, 1) == 1.0);
    REQUIRE(cyc(0, 4) == 1.0);
    REQUIRE(cyc(1, 3) == 0.0);
    const SymMatrix comp = complete_adjacency(4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) REQUIRE(comp(i, j) == (i == j ? 0.0 : 1.0));
}
