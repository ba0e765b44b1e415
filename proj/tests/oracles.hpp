#pragma once

// Independent test oracles. Everything here recomputes expected values by a
// route different from the library implementation it checks (grid search,
// enumeration, quadrature, cofactor expansion), and must stay that way.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "ldlab/linalg.hpp"
#include "ldlab/measures.hpp"

namespace oracles {

// sup_lambda { lambda x - Lambda(lambda) } by coarse grid + repeated refinement.
inline double legendre_grid(const ldlab::ScalarLaw& law, double x, double lambda_max = 60.0) {
    auto objective = [&](double l) { return l * x - ldlab::log_laplace(law, l); };
    double lo = -lambda_max, hi = lambda_max;
    double best_l = 0.0;
    for (int round = 0; round < 80; ++round) {
        double best = -1e300;
        const int pts = 401;
        for (int i = 0; i < pts; ++i) {
            const double l = lo + (hi - lo) * i / (pts - 1);
            const double v = objective(l);
            if (v > best) {
                best = v;
                best_l = l;
            }
        }
        const double step = (hi - lo) / (pts - 1);
        lo = best_l - 2.0 * step;
        hi = best_l + 2.0 * step;
        if (step < 1e-14 * std::max(1.0, std::abs(best_l))) break;
    }
    return objective(best_l);
}

// Simpson quadrature on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
    if (intervals % 2 != 0) ++intervals;
    const double h = (b - a) / intervals;
    double s = f(a) + f(b);
    for (int i = 1; i < intervals; i += 2) s += 4.0 * f(a + i * h);
    for (int i = 2; i < intervals; i += 2) s += 2.0 * f(a + i * h);
    return s * h / 3.0;
}

// Mean of the tilted law by enumeration (discrete families) or quadrature.
inline double tilted_mean_oracle(const ldlab::TiltedLaw& t) {
    using F = ldlab::ScalarLaw::Family;
    const double l = t.lambda;
    const double logZ = ldlab::log_laplace(t.base, l);
    switch (t.base.family()) {
        case F::Rademacher:
            return (std::exp(l - logZ) - std::exp(-l - logZ)) / 2.0;
        case F::Bernoulli: {
            const double p = t.base.param();
            return p * std::exp(l - logZ);
        }
        case F::UniformSym: {
            const double a = t.base.param();
            auto density = [&](double x) { return std::exp(l * x - logZ) / (2.0 * a); };
            return simpson([&](double x) { return x * density(x); }, -a, a, 200000);
        }
        case F::Gaussian: {
            const double s2 = t.base.param();
            const double s = std::sqrt(s2);
            auto density = [&](double x) {
                return std::exp(l * x - logZ) * std::exp(-x * x / (2.0 * s2)) /
                       (s * std::sqrt(2.0 * M_PI));
            };
            return simpson([&](double x) { return x * density(x); }, -12.0 * s + s2 * l,
                           12.0 * s + s2 * l, 200000);
        }
    }
    return 0.0;
}

// Determinant by cofactor expansion, n <= 4.
inline double cofactor_det(const std::vector<std::vector<double>>& m) {
    const std::size_t n = m.size();
    if (n == 1) return m[0][0];
    double det = 0.0;
    double sign = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<std::vector<double>> minor(n - 1, std::vector<double>(n - 1));
        for (std::size_t i = 1; i < n; ++i) {
            std::size_t jj = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == c) continue;
                minor[i - 1][jj++] = m[i][j];
            }
        }
        det += sign * m[0][c] * cofactor_det(minor);
        sign = -sign;
    }
    return det;
}

inline double cofactor_det(const ldlab::SymMatrix& m) {
    const std::size_t n = m.size();
    std::vector<std::vector<double>> d(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d[i][j] = m(i, j);
    return cofactor_det(d);
}

// Number of independent vertex sets of each size in the cycle C_d, by brute
// force over all 2^d subsets.
inline std::vector<std::uint64_t> independent_sets_cycle_bruteforce(int d) {
    std::vector<std::uint64_t> count;
    for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
        bool ok = true;
        for (int v = 0; v < d && ok; ++v) {
            const int w = (v + 1) % d;
            if ((mask >> v & 1u) && (mask >> w & 1u)) ok = false;
        }
        if (!ok) continue;
        const int size = __builtin_popcount(mask);
        if (static_cast<int>(count.size()) <= size) count.resize(size + 1, 0);
        ++count[size];
    }
    return count;
}

// Triangle count by triple loop on a 0/1 adjacency matrix.
inline std::uint64_t triangle_count_bruteforce(const ldlab::SymMatrix& a) {
    const std::size_t n = a.size();
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k)
                if (a(i, j) == 1.0 && a(j, k) == 1.0 && a(i, k) == 1.0) ++c;
    return c;
}

}  // namespace oracles
