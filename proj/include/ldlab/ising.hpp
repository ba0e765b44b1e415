#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "ldlab/errors.hpp"
#include "ldlab/linalg.hpp"
#include "ldlab/measures.hpp"
#include "ldlab/parallel.hpp"
#include "ldlab/rng.hpp"

namespace ldlab {

/// Ising coupling: <sigma, A sigma> against the uniform measure on {-1,1}^n.
/// The diagonal must be exactly zero.
struct IsingProblem {
    SymMatrix coupling;

    explicit IsingProblem(SymMatrix a) : coupling(std::move(a)) {
        if (!coupling.has_zero_diagonal())
            throw argument_error("IsingProblem: coupling diagonal must be exactly zero");
    }

    std::size_t size() const { return coupling.size(); }
};

/// log integral e^{<sigma, A sigma>} d mu(sigma) with mu uniform on {-1,1}^n,
/// by exact enumeration (Gray-code updates, streaming log-sum-exp).
inline double exact_log_partition(const IsingProblem& problem) {
    const std::size_t n = problem.size();
    if (n > 24) throw resource_error("exact_log_partition: n <= 24 (enumeration guard)");
    const SymMatrix& a = problem.coupling;

    std::vector<double> sigma(n, -1.0);
    std::vector<double> v = a.apply(sigma);
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) f += sigma[i] * v[i];

    double running_max = f;
    double running_sum = 1.0;  // sum of e^{f - running_max}
    const std::uint64_t total = std::uint64_t(1) << n;
    for (std::uint64_t s = 1; s < total; ++s) {
        const unsigned i = static_cast<unsigned>(__builtin_ctzll(s));  // Gray-code flip
        f -= 4.0 * sigma[i] * v[i];
        for (std::size_t j = 0; j < n; ++j) v[j] -= 2.0 * a(j, i) * sigma[i];
        sigma[i] = -sigma[i];
        if (f > running_max) {
            running_sum = running_sum * std::exp(running_max - f) + 1.0;
            running_max = f;
        } else {
            running_sum += std::exp(f - running_max);
        }
    }
    return running_max + std::log(running_sum) - static_cast<double>(n) * std::log(2.0);
}

/// Best stationary point of F(x) = <x, Ax> - sum_i h(x_i) over [-1,1]^n,
/// h the Rademacher rate function.
struct MeanFieldSolution {
    std::vector<double> x_star;
    double value = 0.0;
    int starts_used = 0;
    bool converged = false;
    double residual = 0.0;  // ||x - tanh(2Ax)||_inf at x_star
};

namespace detail {

inline double meanfield_objective(const SymMatrix& a, const std::vector<double>& x) {
    static const ScalarLaw rad = ScalarLaw::rademacher();
    double s = a.quad_form(x);
    for (const double xi : x) s -= legendre(rad, xi);
    return s;
}

inline bool lex_less_rounded(const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double ra = std::round(a[i] * 1e9);
        const double rb = std::round(b[i] * 1e9);
        if (ra != rb) return ra < rb;
    }
    return false;
}

}  // namespace detail

/// Damped naive mean-field iteration x <- (1-gamma) x + gamma tanh(2Ax),
/// gamma = 0.5, over multiple starts: the all-0.5 vector, the top eigenvector
/// pushed to the boundary, and uniform random points. Returns the best
/// objective over converged starts; the solver is a heuristic and global
/// optimality is not claimed.
inline MeanFieldSolution meanfield_sup(const IsingProblem& problem, int starts, Rng& rng,
                                       int threads = 1) {
    if (starts < 1) throw argument_error("meanfield_sup: starts >= 1 required");
    const std::size_t n = problem.size();
    const SymMatrix& a = problem.coupling;
    const std::uint64_t master = rng.next_u64();

    constexpr double kGamma = 0.5;
    constexpr double kTol = 1e-10;
    constexpr int kMaxIter = 10000;

    struct StartResult {
        std::vector<double> x;
        double value = -kInf;
        double residual = kInf;
        bool converged = false;
    };
    std::vector<StartResult> results(static_cast<std::size_t>(starts));

    // start 0: constant 0.5; start 1: top eigenvector scaled to the boundary;
    // start 2: the origin (always a stationary point, and the exact fixed
    // point the damped iteration creeps toward at critical couplings);
    // the rest: uniform in [-1,1]^n
    std::vector<double> top_dir;
    if (starts >= 2 && n >= 1) {
        const auto dec = eigen_symmetric(a);
        top_dir = dec.eigenvectors.front();
        double amax = 0.0;
        for (const double c : top_dir) amax = std::max(amax, std::abs(c));
        if (amax > 0.0)
            for (double& c : top_dir) c /= amax;
    }

    parallel_for(results.size(), threads, [&](std::size_t s) {
        std::vector<double> x(n, 0.5);
        if (s == 1 && !top_dir.empty()) x = top_dir;
        if (s == 2) x.assign(n, 0.0);
        if (s >= 3) {
            Rng stream = Rng::derive(master, s);
            for (auto& c : x) c = stream.uniform(-1.0, 1.0);
        }
        StartResult& r = results[s];
        bool done = false;
        for (int it = 0; it < kMaxIter && !done; ++it) {
            const std::vector<double> ax = a.apply(x);
            double step = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double target = std::tanh(2.0 * ax[i]);
                const double next = (1.0 - kGamma) * x[i] + kGamma * target;
                step = std::max(step, std::abs(next - x[i]));
                x[i] = next;
            }
            done = step <= kTol;
        }
        const std::vector<double> ax = a.apply(x);
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            res = std::max(res, std::abs(x[i] - std::tanh(2.0 * ax[i])));
        r.x = std::move(x);
        r.residual = res;
        r.converged = done || res <= 1e-8;  // step tolerance, or already stationary
        if (r.converged) r.value = detail::meanfield_objective(a, r.x);
    });

    MeanFieldSolution best;
    best.starts_used = starts;
    double best_residual = kInf;
    for (const auto& r : results) {
        best_residual = std::min(best_residual, r.residual);
        if (!r.converged) continue;
        const double tie = 1e-12 * std::max(1.0, std::abs(best.value));
        const bool better =
            !best.converged || r.value > best.value + tie ||
            (std::abs(r.value - best.value) <= tie && detail::lex_less_rounded(r.x, best.x_star));
        if (better) {
            best.x_star = r.x;
            best.value = r.value;
            best.converged = true;
            best.residual = r.residual;
        }
    }
    if (!best.converged)
        throw convergence_error("meanfield_sup: no start converged (best residual " +
                                std::to_string(best_residual) + ")");
    return best;
}

/// Explicit certificate for the partition-function upper bound
/// logZ <= sup{f - Lambda*} + log|net| + delta, with the net a delta/D-cover
/// of the gradient image 2A [-1,1]^n, D = 2 sqrt(n).
struct CertificateResult {
    double sup = 0.0;
    double log_z = 0.0;
    double net_log_cardinality = 0.0;
    std::uint64_t net_cardinality = 0;
    double delta = 0.0;
    double mesh = 0.0;      // coordinate-grid spacing actually used
    bool bound_ok = false;
    double slack = 0.0;     // sup + log|net| + delta - logZ
};

/// Builds the net by pushing a coordinate grid of [-1,1]^n through 2A one
/// coordinate at a time, pruning within the remaining budget after each step.
/// The grid spacing `mesh` must be fine enough that rounding plus pruning
/// stay below delta/D; pass mesh <= 0 to pick that spacing automatically.
inline CertificateResult partition_certificate(const IsingProblem& problem, double delta,
                                              double mesh = 0.0, int starts = 32,
                                              std::uint64_t seed = 0) {
    const std::size_t n = problem.size();
    if (n > 10) throw resource_error("partition_certificate: n <= 10 (net construction guard)");
    if (!(delta > 0.0)) throw argument_error("partition_certificate: delta > 0 required");
    const SymMatrix& a = problem.coupling;

    const double diam = 2.0 * std::sqrt(static_cast<double>(n));  // diameter of [-1,1]^n
    const double target_mesh = delta / diam;                      // required covering radius

    std::vector<double> col_norm(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a(i, j) * a(i, j);
        col_norm[j] = std::sqrt(s);
    }
    const double norm_sum = std::accumulate(col_norm.begin(), col_norm.end(), 0.0);

    double spacing = mesh;
    if (spacing <= 0.0)
        spacing = (norm_sum > 0.0) ? target_mesh / (2.0 * norm_sum) : 2.0;
    spacing = std::min(spacing, 2.0);

    // rounding each coordinate to its grid contributes (spacing/2) * ||2 a_j||
    const double round_err = spacing * norm_sum;
    if (round_err >= target_mesh)
        throw certification_error("partition_certificate: grid too coarse to certify mesh " +
                                  std::to_string(target_mesh));
    const double prune_radius = (target_mesh - round_err) / static_cast<double>(n);
    const double cell = prune_radius / std::sqrt(static_cast<double>(n));

    constexpr std::size_t kPointBudget = 2'000'000;
    std::vector<std::vector<double>> net{std::vector<double>(n, 0.0)};
    std::vector<std::vector<double>> next;
    std::unordered_map<std::string, bool> seen;

    auto cell_key = [&](const std::vector<double>& p) {
        std::string key;
        key.reserve(n * sizeof(long long));
        for (std::size_t i = 0; i < n; ++i) {
            const long long c = static_cast<long long>(std::floor(p[i] / cell));
            key.append(reinterpret_cast<const char*>(&c), sizeof(c));
        }
        return key;
    };

    for (std::size_t j = 0; j < n; ++j) {
        std::size_t grid_count = 1;
        if (col_norm[j] > 0.0)
            grid_count = static_cast<std::size_t>(std::ceil(2.0 / spacing)) + 1;
        next.clear();
        seen.clear();
        for (const auto& p : net) {
            for (std::size_t g = 0; g < grid_count; ++g) {
                const double xg = (grid_count == 1)
                                      ? 0.0
                                      : -1.0 + 2.0 * static_cast<double>(g) /
                                                   static_cast<double>(grid_count - 1);
                std::vector<double> q(n);
                for (std::size_t i = 0; i < n; ++i) q[i] = p[i] + 2.0 * a(i, j) * xg;
                auto [it, inserted] = seen.emplace(cell_key(q), true);
                if (inserted) {
                    if (next.size() >= kPointBudget)
                        throw certification_error(
                            "partition_certificate: net exceeds the point budget; "
                            "increase mesh or delta");
                    next.push_back(std::move(q));
                }
            }
        }
        net.swap(next);
    }

    Rng rng(seed);
    CertificateResult cert;
    cert.delta = delta;
    cert.mesh = spacing;
    cert.sup = meanfield_sup(problem, starts, rng).value;
    cert.log_z = exact_log_partition(problem);
    cert.net_cardinality = net.size();
    cert.net_log_cardinality = std::log(static_cast<double>(net.size()));
    cert.slack = cert.sup + cert.net_log_cardinality + delta - cert.log_z;
    cert.bound_ok = cert.slack >= -1e-9;
    return cert;
}

/// Mean-field validity diagnostics: spectral quantiles, n^{-1} tr A^2, and
/// the operator norm.
struct SpectralDiagnostics {
    std::vector<double> esd_quantiles;  // 0%, 10%, ..., 100% of the eigenvalues (ascending)
    double hs_norm = 0.0;               // n^{-1} tr A^2
    double op_norm = 0.0;
};

inline SpectralDiagnostics spectral_diagnostics(const SymMatrix& a) {
    SpectralDiagnostics diag;
    const std::size_t n = a.size();
    if (n == 0) return diag;
    auto eigs = eigen_symmetric(a).eigenvalues;
    std::sort(eigs.begin(), eigs.end());
    diag.esd_quantiles.resize(11);
    for (int q = 0; q <= 10; ++q) {
        const std::size_t idx = std::min<std::size_t>(
            n - 1, static_cast<std::size_t>(std::llround(q / 10.0 * (n - 1))));
        diag.esd_quantiles[q] = eigs[idx];
    }
    const double fro = a.frobenius_norm();
    diag.hs_norm = fro * fro / static_cast<double>(n);
    diag.op_norm = std::max(std::abs(eigs.front()), std::abs(eigs.back()));
    return diag;
}

/// Adjacency matrices of the deterministic graph families used by the CLI.
inline SymMatrix star_adjacency(std::size_t n) {
    SymMatrix m(n);
    for (std::size_t i = 1; i < n; ++i) m.set(0, i, 1.0);
    return m;
}

inline SymMatrix cycle_adjacency(std::size_t n) {
    SymMatrix m(n);
    if (n < 2) return m;
    for (std::size_t i = 0; i + 1 < n; ++i) m.set(i, i + 1, 1.0);
    if (n > 2) m.set(0, n - 1, 1.0);
    return m;
}

inline SymMatrix complete_adjacency(std::size_t n) {
    return SymMatrix::constant_offdiag(n, 1.0);
}

}  // namespace ldlab
