#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ldlab/errors.hpp"
#include "ldlab/linalg.hpp"
#include "ldlab/measures.hpp"
#include "ldlab/parallel.hpp"
#include "ldlab/rng.hpp"

namespace ldlab {

/// Upper-tail instance for d-cycle counts in G(n, p): the event
/// tr(X^d) >= t (np)^d at speed v_n = n^2 p^2 log(1/p).
struct CycleProblem {
    std::size_t n;
    double p;
    unsigned d;
    double t;

    CycleProblem(std::size_t n_, double p_, unsigned d_, double t_)
        : n(n_), p(p_), d(d_), t(t_) {
        if (n < 3) throw argument_error("CycleProblem: n >= 3 required");
        if (!(p > 0.0 && p < 1.0)) throw argument_error("CycleProblem: p in (0,1) required");
        if (d < 3) throw argument_error("CycleProblem: d >= 3 required");
        if (!(t >= 1.0)) throw argument_error("CycleProblem: t >= 1 required");
    }

    double speed() const {
        return static_cast<double>(n) * static_cast<double>(n) * p * p * std::log(1.0 / p);
    }

    double trace_target() const {
        return t * std::pow(static_cast<double>(n) * p, static_cast<double>(d));
    }
};

/// Entrywise Bernoulli relative entropy Lambda*_p(Y) = sum_{i<j} I_p(Y_ij).
/// Requires a zero diagonal and entries in [0, 1].
inline double lambda_star_p(const SymMatrix& y, double p) {
    if (!(p > 0.0 && p < 1.0)) throw argument_error("lambda_star_p: p in (0,1) required");
    if (!y.has_zero_diagonal()) throw argument_error("lambda_star_p: diagonal must be zero");
    const ScalarLaw law = ScalarLaw::bernoulli(p);
    const std::size_t n = y.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = y(i, j);
            if (v < 0.0 || v > 1.0)
                throw argument_error("lambda_star_p: entry outside [0,1]");
            s += legendre(law, v);
        }
    }
    return s;
}

namespace detail {

// Independent k-subsets of a path with m vertices, all k at once.
inline std::vector<std::uint64_t> independent_sets_path(unsigned m) {
    std::vector<std::uint64_t> prev{1};   // empty path
    std::vector<std::uint64_t> cur{1, 1}; // one vertex: {}, {v}
    if (m == 0) return prev;
    for (unsigned v = 2; v <= m; ++v) {
        std::vector<std::uint64_t> next(cur.size() + 1, 0);
        for (std::size_t k = 0; k < cur.size(); ++k) next[k] += cur[k];      // v unused
        for (std::size_t k = 0; k < prev.size(); ++k) next[k + 1] += prev[k]; // v used
        while (next.back() == 0) next.pop_back();
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

}  // namespace detail

/// Coefficients i_k of the independence polynomial of the d-cycle
/// (transfer DP: split on whether vertex 0 is in the set).
inline std::vector<std::uint64_t> independence_polynomial_cycle(unsigned d) {
    if (d < 3 || d > 20)
        throw argument_error("independence_polynomial_cycle: 3 <= d <= 20 required");
    const auto without_v0 = detail::independent_sets_path(d - 1);
    const auto with_v0 = detail::independent_sets_path(d - 3);
    std::vector<std::uint64_t> coeffs(std::max(without_v0.size(), with_v0.size() + 1), 0);
    for (std::size_t k = 0; k < without_v0.size(); ++k) coeffs[k] += without_v0[k];
    for (std::size_t k = 0; k < with_v0.size(); ++k) coeffs[k + 1] += with_v0[k];
    while (coeffs.back() == 0) coeffs.pop_back();
    return coeffs;
}

inline double independence_polynomial_value(const std::vector<std::uint64_t>& coeffs,
                                            double theta) {
    double v = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;)
        v = v * theta + static_cast<double>(coeffs[k]);
    return v;
}

/// Unique nonnegative root of P_{C_d}(theta) = t; P is strictly increasing on
/// [0, inf) with P(0) = 1. Bisection to |P(theta) - t| <= 1e-12 t.
inline double theta_t(unsigned d, double t) {
    if (!(t >= 1.0)) throw domain_error("theta_t: t >= 1 required");
    if (t == 1.0) return 0.0;
    const auto coeffs = independence_polynomial_cycle(d);
    double lo = 0.0, hi = 1.0;
    while (independence_polynomial_value(coeffs, hi) < t) hi *= 2.0;
    // bisect down to the last ulp; the required residual 1e-12 t follows
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = independence_polynomial_value(coeffs, mid);
        if (v < t) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

enum class SparsityRegime { Dense, Sparse };

/// Limiting upper-tail rate Phi(t) of d-cycle counts:
/// min(theta_t, (1/2)(t-1)^{2/d}) for p >> n^{-1/2}, and the clique term
/// alone for n^{-1} << p << n^{-1/2}.
inline double cycle_rate_Phi(unsigned d, double t, SparsityRegime regime) {
    if (!(t >= 1.0)) throw domain_error("cycle_rate_Phi: t >= 1 required");
    const double clique = 0.5 * std::pow(t - 1.0, 2.0 / d);
    if (regime == SparsityRegime::Sparse) return clique;
    return std::min(theta_t(d, t), clique);
}

/// Weighted-graph candidate for the variational problem phi_n(t).
struct CandidateMatrix {
    enum class Kind { Clique, Hub, Numeric };

    SymMatrix matrix;
    Kind kind = Kind::Numeric;
    std::size_t planted_size = 0;  // r (clique) or s (hub)
    double cost = 0.0;             // Lambda*_p(Y)
    double cost_over_vn = 0.0;
    double trace_ratio = 0.0;      // tr(Y^d) / (np)^d
};

namespace detail {

// tr(Y^d) for the two-block candidates. Blocks of size b and n-b reduce to a
// 2x2 matrix on block-constant vectors plus explicit perpendicular
// eigenvalues -in1 (mult b-1) and -in2 (mult n-b-1).
inline double block_candidate_trace(double m11, double m12, double m21, double m22,
                                    double in1, double in2, std::size_t b, std::size_t n,
                                    unsigned d) {
    const double tr = m11 + m22;
    const double det = m11 * m22 - m12 * m21;
    const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
    const double lp = 0.5 * (tr + disc);
    const double lm = 0.5 * (tr - disc);
    const double dd = static_cast<double>(d);
    return std::pow(lp, dd) + std::pow(lm, dd) +
           (static_cast<double>(b) - 1.0) * std::pow(-in1, dd) +
           (static_cast<double>(n) - static_cast<double>(b) - 1.0) * std::pow(-in2, dd);
}

}  // namespace detail

/// Clique candidate: entries 1 when both endpoints lie in the first
/// r = ceil((t-1)^{1/d} np) vertices, p elsewhere.
inline CandidateMatrix planted_clique(const CycleProblem& prob) {
    const double r_real = std::pow(prob.t - 1.0, 1.0 / prob.d) * prob.n * prob.p;
    const auto r = static_cast<std::size_t>(std::ceil(r_real));
    if (r > prob.n)
        throw infeasible_error("planted_clique: r = " + std::to_string(r) + " exceeds n");

    CandidateMatrix cand;
    cand.kind = CandidateMatrix::Kind::Clique;
    cand.planted_size = r;
    cand.matrix = SymMatrix::constant_offdiag(prob.n, prob.p);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i + 1; j < r; ++j) cand.matrix.set(i, j, 1.0);

    const double pairs = 0.5 * static_cast<double>(r) * (static_cast<double>(r) - 1.0);
    cand.cost = pairs * std::log(1.0 / prob.p);
    cand.cost_over_vn = cand.cost / prob.speed();
    const double nn = static_cast<double>(prob.n);
    const double rr = static_cast<double>(r);
    const double tr = detail::block_candidate_trace(
        rr - 1.0, prob.p * (nn - rr), prob.p * rr, prob.p * (nn - rr - 1.0), 1.0, prob.p, r,
        prob.n, prob.d);
    cand.trace_ratio = tr / std::pow(nn * prob.p, static_cast<double>(prob.d));
    return cand;
}

/// Hub (anti-clique) candidate: entries 1 when the smaller endpoint lies in
/// the first s = ceil(theta_t n p^2) vertices, p elsewhere.
inline CandidateMatrix planted_hub(const CycleProblem& prob) {
    const double s_real = theta_t(prob.d, prob.t) * prob.n * prob.p * prob.p;
    const auto s = static_cast<std::size_t>(std::ceil(s_real));
    if (s > prob.n)
        throw infeasible_error("planted_hub: s = " + std::to_string(s) + " exceeds n");

    CandidateMatrix cand;
    cand.kind = CandidateMatrix::Kind::Hub;
    cand.planted_size = s;
    cand.matrix = SymMatrix::constant_offdiag(prob.n, prob.p);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = i + 1; j < prob.n; ++j) cand.matrix.set(i, j, 1.0);

    const double ss = static_cast<double>(s);
    const double nn = static_cast<double>(prob.n);
    const double ones = 0.5 * ss * (ss - 1.0) + ss * (nn - ss);
    cand.cost = ones * std::log(1.0 / prob.p);
    cand.cost_over_vn = cand.cost / prob.speed();
    const double tr = detail::block_candidate_trace(
        ss - 1.0, nn - ss, ss, prob.p * (nn - ss - 1.0), 1.0, prob.p, s, prob.n, prob.d);
    cand.trace_ratio = tr / std::pow(nn * prob.p, static_cast<double>(prob.d));
    return cand;
}

/// d * (Y^{d-1}) with off-diagonal entries doubled and zero diagonal: the
/// gradient of tr(Y^d) with respect to the independent pair variables of a
/// zero-diagonal symmetric matrix.
inline SymMatrix trace_power_gradient(const SymMatrix& y, unsigned d) {
    if (d < 1) throw argument_error("trace_power_gradient: d >= 1 required");
    const SymMatrix ypow = sym_power(y, d - 1);
    SymMatrix g(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        for (std::size_t j = i + 1; j < y.size(); ++j)
            g.set(i, j, 2.0 * static_cast<double>(d) * ypow(i, j));
    return g;
}

/// Penalty-method solver configuration for numeric_phi.
struct PhiConfig {
    int outer_rounds = 6;
    int max_inner = 250;
    int random_starts = 3;
    double mu0 = 100.0;      // initial weight on the squared relative hinge
    double feas_tol = 1e-8;  // allowed relative trace shortfall
    std::uint64_t seed = 0;
    int threads = 1;
};

namespace detail {

struct PhiState {
    std::vector<double> z;  // pair variables, logistic-mapped into (p_floor, 1)
};

struct PhiObjective {
    std::size_t n;
    double p;
    unsigned d;
    double target;
    double p_floor;
    double logit_p;

    static double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

    SymMatrix to_matrix(const std::vector<double>& z) const {
        SymMatrix y(n);
        std::size_t v = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                y.set(i, j, p_floor + (1.0 - p_floor) * sigmoid(z[v++]));
        return y;
    }

    // cost + mu * hinge^2, with the gradient in z when grad != nullptr
    double eval(const std::vector<double>& z, double mu, std::vector<double>* grad,
                double* cost_out = nullptr, double* trace_out = nullptr) const {
        const SymMatrix y = to_matrix(z);
        const SymMatrix ypow = sym_power(y, d - 1);
        const double tr = trace_product(ypow, y);
        const ScalarLaw law = ScalarLaw::bernoulli(p);
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) cost += legendre(law, y(i, j));
        const double hinge = std::max(0.0, (target - tr) / target);
        const double value = cost + mu * hinge * hinge;
        if (cost_out) *cost_out = cost;
        if (trace_out) *trace_out = tr;
        if (grad) {
            grad->assign(z.size(), 0.0);
            std::size_t v = 0;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i + 1; j < n; ++j, ++v) {
                    const double yij = y(i, j);
                    double g = std::log(yij / (1.0 - yij)) - logit_p;
                    if (hinge > 0.0)
                        g -= mu * 2.0 * hinge * 2.0 * d * ypow(i, j) / target;
                    const double s = (yij - p_floor) / (1.0 - p_floor);
                    (*grad)[v] = g * (1.0 - p_floor) * s * (1.0 - s);
                }
            }
        }
        return value;
    }
};

}  // namespace detail

/// Approximate minimizer of Lambda*_p(Y) subject to tr(Y^d) >= t (np)^d over
/// zero-diagonal symmetric matrices.
///
/// Penalty method: entries live in (p/10, 1) through a logistic map, the
/// constraint enters as mu * hinge^2 with mu growing tenfold per outer round,
/// and each round runs gradient descent with Armijo backtracking. Starts:
/// planted clique, planted hub, uniform-p, and random perturbations. The
/// returned candidate is the cheapest FEASIBLE point seen anywhere (starts
/// included), so it can only improve on the planted candidates.
inline CandidateMatrix numeric_phi(const CycleProblem& prob, const PhiConfig& config = {}) {
    if (prob.n > 60) throw resource_error("numeric_phi: n <= 60 (dense optimization guard)");
    const std::size_t n = prob.n;
    const double target = prob.trace_target();

    detail::PhiObjective obj;
    obj.n = n;
    obj.p = prob.p;
    obj.d = prob.d;
    obj.target = target;
    obj.p_floor = prob.p / 10.0;
    obj.logit_p = std::log(prob.p / (1.0 - prob.p));

    const double feas_cut = target * (1.0 - config.feas_tol);
    const auto is_feasible = [&](double tr) { return tr >= feas_cut; };

    // best feasible point seen anywhere, matrices compared in natural units
    struct Best {
        bool found = false;
        double cost = kInf;
        SymMatrix y;
        double trace = 0.0;
        int branch = -1;
        double violation = kInf;  // smallest relative trace shortfall seen
    };

    const auto z_from_matrix = [&](const SymMatrix& y) {
        std::vector<double> z;
        z.reserve(n * (n - 1) / 2);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                double s = (y(i, j) - obj.p_floor) / (1.0 - obj.p_floor);
                s = std::min(std::max(s, 1e-13), 1.0 - 1e-13);
                z.push_back(std::log(s / (1.0 - s)));
            }
        }
        return z;
    };

    // assemble the start list: planted candidates (when feasible to plant),
    // uniform-p, and random perturbations
    std::vector<std::vector<double>> starts;
    try {
        starts.push_back(z_from_matrix(planted_clique(prob).matrix));
    } catch (const infeasible_error&) {
    }
    try {
        starts.push_back(z_from_matrix(planted_hub(prob).matrix));
    } catch (const infeasible_error&) {
    }
    starts.push_back(z_from_matrix(SymMatrix::constant_offdiag(n, prob.p)));
    for (int r = 0; r < config.random_starts; ++r) {
        Rng stream = Rng::derive(config.seed, 1000 + r);
        SymMatrix y = SymMatrix::constant_offdiag(n, prob.p);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double v = prob.p * (1.0 + 0.5 * stream.uniform(-1.0, 1.0)) +
                                 0.3 * stream.uniform01();
                y.set(i, j, std::min(std::max(v, obj.p_floor * 1.5), 1.0 - 1e-9));
            }
        starts.push_back(z_from_matrix(y));
    }

    std::vector<Best> branch_best(starts.size());
    double global_violation = kInf;

    parallel_for(starts.size(), config.threads, [&](std::size_t b) {
        std::vector<double> z = starts[b];
        Best& best = branch_best[b];
        best.branch = static_cast<int>(b);

        const auto consider = [&](const std::vector<double>& zz) {
            double cost, tr;
            obj.eval(zz, 0.0, nullptr, &cost, &tr);
            best.violation = std::min(best.violation, std::max(0.0, (target - tr) / target));
            if (is_feasible(tr) && cost < best.cost) {
                best.found = true;
                best.cost = cost;
                best.y = obj.to_matrix(zz);
                best.trace = tr;
            }
        };
        consider(z);

        double mu = config.mu0;
        std::vector<double> grad, trial;
        for (int round = 0; round < config.outer_rounds; ++round, mu *= 10.0) {
            double value = obj.eval(z, mu, &grad);
            for (int it = 0; it < config.max_inner; ++it) {
                double gnorm2 = 0.0, gmax = 0.0;
                for (const double g : grad) {
                    gnorm2 += g * g;
                    gmax = std::max(gmax, std::abs(g));
                }
                if (gmax <= 1e-9 * std::max(1.0, std::abs(value))) break;
                double step = 1.0 / std::max(1.0, std::sqrt(gnorm2));
                bool accepted = false;
                for (int bt = 0; bt < 40; ++bt, step *= 0.5) {
                    trial.resize(z.size());
                    for (std::size_t v = 0; v < z.size(); ++v) {
                        // projection onto the z-box keeps the logistic map away
                        // from saturation
                        trial[v] = std::min(36.0, std::max(-36.0, z[v] - step * grad[v]));
                    }
                    const double tv = obj.eval(trial, mu, nullptr);
                    if (tv <= value - 1e-4 * step * gnorm2) {
                        z.swap(trial);
                        value = obj.eval(z, mu, &grad);
                        accepted = true;
                        break;
                    }
                }
                if (!accepted) break;
            }
            consider(z);
        }

        // feasibility restoration: blend toward the all-ones matrix until the
        // trace constraint holds, then record the restored point
        double cost, tr;
        obj.eval(z, 0.0, nullptr, &cost, &tr);
        if (!is_feasible(tr)) {
            const SymMatrix y0 = obj.to_matrix(z);
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                SymMatrix ym(n);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = i + 1; j < n; ++j)
                        ym.set(i, j, (1.0 - mid) * y0(i, j) + mid * (1.0 - 1e-12));
                if (is_feasible(trace_power_mult(ym, prob.d))) hi = mid; else lo = mid;
            }
            SymMatrix ym(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    ym.set(i, j, (1.0 - hi) * y0(i, j) + hi * (1.0 - 1e-12));
            consider(z_from_matrix(ym));
        }
    });

    Best winner;
    for (const auto& b : branch_best) {
        global_violation = std::min(global_violation, b.violation);
        if (!b.found) continue;
        if (!winner.found || b.cost < winner.cost - 1e-15 ||
            (std::abs(b.cost - winner.cost) <= 1e-15 && b.branch < winner.branch)) {
            winner = b;
        }
    }
    if (!winner.found)
        throw infeasible_error("numeric_phi: no feasible candidate found (best violation " +
                               std::to_string(global_violation) + ")");

    CandidateMatrix out;
    out.kind = CandidateMatrix::Kind::Numeric;
    out.matrix = winner.y;
    out.cost = winner.cost;
    out.cost_over_vn = winner.cost / prob.speed();
    out.trace_ratio = winner.trace /
                      std::pow(static_cast<double>(n) * prob.p, static_cast<double>(prob.d));
    return out;
}

/// Erdős–Rényi adjacency sample: symmetric 0/1, zero diagonal.
inline SymMatrix er_sample(std::size_t n, double p, Rng& rng) {
    if (!(p >= 0.0 && p <= 1.0)) throw argument_error("er_sample: p in [0,1] required");
    SymMatrix x(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.bernoulli(p)) x.set(i, j, 1.0);
    return x;
}

/// tr(A^d) for a 0/1 adjacency matrix: exact 64-bit integer path for n <= 20,
/// spectral for larger n. Entries of A^d are path counts bounded by n^{d-1},
/// so the integer path also needs n^d to fit in 64 bits.
inline double adjacency_trace_power(const SymMatrix& a, unsigned d) {
    const std::size_t n = a.size();
    if (n > 20 || std::pow(static_cast<double>(n), static_cast<double>(d)) > 9.0e18)
        return trace_power(a, d);
    std::vector<std::int64_t> cur(n * n), base(n * n), next(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            base[i * n + j] = static_cast<std::int64_t>(a(i, j));
            cur[i * n + j] = base[i * n + j];
        }
    for (unsigned e = 1; e < d; ++e) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                std::int64_t s = 0;
                for (std::size_t k = 0; k < n; ++k) s += cur[i * n + k] * base[k * n + j];
                next[i * n + j] = s;
            }
        cur.swap(next);
    }
    std::int64_t tr = 0;
    for (std::size_t i = 0; i < n; ++i) tr += cur[i * n + i];
    return static_cast<double>(tr);
}

/// Monte Carlo summary of the normalized cycle-count statistic.
struct TraceTailResult {
    double mean = 0.0;            // mean of tr(X^d) / (np)^d
    double std_err = 0.0;
    std::vector<double> levels;
    std::vector<double> tail_freq;  // P_hat(tr(X^d) >= level (np)^d)
};

inline TraceTailResult trace_tail_mc(const CycleProblem& prob, std::vector<double> levels,
                                     std::size_t trials, Rng& rng, int threads = 1) {
    if (trials < 100) throw argument_error("trace_tail_mc: trials >= 100 required");
    const double denom =
        std::pow(static_cast<double>(prob.n) * prob.p, static_cast<double>(prob.d));
    const std::uint64_t master = rng.next_u64();
    std::vector<double> ratios(trials);
    parallel_for(trials, threads, [&](std::size_t trial) {
        Rng stream = Rng::derive(master, trial);
        const SymMatrix x = er_sample(prob.n, prob.p, stream);
        ratios[trial] = adjacency_trace_power(x, prob.d) / denom;
    });
    TraceTailResult res;
    res.levels = std::move(levels);
    res.mean = compensated_sum(ratios) / static_cast<double>(trials);
    double ss = 0.0;
    for (const double r : ratios) ss += (r - res.mean) * (r - res.mean);
    res.std_err = std::sqrt(ss / static_cast<double>(trials - 1)) /
                  std::sqrt(static_cast<double>(trials));
    res.tail_freq.resize(res.levels.size());
    for (std::size_t k = 0; k < res.levels.size(); ++k) {
        std::size_t hits = 0;
        for (const double r : ratios)
            if (r >= res.levels[k]) ++hits;
        res.tail_freq[k] = static_cast<double>(hits) / static_cast<double>(trials);
    }
    return res;
}

}  // namespace ldlab
