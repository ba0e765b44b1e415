#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ldlab/errors.hpp"
#include "ldlab/linalg.hpp"
#include "ldlab/parallel.hpp"
#include "ldlab/rng.hpp"

namespace ldlab {

/// Summary of a constructed epsilon-net: what was covered, how finely, how
/// many points, and the reference upper bound on log-cardinality where the
/// construction has one.
struct NetResult {
    std::string target_desc;
    double mesh = 0.0;
    std::uint64_t cardinality = 0;
    double log_cardinality = 0.0;
    double bound = std::numeric_limits<double>::quiet_NaN();
    double worst_gap = 0.0;          // largest covering distance observed in verification
    std::size_t verification_samples = 0;
};

/// Uniform grid covering [a, b] with spacing <= eps.
struct IntervalNet {
    std::vector<double> points;
    NetResult summary;

    /// Nearest grid point to x.
    double nearest(double x) const {
        if (points.size() == 1) return points.front();
        const double a = points.front();
        const double spacing = points[1] - points[0];
        long i = std::lround((x - a) / spacing);
        if (i < 0) i = 0;
        if (i >= static_cast<long>(points.size())) i = static_cast<long>(points.size()) - 1;
        return points[static_cast<std::size_t>(i)];
    }
};

inline IntervalNet net_interval(double a, double b, double eps) {
    if (!(eps > 0.0)) throw argument_error("net_interval: eps must be > 0");
    if (!(a <= b)) throw argument_error("net_interval: requires a <= b");
    IntervalNet net;
    if (a == b) {
        net.points = {a};
    } else {
        const auto count = static_cast<std::size_t>(std::ceil((b - a) / eps)) + 1;
        net.points.resize(count);
        for (std::size_t i = 0; i < count; ++i)
            net.points[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    net.summary.target_desc = "interval [" + std::to_string(a) + ", " + std::to_string(b) + "]";
    net.summary.mesh = eps;
    net.summary.cardinality = net.points.size();
    net.summary.log_cardinality = std::log(static_cast<double>(net.points.size()));
    net.summary.bound = std::log(std::ceil((b - a) / eps) + 1.0);
    net.summary.worst_gap = (a == b) ? 0.0 : 0.5 * (net.points[1] - net.points[0]);
    return net;
}

/// eps-net of the unit sphere S^{n-1}.
///
/// Construction: radial projection of the cube grid with step h = eps/sqrt(n),
/// keeping grid points within h*sqrt(n)/2 of unit norm. For any unit x the
/// componentwise-rounded grid point g satisfies |x - g| <= h sqrt(n)/2 and
/// |x - g/|g|| <= 2|x - g| <= eps, so coverage is guaranteed and the covering
/// point is found in O(n) by re-rounding. The 2n poles are always included;
/// eps >= 2 degenerates to a single pole.
struct SphereNet {
    std::size_t dim = 0;
    double grid_step = 0.0;
    std::vector<std::vector<double>> points;
    std::unordered_map<std::uint64_t, std::uint32_t> cell_to_point;
    NetResult summary;

    /// Index of a net point within mesh of the unit vector x.
    std::uint32_t cover_index(const std::vector<double>& x) const {
        if (points.size() == 1 || grid_step <= 0.0) return 0;
        const std::uint64_t key = cell_key(x);
        const auto it = cell_to_point.find(key);
        if (it != cell_to_point.end()) return it->second;
        // off-shell rounding can only happen for non-unit queries; fall back to scan
        std::uint32_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::uint32_t i = 0; i < points.size(); ++i) {
            const double d = distance(points[i], x);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        return best;
    }

    double cover_distance(const std::vector<double>& x) const {
        return distance(points[cover_index(x)], x);
    }

    std::uint64_t cell_key(const std::vector<double>& x) const {
        std::uint64_t key = 0;
        for (std::size_t i = 0; i < dim; ++i) {
            const long m = std::lround(x[i] / grid_step);
            key = (key << 8) | static_cast<std::uint64_t>(m + 128);
        }
        return key;
    }

    static double distance(const std::vector<double>& u, const std::vector<double>& v) {
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) s += (u[i] - v[i]) * (u[i] - v[i]);
        return std::sqrt(s);
    }
};

namespace detail {

inline std::vector<double> random_unit_vector(std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (auto& c : v) {
            c = rng.normal();
            norm += c * c;
        }
    } while (norm < 1e-12);
    norm = std::sqrt(norm);
    for (auto& c : v) c /= norm;
    return v;
}

}  // namespace detail

inline SphereNet net_sphere(std::size_t n, double eps, Rng& rng) {
    if (n < 2 || n > 8) throw argument_error("net_sphere: 2 <= n <= 8 (desk-scale guard)");
    if (!(eps > 0.0)) throw argument_error("net_sphere: eps must be > 0");

    SphereNet net;
    net.dim = n;
    net.summary.target_desc = "unit sphere S^" + std::to_string(n - 1);
    net.summary.mesh = eps;
    net.summary.bound = static_cast<double>(n) * std::log(12.0 / std::min(eps, 1.0));

    if (eps >= 2.0) {
        std::vector<double> pole(n, 0.0);
        pole[0] = 1.0;
        net.points.push_back(pole);
    } else {
        const double h = eps / std::sqrt(static_cast<double>(n));
        const double shell = 0.5 * h * std::sqrt(static_cast<double>(n));
        const long m_max = std::lround(std::ceil((1.0 + 0.5 * h) / h));
        if (m_max > 126)
            throw resource_error("net_sphere: grid too fine for the cell index (eps too small)");
        net.grid_step = h;

        constexpr std::size_t kMaxPoints = 20'000'000;
        const double r_hi_sq = (1.0 + shell) * (1.0 + shell);
        const double r_lo = 1.0 - shell;

        // depth-first over grid cells with prefix-norm pruning
        std::vector<long> idx(n, 0);
        std::vector<double> prefix_sq(n + 1, 0.0);
        std::size_t depth = 0;
        idx[0] = -m_max;
        while (true) {
            if (idx[depth] > m_max) {
                if (depth == 0) break;
                --depth;
                ++idx[depth];
                continue;
            }
            const double c = idx[depth] * h;
            const double s = prefix_sq[depth] + c * c;
            if (s > r_hi_sq) {
                // larger |index| only grows the norm once past the minimum; still scan linearly
                ++idx[depth];
                continue;
            }
            if (depth + 1 < n) {
                prefix_sq[depth + 1] = s;
                ++depth;
                idx[depth] = -m_max;
                continue;
            }
            const double norm = std::sqrt(s);
            if (norm >= r_lo) {
                if (net.points.size() >= kMaxPoints)
                    throw resource_error("net_sphere: net exceeds the point budget");
                std::vector<double> p(n);
                std::uint64_t key = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    p[i] = idx[i] * h / norm;
                    key = (key << 8) | static_cast<std::uint64_t>(idx[i] + 128);
                }
                net.cell_to_point.emplace(key, static_cast<std::uint32_t>(net.points.size()));
                net.points.push_back(std::move(p));
            }
            ++idx[depth];
        }
        // pole points
        for (std::size_t i = 0; i < n; ++i) {
            for (const double sgn : {1.0, -1.0}) {
                std::vector<double> pole(n, 0.0);
                pole[i] = sgn;
                net.points.push_back(std::move(pole));
            }
        }
    }

    net.summary.cardinality = net.points.size();
    net.summary.log_cardinality = std::log(static_cast<double>(net.points.size()));

    // verification on fresh random sphere points
    const std::size_t samples = 10000;
    double worst = 0.0;
    std::vector<double> worst_point;
    for (std::size_t s = 0; s < samples; ++s) {
        const auto x = detail::random_unit_vector(n, rng);
        const double d = net.cover_distance(x);
        if (d > worst) {
            worst = d;
            worst_point = x;
        }
    }
    net.summary.worst_gap = worst;
    net.summary.verification_samples = samples;
    if (worst > std::min(eps, 2.0)) {
        std::string coords;
        for (const double c : worst_point) coords += std::to_string(c) + " ";
        throw construction_error("net_sphere: verification failed, worst gap " +
                                 std::to_string(worst) + " at point " + coords);
    }
    return net;
}

/// eps-net of the rank-<=k operator-norm unit ball, assembled as
/// sum_i mu_i v_i v_i^T with mu_i from an eps/2k interval net of [-1,1] and
/// v_i from an eps/4k sphere net. Points are not materialized (the product
/// set is astronomically large); covering queries round factor by factor.
struct LowRankNet {
    std::size_t dim = 0;
    std::size_t rank = 0;
    IntervalNet coefficients;
    SphereNet directions;
    NetResult summary;

    /// Covering distance for Y given as eigenvalue/eigenvector factors
    /// (mu_i in [-1,1], v_i unit vectors).
    double cover_distance(const std::vector<double>& mu,
                          const std::vector<std::vector<double>>& dirs) const {
        const std::size_t n = dim;
        // Frobenius distance || sum mu_i v_i v_i^T - sum mu_hat_i vhat_i vhat_i^T ||
        std::vector<double> diff(n * n, 0.0);
        for (std::size_t r = 0; r < mu.size(); ++r) {
            const double mh = coefficients.nearest(mu[r]);
            const auto& v = dirs[r];
            const auto& w = directions.points[directions.cover_index(v)];
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    diff[i * n + j] += mu[r] * v[i] * v[j] - mh * w[i] * w[j];
        }
        double s = 0.0;
        for (const double d : diff) s += d * d;
        return std::sqrt(s);
    }
};

/// Draws mu in [-1,1]^k and a random orthonormal k-frame (Haar via
/// Gram-Schmidt on Gaussians).
inline void random_rank_k_factors(std::size_t n, std::size_t k, Rng& rng,
                                  std::vector<double>& mu,
                                  std::vector<std::vector<double>>& dirs) {
    mu.resize(k);
    dirs.assign(k, {});
    for (std::size_t r = 0; r < k; ++r) {
        mu[r] = rng.uniform(-1.0, 1.0);
        while (true) {
            std::vector<double> v(n);
            for (auto& c : v) c = rng.normal();
            for (std::size_t s = 0; s < r; ++s) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += v[i] * dirs[s][i];
                for (std::size_t i = 0; i < n; ++i) v[i] -= dot * dirs[s][i];
            }
            double norm = 0.0;
            for (const double c : v) norm += c * c;
            if (norm > 1e-12) {
                norm = std::sqrt(norm);
                for (auto& c : v) c /= norm;
                dirs[r] = std::move(v);
                break;
            }
        }
    }
}

inline LowRankNet net_lowrank(std::size_t n, std::size_t k, double eps, Rng& rng) {
    if (n < 2 || n > 6) throw argument_error("net_lowrank: 2 <= n <= 6 (desk-scale guard)");
    if (k < 1 || k > 2) throw argument_error("net_lowrank: 1 <= k <= 2 (desk-scale guard)");
    if (!(eps > 0.0 && eps < 1.0)) throw argument_error("net_lowrank: eps in (0,1) required");

    const double kk = static_cast<double>(k);
    LowRankNet net;
    net.dim = n;
    net.rank = k;
    net.coefficients = net_interval(-1.0, 1.0, eps / (2.0 * kk));
    net.directions = net_sphere(n, eps / (4.0 * kk), rng);

    const auto ecard = static_cast<unsigned __int128>(net.coefficients.points.size());
    const auto fcard = static_cast<unsigned __int128>(net.directions.points.size());
    unsigned __int128 card = 1;
    for (std::size_t r = 0; r < k; ++r) {
        card *= ecard * fcard;
        if (card > static_cast<unsigned __int128>(UINT64_MAX))
            throw resource_error("net_lowrank: cardinality exceeds 64-bit range");
    }
    net.summary.target_desc = "rank-" + std::to_string(k) + " operator-norm ball, n = " +
                              std::to_string(n);
    net.summary.mesh = eps;
    net.summary.cardinality = static_cast<std::uint64_t>(card);
    net.summary.log_cardinality =
        kk * (std::log(static_cast<double>(net.coefficients.points.size())) +
              std::log(static_cast<double>(net.directions.points.size())));
    net.summary.bound = 2.0 * static_cast<double>(n) * kk * std::log(12.0 * kk / eps);

    // verification on random rank-<=k matrices with operator norm <= 1
    const std::size_t samples = 10000;
    double worst = 0.0;
    std::vector<double> mu;
    std::vector<std::vector<double>> dirs;
    for (std::size_t s = 0; s < samples; ++s) {
        random_rank_k_factors(n, k, rng, mu, dirs);
        worst = std::max(worst, net.cover_distance(mu, dirs));
    }
    net.summary.worst_gap = worst;
    net.summary.verification_samples = samples;
    if (worst > eps)
        throw construction_error("net_lowrank: verification failed, worst gap " +
                                 std::to_string(worst));
    return net;
}

/// Monte Carlo estimate with its standard error.
struct MeanWidthEstimate {
    double value = 0.0;
    double std_err = 0.0;
    int trials = 0;
};

/// Gaussian mean-width of A [-1,1]^n: E sup_{x in [-1,1]^n} <Ax, Gamma>
/// = E ||A Gamma||_1 for symmetric A. Per-trial streams are derived from one
/// master seed drawn off rng, so the result is independent of thread count.
inline MeanWidthEstimate gaussian_mean_width(const SymMatrix& a, int trials, Rng& rng,
                                             int threads = 1) {
    if (trials < 100) throw argument_error("gaussian_mean_width: trials >= 100 required");
    const std::size_t n = a.size();
    const std::uint64_t master = rng.next_u64();
    std::vector<double> slot(static_cast<std::size_t>(trials));
    parallel_for(slot.size(), threads, [&](std::size_t t) {
        Rng stream = Rng::derive(master, t);
        std::vector<double> gamma(n);
        for (auto& g : gamma) g = stream.normal();
        const std::vector<double> ag = a.apply(gamma);
        double s = 0.0;
        for (const double v : ag) s += std::abs(v);
        slot[t] = s;
    });
    MeanWidthEstimate est;
    est.trials = trials;
    est.value = compensated_sum(slot) / trials;
    double ss = 0.0;
    for (const double v : slot) ss += (v - est.value) * (v - est.value);
    est.std_err = std::sqrt(ss / trials / std::max(1, trials - 1));
    return est;
}

}  // namespace ldlab
