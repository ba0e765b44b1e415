#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ldlab/errors.hpp"
#include "ldlab/linalg.hpp"
#include "ldlab/measures.hpp"
#include "ldlab/nets.hpp"
#include "ldlab/parallel.hpp"
#include "ldlab/rng.hpp"

namespace ldlab {

/// Exact m-th Catalan number; range_error once it leaves 64 bits (m > 36).
inline std::uint64_t catalan(unsigned m) {
    unsigned __int128 c = 1;
    for (unsigned i = 0; i < m; ++i) {
        c = c * (4u * i + 2u) / (i + 2u);
        if (c > static_cast<unsigned __int128>(UINT64_MAX))
            throw range_error("catalan: C_" + std::to_string(m) + " exceeds 64-bit range");
    }
    return static_cast<std::uint64_t>(c);
}

/// d-th moment of the semicircle law: C_{d/2} for even d, 0 for odd d.
inline double semicircle_moment(unsigned d) {
    if (d < 1) throw argument_error("semicircle_moment: d >= 1 required");
    if (d % 2 == 1) return 0.0;
    return static_cast<double>(catalan(d / 2));
}

/// Universal rate function for traces of sharp sub-Gaussian Wigner matrices:
/// (beta/4)(x - C_{d/2})^{2/d} above the semicircle moment for even d
/// (+infinity below it), (beta/4)|x|^{2/d} for odd d.
inline double rate_J(unsigned d, int beta, double x) {
    if (d < 3) throw argument_error("rate_J: d >= 3 required");
    if (beta != 1 && beta != 2) throw argument_error("rate_J: beta must be 1 or 2");
    const double b4 = beta / 4.0;
    if (d % 2 == 1) return b4 * std::pow(std::abs(x), 2.0 / d);
    const double c = semicircle_moment(d);
    if (x < c) return kInf;
    return b4 * std::pow(x - c, 2.0 / d);
}

/// Truncated trace functional f_k: for even d, (1/n) tr_[k] (Y/sqrt n)^d;
/// for odd d, (1/n)(tr_[k](Y_+/sqrt n)^d - tr_[k](Y_-/sqrt n)^d), with tr_[k]
/// the sum of the k largest eigenvalues of the indicated power.
inline double truncated_trace(const SymMatrix& y, std::size_t k, unsigned d) {
    const std::size_t n = y.size();
    if (k < 1 || k > n) throw argument_error("truncated_trace: 1 <= k <= n required");
    if (d < 1) throw argument_error("truncated_trace: d >= 1 required");
    const auto eig = eigen_symmetric(y).eigenvalues;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));

    if (d % 2 == 0) {
        std::vector<double> powers(n);
        for (std::size_t i = 0; i < n; ++i)
            powers[i] = std::pow(std::abs(eig[i]) * scale, static_cast<double>(d));
        std::sort(powers.rbegin(), powers.rend());
        double s = 0.0;
        for (std::size_t i = 0; i < k; ++i) s += powers[i];
        return s / static_cast<double>(n);
    }
    std::vector<double> pos, neg;
    pos.reserve(n);
    neg.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        pos.push_back(std::pow(std::max(eig[i], 0.0) * scale, static_cast<double>(d)));
        neg.push_back(std::pow(std::max(-eig[i], 0.0) * scale, static_cast<double>(d)));
    }
    std::sort(pos.rbegin(), pos.rend());
    std::sort(neg.rbegin(), neg.rend());
    double sp = 0.0, sn = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sp += pos[i];
        sn += neg[i];
    }
    return (sp - sn) / static_cast<double>(n);
}

/// Constant-off-diagonal candidate with tr(Y^d) = x n^{1+d/2}.
///
/// Eigenvalues are (n-1)y once and -y with multiplicity n-1, so the exact
/// denominator in y is (n-1)^d + (n-1) for even d and (n-1)^d - (n-1) for
/// odd d (the latter corrects the sign of the second term).
struct UniformShiftCandidate {
    SymMatrix matrix;
    double offdiag = 0.0;      // the common entry y
    double trace_check = 1.0;  // tr(Y^d) / (x n^{1+d/2}), recomputed by matrix powers
    double cost = 0.0;         // sum_{i<j} Lambda*_entry(y) / n^{1+2/d}
};

inline UniformShiftCandidate uniform_shift_candidate(const ScalarLaw& entry_law, std::size_t n,
                                                     unsigned d, double x) {
    if (n < 2) throw argument_error("uniform_shift_candidate: n >= 2 required");
    if (d < 2) throw argument_error("uniform_shift_candidate: d >= 2 required");
    if (!(x >= 0.0)) throw argument_error("uniform_shift_candidate: x >= 0 required");

    UniformShiftCandidate cand;
    const double nn = static_cast<double>(n);
    if (x == 0.0) {
        cand.matrix = SymMatrix(n);
        return cand;
    }
    const double m = nn - 1.0;
    const double denom =
        (d % 2 == 0) ? std::pow(m, static_cast<double>(d)) + m
                     : std::pow(m, static_cast<double>(d)) - m;
    const double y = std::pow(x / denom, 1.0 / d) * std::pow(nn, 0.5 + 1.0 / d);
    cand.offdiag = y;
    cand.matrix = SymMatrix::constant_offdiag(n, y);
    cand.trace_check = trace_power_mult(cand.matrix, d) / (x * std::pow(nn, 1.0 + 0.5 * d));
    const double pairs = 0.5 * nn * m;
    cand.cost = pairs * legendre(entry_law, y) / std::pow(nn, 1.0 + 2.0 / d);
    return cand;
}

/// Wigner ensemble: independent entries up to symmetry, unit off-diagonal
/// variance (checked analytically per family).
struct WignerEnsemble {
    std::size_t n;
    ScalarLaw entry_law;
    ScalarLaw diag_law;

    WignerEnsemble(std::size_t n_, ScalarLaw entry, ScalarLaw diag)
        : n(n_), entry_law(entry), diag_law(diag) {
        if (std::abs(entry_law.variance() - 1.0) > 1e-12)
            throw argument_error("WignerEnsemble: entry law must have unit variance, got " +
                                 std::to_string(entry_law.variance()));
    }

    static WignerEnsemble rademacher(std::size_t n) {
        return WignerEnsemble(n, ScalarLaw::rademacher(), ScalarLaw::rademacher());
    }
    static WignerEnsemble gaussian(std::size_t n) {
        return WignerEnsemble(n, ScalarLaw::gaussian(1.0), ScalarLaw::gaussian(1.0));
    }
    static WignerEnsemble uniform(std::size_t n) {
        return WignerEnsemble(n, ScalarLaw::uniform_sym(std::sqrt(3.0)),
                              ScalarLaw::uniform_sym(std::sqrt(3.0)));
    }
};

/// i.i.d. upper triangle from the entry law, diagonal from the diagonal law.
inline SymMatrix wigner_sample(const WignerEnsemble& e, Rng& rng) {
    SymMatrix x(e.n);
    for (std::size_t i = 0; i < e.n; ++i)
        for (std::size_t j = i; j < e.n; ++j)
            x.set(i, j, i == j ? e.diag_law.sample(rng) : e.entry_law.sample(rng));
    return x;
}

/// Importance-sampling estimate of P((1/n) tr(X/sqrt n)^d >= t).
struct TailEstimate {
    double prob_est = 0.0;
    double std_err = 0.0;
    double rate_est = 0.0;   // -log(prob_est) / n^{1+2/d}
    double ess = 0.0;        // effective sample size of the weights
    bool reliable = true;    // false when ess < 10
    double shift_y = 0.0;    // off-diagonal mean of the tilt target
    double tilt_lambda = 0.0;
};

/// Tilts each off-diagonal entry toward the uniform-shift candidate mean for
/// x = max(t, 0) (clamped strictly inside the support for bounded laws, where
/// the candidate mean may be unreachable); the diagonal stays untilted. The
/// estimator is unbiased for any tilt parameter: weights are
/// e^{-sum(lambda X_ij - Lambda(lambda))} over the tilted coordinates.
inline TailEstimate tilted_tail_estimate(const WignerEnsemble& e, unsigned d, double t,
                                         std::size_t trials, Rng& rng, int threads = 1) {
    if (trials < 1000) throw argument_error("tilted_tail_estimate: trials >= 1000 required");
    using F = ScalarLaw::Family;
    if (e.entry_law.family() != F::Gaussian && e.entry_law.family() != F::Rademacher)
        throw argument_error("tilted_tail_estimate: entry law must be Gaussian or Rademacher");

    const std::size_t n = e.n;
    const double nn = static_cast<double>(n);
    const double x_shift = std::max(t, 0.0);

    TailEstimate est;
    if (x_shift > 0.0) {
        const double m = nn - 1.0;
        const double denom = (d % 2 == 0) ? std::pow(m, static_cast<double>(d)) + m
                                          : std::pow(m, static_cast<double>(d)) - m;
        double y = std::pow(x_shift / denom, 1.0 / d) * std::pow(nn, 0.5 + 1.0 / d);
        const double hi = e.entry_law.support_hi();
        if (std::isfinite(hi)) y = std::min(y, 0.95 * hi);
        est.shift_y = y;
        est.tilt_lambda = tilt_parameter(e.entry_law, y);
    }

    const double lambda = est.tilt_lambda;
    const double log_mgf = log_laplace(e.entry_law, lambda);
    const double threshold = t * std::pow(nn, 1.0 + 0.5 * d);
    const TiltedLaw tilted = TiltedLaw::with_parameter(e.entry_law, lambda);
    const std::uint64_t master = rng.next_u64();

    std::vector<double> weighted(trials), weights(trials);
    parallel_for(trials, threads, [&](std::size_t trial) {
        Rng stream = Rng::derive(master, trial);
        SymMatrix x(n);
        double entry_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                if (i == j) {
                    x.set(i, i, e.diag_law.sample(stream));
                } else {
                    const double v = tilted_sample(tilted, stream);
                    x.set(i, j, v);
                    entry_sum += v;
                }
            }
        }
        const double pairs = 0.5 * nn * (nn - 1.0);
        const double w = std::exp(-(lambda * entry_sum - pairs * log_mgf));
        weights[trial] = w;
        weighted[trial] = (trace_power_mult(x, d) >= threshold) ? w : 0.0;
    });

    est.prob_est = compensated_sum(weighted) / static_cast<double>(trials);
    double ss = 0.0;
    for (const double v : weighted) ss += (v - est.prob_est) * (v - est.prob_est);
    est.std_err = std::sqrt(ss / static_cast<double>(trials - 1)) /
                  std::sqrt(static_cast<double>(trials));
    const double wsum = compensated_sum(weights);
    double wsq = 0.0;
    for (const double w : weights) wsq += w * w;
    est.ess = (wsq > 0.0) ? wsum * wsum / wsq : 0.0;
    est.reliable = est.ess >= 10.0;
    const double speed = std::pow(nn, 1.0 + 2.0 / d);
    est.rate_est = (est.prob_est > 0.0) ? -std::log(est.prob_est) / speed : kInf;
    return est;
}

/// Checks the variational representation of the truncated trace for
/// f(x) = x_+^d: T_f(X) >= tr f(Z) + tr f'(Z)(X - Z) for random rank-<=k
/// trials Z, with equality at the top-k spectral truncation.
inline bool fnsup_check(const SymMatrix& x, std::size_t k, std::size_t trials, Rng& rng,
                        unsigned d = 3) {
    const std::size_t n = x.size();
    if (k < 1 || k > n) throw argument_error("fnsup_check: 1 <= k <= n required");
    if (d < 2) throw argument_error("fnsup_check: d >= 2 required");

    const auto f = [d](double v) { return std::pow(std::max(v, 0.0), static_cast<double>(d)); };
    const auto fp = [d](double v) {
        return d * std::pow(std::max(v, 0.0), static_cast<double>(d - 1));
    };

    const auto dec = eigen_symmetric(x);
    double t_f = 0.0;  // f is nondecreasing, so the top-k eigenvalues realize tr_[k] f(X)
    for (std::size_t i = 0; i < k; ++i) t_f += f(dec.eigenvalues[i]);

    const double scale = std::max(1.0, std::abs(t_f));

    // equality at Z* = top-k truncation: tr f'(Z*)(X - Z*) vanishes
    {
        double rhs = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double mu = dec.eigenvalues[i];
            const auto& v = dec.eigenvectors[i];
            double vxv = 0.0;
            {
                const auto xv = x.apply(v);
                for (std::size_t j = 0; j < n; ++j) vxv += v[j] * xv[j];
            }
            rhs += f(mu) + fp(mu) * (vxv - mu);
        }
        if (std::abs(rhs - t_f) > 1e-8 * scale) return false;
    }

    // inequality on random rank-<=k trials
    const double radius = 1.5 * std::max(1e-3, std::abs(dec.eigenvalues.front()));
    std::vector<double> mu;
    std::vector<std::vector<double>> dirs;
    for (std::size_t s = 0; s < trials; ++s) {
        random_rank_k_factors(n, k, rng, mu, dirs);
        double rhs = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double m = mu[i] * radius;
            const auto xv = x.apply(dirs[i]);
            double vxv = 0.0;
            for (std::size_t j = 0; j < n; ++j) vxv += dirs[i][j] * xv[j];
            rhs += f(m) + fp(m) * (vxv - m);
        }
        if (t_f < rhs - 1e-9 * scale) return false;
    }
    return true;
}

/// Sampled rate curve: strictly increasing abscissae, nonnegative values.
struct RateCurve {
    std::string name;
    std::vector<std::pair<double, double>> points;
    std::string speed_desc;

    void validate() const {
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (i > 0 && !(points[i].first > points[i - 1].first))
                throw argument_error("RateCurve: abscissae must be strictly increasing");
            if (std::isfinite(points[i].second) && points[i].second < -0.0)
                throw argument_error("RateCurve: values must be nonnegative");
        }
    }
};

}  // namespace ldlab
