#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "ldlab/errors.hpp"
#include "ldlab/rng.hpp"

namespace ldlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// One-dimensional base law with a closed-form log-Laplace transform.
///
/// Four families are supported: Rademacher (+-1 with equal weight),
/// Bernoulli(p) on {0,1}, the symmetric uniform law on [-a,a], and the
/// centered Gaussian with variance s2. They cover every experiment in this
/// project; all four are essentially smooth, so the tilt map y = Lambda'(lambda)
/// is a bijection onto the interior of the support's convex hull.
class ScalarLaw {
  public:
    enum class Family { Rademacher, Bernoulli, UniformSym, Gaussian };

    static ScalarLaw rademacher() { return ScalarLaw(Family::Rademacher, 0.0); }

    static ScalarLaw bernoulli(double p) {
        if (!(p > 0.0 && p < 1.0)) throw argument_error("Bernoulli requires 0 < p < 1");
        return ScalarLaw(Family::Bernoulli, p);
    }

    static ScalarLaw uniform_sym(double a) {
        if (!(a > 0.0)) throw argument_error("UniformSym requires half-width a > 0");
        return ScalarLaw(Family::UniformSym, a);
    }

    static ScalarLaw gaussian(double s2) {
        if (!(s2 > 0.0)) throw argument_error("Gaussian requires variance s2 > 0");
        return ScalarLaw(Family::Gaussian, s2);
    }

    Family family() const { return family_; }
    /// Family parameter: p, a, or s2 (unused for Rademacher).
    double param() const { return param_; }

    double mean() const {
        switch (family_) {
            case Family::Bernoulli: return param_;
            default: return 0.0;
        }
    }

    double variance() const {
        switch (family_) {
            case Family::Rademacher: return 1.0;
            case Family::Bernoulli: return param_ * (1.0 - param_);
            case Family::UniformSym: return param_ * param_ / 3.0;
            case Family::Gaussian: return param_;
        }
        return 0.0;
    }

    /// Lower end of the support (-inf for Gaussian).
    double support_lo() const {
        switch (family_) {
            case Family::Rademacher: return -1.0;
            case Family::Bernoulli: return 0.0;
            case Family::UniformSym: return -param_;
            case Family::Gaussian: return -kInf;
        }
        return 0.0;
    }

    /// Upper end of the support (+inf for Gaussian).
    double support_hi() const {
        switch (family_) {
            case Family::Rademacher: return 1.0;
            case Family::Bernoulli: return 1.0;
            case Family::UniformSym: return param_;
            case Family::Gaussian: return kInf;
        }
        return 0.0;
    }

    std::string name() const {
        switch (family_) {
            case Family::Rademacher: return "rademacher";
            case Family::Bernoulli: return "bernoulli(" + std::to_string(param_) + ")";
            case Family::UniformSym: return "uniform_sym(" + std::to_string(param_) + ")";
            case Family::Gaussian: return "gaussian(" + std::to_string(param_) + ")";
        }
        return "?";
    }

    /// One draw from the (untilted) law.
    double sample(Rng& rng) const {
        switch (family_) {
            case Family::Rademacher: return rng.bernoulli(0.5) ? 1.0 : -1.0;
            case Family::Bernoulli: return rng.bernoulli(param_) ? 1.0 : 0.0;
            case Family::UniformSym: return rng.uniform(-param_, param_);
            case Family::Gaussian: return std::sqrt(param_) * rng.normal();
        }
        return 0.0;
    }

  private:
    ScalarLaw(Family f, double p) : family_(f), param_(p) {}

    Family family_;
    double param_;
};

namespace detail {

// log(sinh(u)/u), even in u.  Series for small |u| avoids the 0/0 cancellation.
inline double log_sinhc(double u) {
    u = std::abs(u);
    if (u < 1e-4) {
        const double u2 = u * u;
        // log(sinh u / u) = u^2/6 - u^4/180 + u^6/2835 - u^8/37800 + u^10/467775 - ...
        return u2 * (1.0 / 6.0 +
                     u2 * (-1.0 / 180.0 +
                           u2 * (1.0 / 2835.0 + u2 * (-1.0 / 37800.0 + u2 / 467775.0))));
    }
    if (u > 30.0) {
        // sinh(u) ~ e^u / 2 to full double precision in this range
        return u - std::log(2.0 * u);
    }
    return std::log(std::sinh(u) / u);
}

// d/du log(sinh(u)/u) = coth(u) - 1/u  (the Langevin function).
inline double langevin(double u) {
    const double au = std::abs(u);
    if (au < 1e-4) {
        const double u2 = u * u;
        return u * (1.0 / 3.0 + u2 * (-1.0 / 45.0 + u2 * (2.0 / 945.0)));
    }
    if (au > 30.0) return (u > 0 ? 1.0 : -1.0) - 1.0 / u;
    return 1.0 / std::tanh(u) - 1.0 / u;
}

// d/du langevin(u) = 1/u^2 - 1/sinh(u)^2.
inline double langevin_deriv(double u) {
    const double au = std::abs(u);
    if (au < 1e-3) {
        const double u2 = u * u;
        return 1.0 / 3.0 + u2 * (-1.0 / 15.0 + u2 * (2.0 / 189.0));
    }
    if (au > 30.0) return 1.0 / (u * u);
    const double s = std::sinh(u);
    return 1.0 / (u * u) - 1.0 / (s * s);
}

// Bernoulli tilted success probability q = p e^l / (1 - p + p e^l), overflow safe.
inline double bernoulli_tilted_q(double p, double lambda) {
    if (lambda > 0.0) {
        const double e = std::exp(-lambda);
        return p / (p + (1.0 - p) * e);
    }
    const double e = std::exp(lambda);
    return p * e / (1.0 - p + p * e);
}

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace detail

/// Log-Laplace transform Lambda(lambda) = log E e^{lambda X}.
inline double log_laplace(const ScalarLaw& law, double lambda) {
    if (!std::isfinite(lambda)) throw domain_error("log_laplace: lambda must be finite");
    using F = ScalarLaw::Family;
    switch (law.family()) {
        case F::Rademacher: {
            const double ax = std::abs(lambda);
            return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
        }
        case F::Bernoulli: {
            const double p = law.param();
            if (lambda > 0.0)
                return lambda + std::log(p + (1.0 - p) * std::exp(-lambda));
            return std::log1p(p * std::expm1(lambda));
        }
        case F::UniformSym:
            return detail::log_sinhc(law.param() * lambda);
        case F::Gaussian:
            return 0.5 * law.param() * lambda * lambda;
    }
    return 0.0;
}

/// Lambda'(lambda); equals the barycenter of the lambda-tilted law.
inline double log_laplace_deriv(const ScalarLaw& law, double lambda) {
    if (!std::isfinite(lambda)) throw domain_error("log_laplace_deriv: lambda must be finite");
    using F = ScalarLaw::Family;
    switch (law.family()) {
        case F::Rademacher: return std::tanh(lambda);
        case F::Bernoulli: return detail::bernoulli_tilted_q(law.param(), lambda);
        case F::UniformSym: return law.param() * detail::langevin(law.param() * lambda);
        case F::Gaussian: return law.param() * lambda;
    }
    return 0.0;
}

/// Lambda''(lambda); equals the variance of the lambda-tilted law.
inline double log_laplace_second(const ScalarLaw& law, double lambda) {
    using F = ScalarLaw::Family;
    switch (law.family()) {
        case F::Rademacher: {
            const double t = std::tanh(lambda);
            return 1.0 - t * t;
        }
        case F::Bernoulli: {
            const double q = detail::bernoulli_tilted_q(law.param(), lambda);
            return q * (1.0 - q);
        }
        case F::UniformSym: {
            const double a = law.param();
            return a * a * detail::langevin_deriv(a * lambda);
        }
        case F::Gaussian: return law.param();
    }
    return 0.0;
}

/// Solves Lambda'(lambda) = y for the tilt parameter.
///
/// y must lie strictly inside the support's convex hull (for Gaussian, any
/// finite y).  Safeguarded Newton with a geometrically grown bracket and
/// bisection fallback; at most 100 Newton iterations.  The result satisfies
/// |Lambda'(lambda) - y| <= 1e-12 * max(1, |y|).
inline double tilt_parameter(const ScalarLaw& law, double y) {
    if (!std::isfinite(y)) throw domain_error("tilt_parameter: y must be finite");
    const double lo = law.support_lo();
    const double hi = law.support_hi();
    if (y <= lo || y >= hi)
        throw boundary_error("tilt_parameter: barycenter " + std::to_string(y) +
                             " not in the interior of the support of " + law.name());
    if (law.family() == ScalarLaw::Family::Gaussian) return y / law.param();

    const double tol = 1e-12 * std::max(1.0, std::abs(y));
    // bracket [bl, bh] with Lambda'(bl) <= y <= Lambda'(bh); Lambda' is increasing
    double bl = -1.0, bh = 1.0;
    for (int i = 0; i < 200 && log_laplace_deriv(law, bl) > y; ++i) bl *= 2.0;
    for (int i = 0; i < 200 && log_laplace_deriv(law, bh) < y; ++i) bh *= 2.0;
    if (log_laplace_deriv(law, bl) > y || log_laplace_deriv(law, bh) < y)
        throw boundary_error("tilt_parameter: failed to bracket y = " + std::to_string(y));

    double lambda = 0.5 * (bl + bh);
    for (int it = 0; it < 100; ++it) {
        const double g = log_laplace_deriv(law, lambda) - y;
        if (std::abs(g) <= tol) return lambda;
        if (g > 0.0) bh = lambda; else bl = lambda;
        const double gp = log_laplace_second(law, lambda);
        double next = lambda - g / gp;
        if (!(gp > 0.0) || !std::isfinite(next) || next <= bl || next >= bh)
            next = 0.5 * (bl + bh);  // bisection fallback
        lambda = next;
    }
    // Newton budget exhausted; finish with plain bisection on the bracket.
    for (int it = 0; it < 200; ++it) {
        lambda = 0.5 * (bl + bh);
        const double g = log_laplace_deriv(law, lambda) - y;
        if (std::abs(g) <= tol) return lambda;
        if (g > 0.0) bh = lambda; else bl = lambda;
    }
    if (std::abs(log_laplace_deriv(law, lambda) - y) <= tol) return lambda;
    throw convergence_error("tilt_parameter: no convergence for y = " + std::to_string(y));
}

/// Legendre transform Lambda*(x) = sup_lambda { lambda x - Lambda(lambda) }.
///
/// Uses the family's closed form where one exists; UniformSym falls back to
/// inverting Lambda'.  Points strictly outside the closed convex hull of the
/// support map to the +infinity sentinel, never an exception.  At support
/// endpoints the value is the lower-semicontinuous limit: log 2 for
/// Rademacher at +-1, log(1/p) and log(1/(1-p)) for Bernoulli at 1 and 0,
/// +infinity for UniformSym at +-a (the endpoints carry no atom).
inline double legendre(const ScalarLaw& law, double x) {
    if (std::isnan(x)) throw domain_error("legendre: x is NaN");
    using F = ScalarLaw::Family;
    switch (law.family()) {
        case F::Rademacher: {
            if (x < -1.0 || x > 1.0) return kInf;
            return detail::xlogx(0.5 * (1.0 + x)) + detail::xlogx(0.5 * (1.0 - x)) + std::log(2.0);
        }
        case F::Bernoulli: {
            if (x < 0.0 || x > 1.0) return kInf;
            const double p = law.param();
            return detail::xlogx(x) - (x > 0.0 ? x * std::log(p) : 0.0) + detail::xlogx(1.0 - x) -
                   (x < 1.0 ? (1.0 - x) * std::log(1.0 - p) : 0.0);
        }
        case F::Gaussian:
            return x * x / (2.0 * law.param());
        case F::UniformSym: {
            const double a = law.param();
            if (x <= -a || x >= a) return kInf;
            if (x == 0.0) return 0.0;
            const double lambda = tilt_parameter(law, x);
            return lambda * x - log_laplace(law, lambda);
        }
    }
    return kInf;
}

/// Exponential tilt of a base law, indexed by its barycenter mean_y = Lambda'(lambda).
struct TiltedLaw {
    ScalarLaw base;
    double lambda;
    double mean_y;

    /// Tilt with an explicit parameter lambda.
    static TiltedLaw with_parameter(const ScalarLaw& base, double lambda) {
        return TiltedLaw{base, lambda, log_laplace_deriv(base, lambda)};
    }

    /// Tilt whose barycenter is y (strictly inside the support hull).
    static TiltedLaw with_mean(const ScalarLaw& base, double y) {
        const double lambda = tilt_parameter(base, y);
        return TiltedLaw{base, lambda, log_laplace_deriv(base, lambda)};
    }
};

/// One draw from the tilted law e^{lambda x - Lambda(lambda)} d mu(x).
inline double tilted_sample(const TiltedLaw& t, Rng& rng) {
    using F = ScalarLaw::Family;
    switch (t.base.family()) {
        case F::Rademacher: {
            // P(+1) = e^l / (2 cosh l) = sigmoid(2 l)
            const double q = 1.0 / (1.0 + std::exp(-2.0 * t.lambda));
            return rng.bernoulli(q) ? 1.0 : -1.0;
        }
        case F::Bernoulli: {
            const double q = detail::bernoulli_tilted_q(t.base.param(), t.lambda);
            return rng.bernoulli(q) ? 1.0 : 0.0;
        }
        case F::Gaussian:
            return t.base.param() * t.lambda + std::sqrt(t.base.param()) * rng.normal();
        case F::UniformSym: {
            // inverse CDF of the density proportional to e^{lambda x} on [-a, a]
            const double a = t.base.param();
            const double u = t.lambda * a;
            if (std::abs(u) < 1e-8) return rng.uniform(-a, a);
            const double v = rng.uniform01();
            // x = a + log(v + (1-v) e^{-2u}) / lambda, stable for either sign of u
            if (u > 0.0)
                return a + std::log(v + (1.0 - v) * std::exp(-2.0 * u)) / t.lambda;
            return -a + std::log((1.0 - v) + v * std::exp(2.0 * u)) / t.lambda;
        }
    }
    return 0.0;
}

/// Product of independent scalar laws; Lambda and Lambda* are coordinate sums.
class ProductLaw {
  public:
    explicit ProductLaw(std::vector<ScalarLaw> components) : components_(std::move(components)) {}

    /// n independent copies of one law.
    static ProductLaw iid(const ScalarLaw& law, std::size_t n) {
        return ProductLaw(std::vector<ScalarLaw>(n, law));
    }

    std::size_t dim() const { return components_.size(); }
    const ScalarLaw& component(std::size_t i) const { return components_[i]; }

  private:
    std::vector<ScalarLaw> components_;
};

/// Sum_i Lambda_i(lambda_i).
inline double product_log_laplace(const ProductLaw& law, const std::vector<double>& lambda) {
    if (lambda.size() != law.dim())
        throw argument_error("product_log_laplace: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < lambda.size(); ++i) s += log_laplace(law.component(i), lambda[i]);
    return s;
}

/// Sum_i Lambda*_i(x_i); +infinity sentinel if any coordinate is infinite.
inline double product_legendre(const ProductLaw& law, const std::vector<double>& x) {
    if (x.size() != law.dim()) throw argument_error("product_legendre: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = legendre(law.component(i), x[i]);
        if (v == kInf) return kInf;
        s += v;
    }
    return s;
}

}  // namespace ldlab
