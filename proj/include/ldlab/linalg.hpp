#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "ldlab/errors.hpp"

namespace ldlab {

/// Dense real symmetric matrix, upper triangle stored row-major.
///
/// Entry (i,j) and (j,i) are the same storage cell, so symmetry holds by
/// construction. Graph and Ising couplings additionally keep a zero
/// diagonal; that is the caller's contract, checked where required.
class SymMatrix {
  public:
    SymMatrix() : n_(0) {}
    explicit SymMatrix(std::size_t n) : n_(n), a_(n * (n + 1) / 2, 0.0) {}

    static SymMatrix identity(std::size_t n) {
        SymMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1.0);
        return m;
    }

    /// All off-diagonal entries equal to v, zero diagonal (v * (J - I)).
    static SymMatrix constant_offdiag(std::size_t n, double v) {
        SymMatrix m(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) m.set(i, j, v);
        return m;
    }

    std::size_t size() const { return n_; }

    double operator()(std::size_t i, std::size_t j) const { return a_[index(i, j)]; }

    void set(std::size_t i, std::size_t j, double v) { a_[index(i, j)] = v; }

    void add(std::size_t i, std::size_t j, double v) { a_[index(i, j)] += v; }

    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            s += (*this)(i, i) * (*this)(i, i);
            for (std::size_t j = i + 1; j < n_; ++j) s += 2.0 * (*this)(i, j) * (*this)(i, j);
        }
        return std::sqrt(s);
    }

    double max_abs_offdiag() const {
        double m = 0.0;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j) m = std::max(m, std::abs((*this)(i, j)));
        return m;
    }

    bool has_zero_diagonal() const {
        for (std::size_t i = 0; i < n_; ++i)
            if ((*this)(i, i) != 0.0) return false;
        return true;
    }

    /// y = M x.
    std::vector<double> apply(const std::vector<double>& x) const {
        std::vector<double> y(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            double s = (*this)(i, i) * x[i];
            for (std::size_t j = i + 1; j < n_; ++j) {
                const double v = (*this)(i, j);
                s += v * x[j];
                y[j] += v * x[i];
            }
            y[i] += s;
        }
        return y;
    }

    /// <x, M x>.
    double quad_form(const std::vector<double>& x) const {
        double s = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            s += (*this)(i, i) * x[i] * x[i];
            for (std::size_t j = i + 1; j < n_; ++j) s += 2.0 * (*this)(i, j) * x[i] * x[j];
        }
        return s;
    }

    SymMatrix scaled(double c) const {
        SymMatrix m = *this;
        for (double& v : m.a_) v *= c;
        return m;
    }

  private:
    std::size_t index(std::size_t i, std::size_t j) const {
        if (i > j) std::swap(i, j);
        // rows 0..i-1 store n, n-1, ..., n-i+1 entries
        return i * (2 * n_ - i + 1) / 2 + (j - i);
    }

    std::size_t n_;
    std::vector<double> a_;
};

/// Product of two symmetric matrices that commute (polynomials in a common
/// matrix); only then is the product itself symmetric, which this storage
/// assumes.
inline SymMatrix sym_multiply(const SymMatrix& a, const SymMatrix& b) {
    const std::size_t n = a.size();
    if (b.size() != n) throw argument_error("sym_multiply: dimension mismatch");
    // expand to dense rows once to keep the inner loop contiguous
    std::vector<double> da(n * n), db(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            da[i * n + j] = a(i, j);
            db[i * n + j] = b(i, j);
        }
    SymMatrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            const double* ra = &da[i * n];
            const double* rb = &db[j * n];  // B row j = B column j by symmetry
            for (std::size_t k = 0; k < n; ++k) s += ra[k] * rb[k];
            c.set(i, j, s);
        }
    }
    return c;
}

/// trace(A * B) for symmetric A, B.
inline double trace_product(const SymMatrix& a, const SymMatrix& b) {
    const std::size_t n = a.size();
    if (b.size() != n) throw argument_error("trace_product: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s += a(i, i) * b(i, i);
        for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * b(i, j);
    }
    return s;
}

/// Y^d by binary powering (d >= 1).
inline SymMatrix sym_power(const SymMatrix& y, unsigned d) {
    if (d == 0) return SymMatrix::identity(y.size());
    SymMatrix base = y;
    SymMatrix acc;
    bool have = false;
    unsigned e = d;
    while (e > 0) {
        if (e & 1u) {
            acc = have ? sym_multiply(acc, base) : base;
            have = true;
        }
        e >>= 1u;
        if (e > 0) base = sym_multiply(base, base);
    }
    return acc;
}

/// trace(Y^d) via matrix multiplication; the non-spectral route.
inline double trace_power_mult(const SymMatrix& y, unsigned d) {
    if (d == 0) return static_cast<double>(y.size());
    if (d == 1) return y.trace();
    if (d == 2) return trace_product(y, y);
    const SymMatrix h = sym_power(y, d / 2);
    if (d % 2 == 0) return trace_product(h, h);
    return trace_product(sym_multiply(h, h), y);
}

/// Eigenvalues sorted non-increasing with matching orthonormal eigenvectors.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;        // non-increasing
    std::vector<std::vector<double>> eigenvectors;  // eigenvectors[k] matches eigenvalues[k]

    std::size_t size() const { return eigenvalues.size(); }
};

/// Cyclic Jacobi eigendecomposition.
///
/// Sweeps rotate away every off-diagonal pair until
/// max |off-diagonal| <= 1e-12 * ||Y||_F, at most 50 sweeps. Eigenvalues are
/// returned sorted non-increasing; ties keep the Jacobi output order.
inline SpectralDecomposition eigen_symmetric(const SymMatrix& y) {
    const std::size_t n = y.size();
    if (n < 1) throw argument_error("eigen_symmetric: empty matrix");

    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] = y(i, j);
    std::vector<double> q(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) q[i * n + i] = 1.0;

    const double fro = y.frobenius_norm();
    const double stop = 1e-12 * fro;

    auto offdiag_max = [&]() {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) m = std::max(m, std::abs(a[i * n + j]));
        return m;
    };

    int sweep = 0;
    for (; sweep < 50; ++sweep) {
        if (offdiag_max() <= stop) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t r = p + 1; r < n; ++r) {
                const double apr = a[p * n + r];
                if (std::abs(apr) <= stop * 1e-3) continue;
                const double app = a[p * n + p];
                const double arr = a[r * n + r];
                const double theta = 0.5 * (arr - app) / apr;
                // smaller root of t^2 + 2 theta t - 1 = 0 for numerical stability
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k * n + p];
                    const double akr = a[k * n + r];
                    a[k * n + p] = c * akp - s * akr;
                    a[k * n + r] = s * akp + c * akr;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p * n + k];
                    const double ark = a[r * n + k];
                    a[p * n + k] = c * apk - s * ark;
                    a[r * n + k] = s * apk + c * ark;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double qkp = q[k * n + p];
                    const double qkr = q[k * n + r];
                    q[k * n + p] = c * qkp - s * qkr;
                    q[k * n + r] = s * qkp + c * qkr;
                }
            }
        }
    }
    const double residual = offdiag_max();
    if (residual > stop && fro > 0.0)
        throw numerical_error("eigen_symmetric: Jacobi did not converge after 50 sweeps, "
                              "off-diagonal residual " + std::to_string(residual));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return a[i * n + i] > a[j * n + j];
    });

    SpectralDecomposition d;
    d.eigenvalues.resize(n);
    d.eigenvectors.assign(n, std::vector<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
        d.eigenvalues[k] = a[order[k] * n + order[k]];
        for (std::size_t i = 0; i < n; ++i) d.eigenvectors[k][i] = q[i * n + order[k]];
    }
    return d;
}

/// Rebuilds sum_k f(lambda_k) v_k v_k^T for a scalar map f of the eigenvalues.
template <typename F>
SymMatrix spectral_map(const SpectralDecomposition& d, F&& f) {
    const std::size_t n = d.size();
    SymMatrix m(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double w = f(d.eigenvalues[k]);
        if (w == 0.0) continue;
        const auto& v = d.eigenvectors[k];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) m.add(i, j, w * v[i] * v[j]);
    }
    return m;
}

/// Sum of d-th powers of the eigenvalues (spectral route).
inline double trace_power(const SymMatrix& y, unsigned d) {
    if (d < 1) throw argument_error("trace_power: d >= 1 required");
    const SpectralDecomposition dec = eigen_symmetric(y);
    double s = 0.0;
    for (const double lam : dec.eigenvalues) s += std::pow(lam, static_cast<double>(d));
    return s;
}

/// Spectral projection onto the nonnegative eigenvalues: Y = Y_+ - Y_-.
inline SymMatrix positive_part(const SymMatrix& y) {
    return spectral_map(eigen_symmetric(y), [](double l) { return l > 0.0 ? l : 0.0; });
}

/// Minus the spectral projection onto the negative eigenvalues; PSD.
inline SymMatrix negative_part(const SymMatrix& y) {
    return spectral_map(eigen_symmetric(y), [](double l) { return l < 0.0 ? -l : 0.0; });
}

/// Largest |eigenvalue|.
inline double operator_norm(const SymMatrix& y) {
    const SpectralDecomposition d = eigen_symmetric(y);
    double m = 0.0;
    for (const double l : d.eigenvalues) m = std::max(m, std::abs(l));
    return m;
}

}  // namespace ldlab
