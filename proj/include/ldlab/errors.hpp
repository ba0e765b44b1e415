#pragma once

#include <stdexcept>
#include <string>

namespace ldlab {

/// Base class for all errors raised by this library.
class error : public std::runtime_error {
  public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid argument value (dimension mismatch, eps <= 0, entry out of range, ...).
class argument_error : public error {
  public:
    using error::error;
};

/// Input outside the mathematical domain of an operation (non-finite lambda, t < 1, ...).
class domain_error : public error {
  public:
    using error::error;
};

/// Target barycenter on or outside the boundary of the support (steepness: the tilt diverges).
class boundary_error : public error {
  public:
    using error::error;
};

/// An iterative routine failed to reach its tolerance.
class convergence_error : public error {
  public:
    using error::error;
};

/// A numerical guarantee was violated (eigensolver residual, ...).
class numerical_error : public error {
  public:
    using error::error;
};

/// Requested size exceeds a desk-scale guard or an internal budget.
class resource_error : public error {
  public:
    using error::error;
};

/// Exact integer result does not fit the return type.
class range_error : public error {
  public:
    using error::error;
};

/// A constructed net failed its coverage verification.
class construction_error : public error {
  public:
    using error::error;
};

/// A certificate could not be established at the requested mesh.
class certification_error : public error {
  public:
    using error::error;
};

/// A planted candidate or optimizer could not satisfy its constraint.
class infeasible_error : public error {
  public:
    using error::error;
};

}  // namespace ldlab
