#pragma once

#include <stdexcept>
#include <string>

namespace randprod {

// Root solver did not converge within its iteration cap. Usually indicates a
// model whose CGF violates the strict-convexity contract.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// Requested an operation the given model or parameter combination cannot
// provide exactly (exact tilted CDF for a custom model, lattice alpha = 1, ...).
class UnsupportedError : public std::runtime_error {
 public:
  explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

// Simulation would exceed the configured operation budget.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical quadrature failed to reach its accuracy target.
class QuadratureError : public std::runtime_error {
 public:
  explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

// A lattice point-mass was requested off the lattice (n*beta not in h*Z).
class OffLatticeError : public std::domain_error {
 public:
  explicit OffLatticeError(const std::string& what) : std::domain_error(what) {}
};

// An asymptotic expansion is invalid at this n (leading bracket non-positive).
class NTooSmallError : public std::runtime_error {
 public:
  explicit NTooSmallError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace randprod
