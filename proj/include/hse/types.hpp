#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hse {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using Index = std::size_t;

// Raised for invalid arguments: out-of-range digits, mismatched dimensions,
// non-unitary gates and similar contract violations.
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Raised when a dense computation would exceed its configured size cap.
class CapacityError : public std::length_error {
 public:
  explicit CapacityError(const std::string& what) : std::length_error(what) {}
};

// Raised when a checked numerical invariant (norm, leakage, Hermiticity)
// fails at run time.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// d^n with overflow detection.
std::uint64_t checked_pow(std::uint64_t base, unsigned exponent);

}  // namespace hse
