#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ngconv {

using Real = double;
using Complex = std::complex<Real>;
using MatrixXc = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXc = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr Real kPi = 3.14159265358979323846264338327950288;

/// Numerical gates shared by every module. Values are absolute and assume
/// unit-trace states.
struct Tolerances {
  Real norm = 1e-10;        ///< pure-state norm deviation
  Real hermitian = 1e-10;   ///< ||rho - rho^dagger||_F relative to ||rho||_F
  Real trace = 1e-8;        ///< trace deviation beyond tracked leakage
  Real eigenvalue = 1e-8;   ///< negative eigenvalues above this are clipped
  Real truncation = 1e-10;  ///< max tail mass a factory may renormalize away
  Real rank = 1e-12;        ///< eigenvalue threshold for the Renyi-0 rank
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

/// Base of all library errors. The category drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed inputs: bad parameters, mismatched specs, bad configs.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical gate tripped: truncation leakage, non-PSD spectrum,
/// non-symplectic map, and so on.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Fock cutoff too small for the requested state or operator.
class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A dense allocation would exceed the configured element cap.
class MemoryGuardError : public Error {
 public:
  using Error::Error;
};

}  // namespace ngconv
