// Shared dense types and error taxonomy for the qpt library.
#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace qpt {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Default tolerance for physicality checks; callers may override per call.
inline constexpr double kPhysicalityTol = 1e-8;

// Bad arguments: wrong sizes, unknown names, malformed inputs.
struct InvalidArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DimensionError : InvalidArgumentError {
  using InvalidArgumentError::InvalidArgumentError;
};

// Numerical / physicality failures: maps outside the CP-TP domain,
// singular normalizations, degenerate data.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotCompletelyPositiveError : NumericalError {
  using NumericalError::NumericalError;
};

struct UnphysicalArgumentsError : NumericalError {
  using NumericalError::NumericalError;
};

struct DegenerateDataError : NumericalError {
  using NumericalError::NumericalError;
};

struct NonInvertibleNormalizationError : NumericalError {
  using NumericalError::NumericalError;
};

inline Matrix hermitized(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const Matrix& m) {
  return max_abs(m - m.adjoint());
}

inline bool is_hermitian(const Matrix& m, double tol) {
  return m.rows() == m.cols() && hermiticity_defect(m) <= tol;
}

}  // namespace qpt
