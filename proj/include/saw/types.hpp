#ifndef SAW_TYPES_HPP
#define SAW_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace saw {

using Complex = std::complex<double>;
using Eigen::Matrix2cd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

/// Base error for all toolkit failures.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input text (Touchstone, JSON, ...). Messages carry 1-based line
/// numbers or JSON paths where available.
struct ParseError : Error {
    using Error::Error;
};

/// File-system level failure (missing file, unwritable output).
struct IoError : Error {
    using Error::Error;
};

/// Dispersion solver found no guided modes for the requested stack.
struct NoModesError : Error {
    using Error::Error;
};

}  // namespace saw

#endif
