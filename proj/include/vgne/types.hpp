#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>

namespace vgne {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;
using VectorRef = Eigen::Ref<const Vector>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Absolute per-coordinate tolerance for set-membership preconditions.
inline constexpr double kMembershipTol = 1e-9;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand sizes disagree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A standing assumption of the method is violated (disconnected graph,
/// bounded action sets for double integrators, ...).
class AssumptionError : public Error {
public:
    using Error::Error;
};

/// Integration produced non-finite values.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent configuration input.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// An iterative solver ran out of iterations.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

inline void require_dim(Index got, Index expected, const char* what) {
    if (got != expected) {
        throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(expected) +
                             ", got " + std::to_string(got));
    }
}

}  // namespace vgne
