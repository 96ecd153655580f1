#pragma once

#include <stdexcept>

namespace fracbuckle {

/// Invalid user input: bad config values, malformed files, incompatible
/// option combinations. CLI maps this to exit code 2.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The assembled system is structurally unusable (e.g. every dof constrained,
/// reduced stiffness not positive definite). CLI maps this to exit code 3.
struct assembly_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical backend breakdown (eigensolver failure, no positive load
/// factor). CLI maps this to exit code 3.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fracbuckle
