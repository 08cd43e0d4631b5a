#pragma once

#include <stdexcept>
#include <string>

namespace moma {

/// Invalid run or library configuration (bad parameter, unknown name, ...).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Violated precondition of an operation (length mismatch and the like).
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A shape-dependent quantity was requested for a genome with no active bit.
struct EmptyShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace moma
