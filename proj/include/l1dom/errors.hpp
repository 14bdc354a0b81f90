#pragma once

#include <stdexcept>
#include <string>

namespace l1dom {

/// Inputs with incompatible shapes (wrong lengths, n < p, ...).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A matrix that must have full column (or row) rank does not.
class RankDeficiency : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Values outside the admissible domain (NaN, negative variance, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A solver could not produce a result (iteration limit, infeasibility).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace l1dom
