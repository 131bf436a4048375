#pragma once

#include <stdexcept>
#include <string>

namespace rcep {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The planning instance, a plan or a state set is malformed or mismatched.
class InstanceError : public Error {
 public:
  using Error::Error;
};

/// The LP engine broke down (singular basis, cycling past the pivot cap).
class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::string log = {})
      : Error(what), log_(std::move(log)) {}
  const std::string& log() const noexcept { return log_; }

 private:
  std::string log_;
};

/// A work limit (nodes, iterations, samples) was exhausted.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// No plan built from the available candidates satisfies the criterion.
class InfeasibleCriterionError : public Error {
 public:
  using Error::Error;
};

}  // namespace rcep
