#pragma once

#include <stdexcept>
#include <string>

namespace monoproj {

// Malformed files, out-of-range arguments, structural problems with inputs.
// The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A guarantee that must hold for every sample was observed to fail.
// The CLI maps this to exit code 3.
class InvariantViolation : public std::runtime_error {
 public:
  explicit InvariantViolation(const std::string& what, long replication = -1)
      : std::runtime_error(what), replication_(replication) {}
  // Replication index when raised inside a simulation, -1 otherwise.
  long replication() const { return replication_; }

 private:
  long replication_;
};

// A numerical procedure failed: solver non-convergence, degenerate kernel
// window, too many bootstrap failures. The CLI maps this to exit code 4.
class ComputeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace monoproj
