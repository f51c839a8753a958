#pragma once

#include <stdexcept>
#include <string>

namespace sdwave {

/// Invalid sizes, unknown keys, out-of-range parameters.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A nonlinearity evaluation left the double range. Carries the argument
/// that overflowed so the simulator can report where the run broke down.
class SaturationError : public std::runtime_error {
 public:
  SaturationError(const std::string& what, double argument)
      : std::runtime_error(what), argument_(argument) {}

  double argument() const noexcept { return argument_; }

 private:
  double argument_;
};

/// An improper integral failed to converge (e.g. the damping integrability
/// condition does not hold for the supplied f).
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sdwave
