#pragma once

#include <stdexcept>
#include <string>

namespace cnls {

/// A nonlinearity whose H and h_j disagree with dH/ds_j = 2 h_j s_j.
class InconsistentSpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Field dump could not be read or does not match the expected layout.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Energy became non-finite or unbounded during minimization.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A minimizer was requested but the solver did not produce one.
class NotAttainedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time integration produced non-finite values.
class BlowUpError : public std::runtime_error {
 public:
  explicit BlowUpError(const std::string& what, double time = 0.0)
      : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace cnls
