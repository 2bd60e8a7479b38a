#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tsmix {

/// Bad input: wrong dimensions, out-of-range parameters, malformed files.
/// The CLI maps it to exit code 2.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that cannot proceed on valid input (singular systems,
/// degenerate covariances). The CLI maps it to exit code 3.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DegenerateCovarianceError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class SingularSystemError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// Every component density at the query is below 1e-300.
class FarFromSupportError : public NumericalError {
public:
  FarFromSupportError(const std::string &what, double max_log_density)
      : NumericalError(what), max_log_density_(max_log_density) {}

  double max_log_density() const { return max_log_density_; }

private:
  double max_log_density_;
};

void require(bool condition, const std::string &message);

// Warnings go to stderr unless a handler is installed (the CLI collects
// them for --quiet and the JSON diagnostics).
using WarningHandler = std::function<void(std::string_view)>;
void set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

} // namespace tsmix
