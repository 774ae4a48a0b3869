#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace spdc {

// Raised when a malformed run configuration or CLI request is detected.
// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when two quadrature resolutions disagree beyond tolerance.  Both
// estimates are kept so callers can report how far apart they were.
// The CLI maps this to exit code 3.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& context, std::complex<double> coarse,
                   std::complex<double> fine)
      : std::runtime_error(context + ": quadrature did not converge (coarse " +
                           format(coarse) + ", refined " + format(fine) + ")"),
        coarse_value(coarse),
        fine_value(fine) {}

  std::complex<double> coarse_value;
  std::complex<double> fine_value;

 private:
  static std::string format(std::complex<double> z) {
    return "(" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")";
  }
};

// Raised by the pump designer when the unregularized normal equations are
// rank deficient and no tie-breaking rule was requested.
class IllPosedError : public std::runtime_error {
 public:
  explicit IllPosedError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a correlation value E is requested for an all-zero count block.
class UndefinedCorrelationError : public std::runtime_error {
 public:
  explicit UndefinedCorrelationError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace spdc
