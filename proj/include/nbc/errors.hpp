#ifndef NBC_ERRORS_HPP
#define NBC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nbc {

/// Unsupported angle, bad level range, non-positive alpha, ...
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Requested problem size exceeds a configured limit.
class ResourceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Degenerate element encountered during assembly.
class AssemblyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An iterative solve hit its iteration cap.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

private:
  double residual_;
  int iterations_;
};

/// A closed-form derivative disagreed with its finite-difference oracle.
class OracleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace nbc

#endif // NBC_ERRORS_HPP
