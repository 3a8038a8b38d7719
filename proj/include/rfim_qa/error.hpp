#ifndef RFIM_QA_ERROR_HPP
#define RFIM_QA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace rfim_qa {

/// Invalid argument to a library call (bad dimensions, mismatched lengths, out-of-range sites).
class argument_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Problem too large for the requested representation.
class capacity_error : public std::length_error {
public:
  using std::length_error::length_error;
};

/// Malformed input file or config text.
class format_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Eigensolver failure. Carries the last residual norm seen.
class solver_error : public std::runtime_error {
public:
  solver_error(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

}  // namespace rfim_qa

#endif  // RFIM_QA_ERROR_HPP
