#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace affiso {

enum class ErrorKind {
  domain,
  numeric,
  empty_support,
  capability,
  non_convergence,
  construction,
  undefined,
  degenerate,
  normalization,
  hypothesis,
  mean_not_zero,
  usage,
};

inline std::string_view kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::empty_support: return "empty-support";
    case ErrorKind::capability: return "capability";
    case ErrorKind::non_convergence: return "non-convergence";
    case ErrorKind::construction: return "construction";
    case ErrorKind::undefined: return "undefined";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::normalization: return "normalization";
    case ErrorKind::hypothesis: return "hypothesis";
    case ErrorKind::mean_not_zero: return "mean-not-zero";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(kind_name(kind)) + " error: " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when an adaptive integrator runs out of subdivisions. Carries the
/// best estimate reached so callers can still report it.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double value, double error, std::size_t evaluations)
      : Error(ErrorKind::non_convergence, what),
        value_(value),
        error_(error),
        evaluations_(evaluations) {}

  double value() const noexcept { return value_; }
  double error() const noexcept { return error_; }
  std::size_t evaluations() const noexcept { return evaluations_; }

 private:
  double value_;
  double error_;
  std::size_t evaluations_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace affiso
