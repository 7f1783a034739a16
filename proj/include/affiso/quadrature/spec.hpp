#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "affiso/error.hpp"

namespace affiso {

enum class Method { automatic, gauss_hermite, adaptive, monte_carlo };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::automatic: return "automatic";
    case Method::gauss_hermite: return "gauss-hermite";
    case Method::adaptive: return "adaptive";
    case Method::monte_carlo: return "monte-carlo";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  if (s == "automatic" || s == "auto") return Method::automatic;
  if (s == "gauss-hermite") return Method::gauss_hermite;
  if (s == "adaptive") return Method::adaptive;
  if (s == "monte-carlo") return Method::monte_carlo;
  fail(ErrorKind::usage, "unknown quadrature method '" + s + "'");
}

struct QuadratureSpec {
  Method method = Method::automatic;
  int order = 0;  // 0: 60 for n <= 2, 40 for n = 3, 4
  double rel_tol = 1e-8;
  double abs_tol = 1e-13;
  long max_subdivisions = 200000;
  long samples = 1000000;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool endpoint_transform = false;  // double-exponential map at box endpoints

  int order_for(int n) const { return order > 0 ? order : (n <= 2 ? 60 : 40); }

  void validate() const {
    if (order < 0) fail(ErrorKind::construction, "quadrature order must be >= 1");
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) fail(ErrorKind::construction, "tolerances must be positive");
    if (max_subdivisions < 1) fail(ErrorKind::construction, "max_subdivisions must be positive");
    if (samples < 1) fail(ErrorKind::construction, "samples must be >= 1");
    if (jobs < 1) fail(ErrorKind::construction, "jobs must be >= 1");
  }
};

struct IntegralEstimate {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
  std::string method;
  bool error_available = true;
  std::vector<std::string> warnings;

  IntegralEstimate& operator+=(const IntegralEstimate& o) {
    value += o.value;
    error += o.error;
    evaluations += o.evaluations;
    error_available = error_available && o.error_available;
    if (method.empty()) method = o.method;
    else if (!o.method.empty() && o.method != method) method += "+" + o.method;
    warnings.insert(warnings.end(), o.warnings.begin(), o.warnings.end());
    return *this;
  }

  IntegralEstimate scaled(double c) const {
    IntegralEstimate r = *this;
    r.value *= c;
    r.error *= std::abs(c);
    return r;
  }
};

}  // namespace affiso
