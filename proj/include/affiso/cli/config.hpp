#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "affiso/error.hpp"
#include "affiso/families.hpp"
#include "affiso/quadrature/spec.hpp"

namespace affiso::cli {

using json = nlohmann::json;

/// One unit of work: a functional or checker applied to a named family.
struct Task {
  std::string family;
  std::string name;            // functional (compute) or checker (verify)
  std::string family2;         // second family for valuation
  int m = 1;                   // derivative-chain depth
  int degree = 12;             // hermite-expand truncation
  std::optional<Matrix> A;     // affine-covariance map
  double lambda = 1.0;         // affine-covariance scale
};

struct SweepConfig {
  std::string variable;  // p, s, eps, order
  std::vector<double> values;
  std::string family;
  std::string task;      // checker or functional evaluated per row
  double eps = 0.01;     // regularisation for the s-sweep
};

struct RunConfig {
  std::vector<std::pair<std::string, FamilyDescriptor>> families;  // in config order
  std::vector<Task> tasks;
  std::optional<SweepConfig> sweep;
  QuadratureSpec quadrature;
  std::uint64_t seed = 0;
  std::optional<int> jobs;
  std::string out;
  std::string format = "json";

  const FamilyDescriptor& family(const std::string& name) const {
    for (const auto& [n, d] : families)
      if (n == name) return d;
    fail(ErrorKind::usage, "unknown family '" + name + "'");
  }
};

inline const std::vector<std::string>& functional_names() {
  static const std::vector<std::string> names = {"l1-norm",  "entropy",     "fisher-gradient", "fisher-hessian",
                                                 "log-det",  "entropy-gap", "asa",             "hermite-expand"};
  return names;
}

inline const std::vector<std::string>& checker_names() {
  static const std::vector<std::string> names = {
      "inverse-log-sobolev", "log-sobolev-upper", "sandwich",         "entropy-gap",       "s-affine-isoperimetric",
      "reverse-poincare",    "gaussian-poincare", "derivative-chain", "affine-covariance", "valuation"};
  return names;
}

inline bool known(const std::vector<std::string>& names, const std::string& n) {
  return std::find(names.begin(), names.end(), n) != names.end();
}

namespace detail {

inline Vector parse_vector(const json& j, const char* what) {
  if (j.is_number()) return Vector::Constant(1, j.get<double>());
  if (!j.is_array()) fail(ErrorKind::usage, std::string(what) + " must be a number array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

// Row-major: nested rows, or a flat list of n*n entries.
inline Matrix parse_matrix(const json& j, int n, const char* what) {
  if (j.is_number()) return Matrix::Constant(1, 1, j.get<double>());
  if (!j.is_array() || j.empty()) fail(ErrorKind::usage, std::string(what) + " must be a non-empty array");
  if (j[0].is_array()) {
    const auto rows = j.size(), cols = j[0].size();
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      if (j[r].size() != cols) fail(ErrorKind::usage, std::string(what) + " has ragged rows");
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
  }
  if (n <= 0) n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(j.size()))));  // square, size inferred
  if (static_cast<int>(j.size()) != n * n) fail(ErrorKind::usage, std::string(what) + " needs n*n row-major entries");
  Matrix m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = j[r * n + c].get<double>();
  return m;
}

inline void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      fail(ErrorKind::usage, "unknown key '" + it.key() + "' in " + where);
}

}  // namespace detail

/// Family descriptor from a tagged record.
inline FamilyDescriptor parse_family(const json& j) {
  if (!j.is_object()) fail(ErrorKind::usage, "family must be an object");
  detail::reject_unknown_keys(j,
                              {"name", "kind", "n", "C", "A", "b", "a", "p", "beta", "s", "k", "degree", "seed", "coeffs",
                               "terms", "normalize", "eps", "scale", "compose", "translate", "profile_s"},
                              "family");
  if (!j.contains("kind")) fail(ErrorKind::usage, "family needs a 'kind'");
  FamilyDescriptor d;
  try {
    d.kind = j.at("kind").get<std::string>();
    d.n = j.value("n", 1);
    if (j.contains("C")) d.C = j["C"].get<double>();
    if (j.contains("A")) d.A = detail::parse_matrix(j["A"], d.n, "A");
    if (j.contains("b")) d.b = detail::parse_vector(j["b"], "b");
    d.a = j.value("a", 1.0);
    d.p = j.value("p", 2.0);
    d.beta = j.value("beta", 1.0);
    d.s = j.value("s", 1);
    d.k = j.value("k", 0);
    d.degree = j.value("degree", 2);
    d.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("coeffs")) d.coeffs = j["coeffs"].get<std::vector<double>>();
    if (j.contains("terms"))
      for (const auto& t : j["terms"]) d.terms.emplace_back(t.at("alpha").get<MultiIndex>(), t.at("c").get<double>());
    d.normalize = j.value("normalize", false);
    if (j.contains("eps")) d.eps = j["eps"].get<double>();
    if (j.contains("scale")) d.scale = j["scale"].get<double>();
    if (j.contains("compose")) d.compose = detail::parse_matrix(j["compose"], d.n, "compose");
    if (j.contains("translate")) d.translate = detail::parse_vector(j["translate"], "translate");
    if (j.contains("profile_s")) d.profile_s = j["profile_s"].get<int>();
    d.name = j.value("name", std::string());
  } catch (const json::exception& e) {
    fail(ErrorKind::usage, std::string("malformed family record: ") + e.what());
  }
  return d;
}

inline QuadratureSpec parse_quadrature(const json& j, QuadratureSpec q = {}) {
  detail::reject_unknown_keys(j, {"method", "order", "rel_tol", "abs_tol", "max_subdivisions", "samples", "endpoint_transform"},
                              "quadrature");
  try {
    if (j.contains("method")) q.method = parse_method(j["method"].get<std::string>());
    q.order = j.value("order", q.order);
    q.rel_tol = j.value("rel_tol", q.rel_tol);
    q.abs_tol = j.value("abs_tol", q.abs_tol);
    q.max_subdivisions = j.value("max_subdivisions", q.max_subdivisions);
    q.samples = j.value("samples", q.samples);
    q.endpoint_transform = j.value("endpoint_transform", q.endpoint_transform);
  } catch (const json::exception& e) {
    fail(ErrorKind::usage, std::string("malformed quadrature record: ") + e.what());
  }
  return q;
}

inline Task parse_task(const json& j, bool verify) {
  detail::reject_unknown_keys(j, {"family", "functional", "checker", "family2", "m", "degree", "A", "lambda"}, "task");
  Task t;
  try {
    t.family = j.at("family").get<std::string>();
    const char* key = verify ? "checker" : "functional";
    if (!j.contains(key)) fail(ErrorKind::usage, std::string("task needs a '") + key + "'");
    t.name = j[key].get<std::string>();
    t.family2 = j.value("family2", std::string());
    t.m = j.value("m", 1);
    t.degree = j.value("degree", 12);
    if (j.contains("A")) t.A = detail::parse_matrix(j["A"], 0, "A");
    t.lambda = j.value("lambda", 1.0);
  } catch (const json::exception& e) {
    fail(ErrorKind::usage, std::string("malformed task: ") + e.what());
  }
  return t;
}

/// Reads a config for the given subcommand. Tasks come from an explicit "tasks"
/// list or, failing that, from every family crossed with "functionals" or "checkers".
inline RunConfig parse_config(const json& j, const std::string& command) {
  if (!j.is_object()) fail(ErrorKind::usage, "config must be a JSON object");
  detail::reject_unknown_keys(j, {"families", "tasks", "functionals", "checkers", "sweep", "quadrature", "seed", "jobs",
                                  "out", "format", "description"},
                              "config");
  RunConfig c;
  const bool verify = command == "verify";
  if (j.contains("families")) {
    for (const auto& f : j["families"]) {
      FamilyDescriptor d = parse_family(f);
      const std::string key = d.name.empty() ? d.kind : d.name;
      d.name.clear();  // keep the descriptive label
      for (const auto& [n, _] : c.families)
        if (n == key) fail(ErrorKind::usage, "duplicate family name '" + key + "'");
      c.families.emplace_back(key, d);
    }
  }
  if (j.contains("quadrature")) c.quadrature = parse_quadrature(j["quadrature"]);
  try {
    c.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("jobs")) c.jobs = j["jobs"].get<int>();
    c.out = j.value("out", std::string());
    c.format = j.value("format", std::string("json"));
  } catch (const json::exception& e) {
    fail(ErrorKind::usage, std::string("malformed config: ") + e.what());
  }
  if (j.contains("tasks")) {
    for (const auto& t : j["tasks"]) c.tasks.push_back(parse_task(t, verify));
  } else {
    const char* key = verify ? "checkers" : "functionals";
    if (j.contains(key))
      for (const auto& [fname, _] : c.families)
        for (const auto& n : j[key]) {
          Task t;
          t.family = fname;
          t.name = n.get<std::string>();
          c.tasks.push_back(t);
        }
  }
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    detail::reject_unknown_keys(s, {"variable", "values", "family", "task", "eps"}, "sweep");
    SweepConfig w;
    try {
      w.variable = s.at("variable").get<std::string>();
      w.values = s.at("values").get<std::vector<double>>();
      w.family = s.value("family", c.families.empty() ? std::string() : c.families.front().first);
      w.task = s.value("task", std::string());
      w.eps = s.value("eps", 0.01);
    } catch (const json::exception& e) {
      fail(ErrorKind::usage, std::string("malformed sweep: ") + e.what());
    }
    c.sweep = w;
  }
  return c;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::usage, "cannot open config '" + path + "'");
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    fail(ErrorKind::usage, "config '" + path + "' is not valid JSON: " + e.what());
  }
}

/// Validates names against the catalogues; unknown names are usage errors.
inline void validate(const RunConfig& c, const std::string& command) {
  if (c.format != "json" && c.format != "csv") fail(ErrorKind::usage, "format must be json or csv");
  c.quadrature.validate();
  if (c.jobs && *c.jobs < 1) fail(ErrorKind::usage, "jobs must be >= 1");
  for (const auto& t : c.tasks) {
    c.family(t.family);
    if (command == "verify") {
      if (!known(checker_names(), t.name)) fail(ErrorKind::usage, "unknown checker '" + t.name + "'");
      if (t.name == "valuation") c.family(t.family2);
    } else if (!known(functional_names(), t.name)) {
      fail(ErrorKind::usage, "unknown functional '" + t.name + "'");
    }
  }
  if (command == "sweep") {
    if (!c.sweep) fail(ErrorKind::usage, "sweep needs a 'sweep' section or --variable");
    const auto& w = *c.sweep;
    if (w.variable != "p" && w.variable != "s" && w.variable != "eps" && w.variable != "order")
      fail(ErrorKind::usage, "sweep variable must be p, s, eps or order");
    if (w.values.empty()) fail(ErrorKind::usage, "sweep needs values");
    c.family(w.family);
    if (!w.task.empty() && !known(checker_names(), w.task) && !known(functional_names(), w.task))
      fail(ErrorKind::usage, "unknown sweep task '" + w.task + "'");
  } else if (c.tasks.empty()) {
    fail(ErrorKind::usage, "nothing to do: config has no tasks");
  }
}

}  // namespace affiso::cli
