#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "affiso/affine_surface.hpp"
#include "affiso/cli/config.hpp"
#include "affiso/families.hpp"
#include "affiso/functionals.hpp"
#include "affiso/hermite.hpp"
#include "affiso/inequalities.hpp"
#include "affiso/parallel.hpp"

namespace affiso::cli {

/// Rendered output of one subcommand. `body` is the deterministic JSON report;
/// `csv` carries the same rows plus wall-clock seconds.
struct CommandResult {
  json body;
  std::string csv;
  std::string coefficient_csv;  // hermite-expand tables, compute only
  int exit_code = 0;
};

inline constexpr double identity_tolerance = 1e-4;

namespace detail {

inline constexpr double nan = std::numeric_limits<double>::quiet_NaN();

/// Uniform row shared by compute, verify and sweep output.
struct Row {
  std::string family, task;
  double lhs = nan, lhs_err = nan, rhs = nan, rhs_err = nan, margin = nan;
  std::string verdict;  // empty for functionals
  bool equality = false;
  long evaluations = 0;
  double seconds = 0.0;
  std::string status = "ok";
  json record;
};

inline json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline std::string csv_num(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string o = "\"";
  for (char c : s) {
    if (c == '"') o += '"';
    o += c;
  }
  return o + "\"";
}

inline json estimate_json(const IntegralEstimate& e) {
  return {{"value", num_or_null(e.value)},
          {"error", num_or_null(e.error_available ? e.error : nan)},
          {"evaluations", e.evaluations},
          {"method", e.method},
          {"warnings", e.warnings}};
}

inline json report_json(const InequalityReport& r, const std::string& family) {
  json extras = json::object();
  for (const auto& [k, v] : r.extras) extras[k] = num_or_null(v);
  return {{"family", family},      {"task", r.name},
          {"inputs", r.inputs},    {"status", "ok"},
          {"lhs", num_or_null(r.lhs)}, {"lhs_error", num_or_null(r.lhs_error)},
          {"rhs", num_or_null(r.rhs)}, {"rhs_error", num_or_null(r.rhs_error)},
          {"margin", num_or_null(r.margin)}, {"verdict", verdict_name(r.verdict)},
          {"equality", r.equality}, {"evaluations", r.evaluations},
          {"extras", extras},      {"notes", r.notes}};
}

inline Row row_from_report(const InequalityReport& r, const std::string& family) {
  Row row;
  row.family = family;
  row.task = r.name;
  row.lhs = r.lhs;
  row.lhs_err = r.lhs_error;
  row.rhs = r.rhs;
  row.rhs_err = r.rhs_error;
  row.margin = r.margin;
  row.verdict = verdict_name(r.verdict);
  row.equality = r.equality;
  row.evaluations = r.evaluations;
  row.record = report_json(r, family);
  return row;
}

inline Row error_row(const std::string& family, const std::string& task, const Error& e) {
  Row row;
  row.family = family;
  row.task = task;
  row.status = "error";
  row.verdict = "error";
  row.record = {{"family", family}, {"task", task}, {"status", "error"},
                {"error_kind", std::string(kind_name(e.kind()))}, {"message", e.what()}};
  return row;
}

/// Two-sided identity lhs = rhs, accepted within max(identity_tolerance * scale, error sum).
inline InequalityReport identity_report(std::string name, std::string inputs, double lhs, double lhs_err, double rhs,
                                        double rhs_err, double relative_tolerance) {
  InequalityReport r = make_report(std::move(name), std::move(inputs), lhs, lhs_err, rhs, rhs_err);
  const double tol = std::max(relative_tolerance * std::max({std::abs(lhs), std::abs(rhs), 1e-300}), lhs_err + rhs_err);
  r.equality = std::abs(r.margin) <= tol;
  r.verdict = r.equality ? Verdict::holds : Verdict::violated;
  return r;
}

inline Matrix default_covariance_map(int n) {
  Matrix A = Matrix::Identity(n, n);
  A(0, 0) = 1.25;
  if (n > 1) A(0, 1) = 0.3;
  return A;
}

template <class Fn>
IntegralEstimate on_density(const Family& f, Fn&& fn) {
  if (f.is_potential()) return fn(f.potential());
  if (f.is_profile()) return fn(f.profile());
  fail(ErrorKind::usage, "family '" + f.label + "' is a test function, not a density");
}

inline HermiteExpansion expansion_to_degree(const TestFunction& t, int degree) {
  if (degree < 0) fail(ErrorKind::usage, "degree must be >= 0");
  if (t.polynomial) return expand(*t.polynomial, degree);
  if (t.hermite_index) {
    HermiteExpansion e(1, degree);
    if (*t.hermite_index <= degree) e.set({*t.hermite_index}, 1.0);
    e.set_norm_sq(1.0);
    return e;
  }
  return expand(t.phi, degree);
}

inline std::string index_string(const MultiIndex& a) {
  std::string s;
  for (std::size_t i = 0; i < a.size(); ++i) s += (i ? ";" : "") + std::to_string(a[i]);
  return s;
}

/// Evaluates one functional. Returns the row and, for hermite-expand, appends coefficient lines.
inline Row compute_one(const Family& fam, const std::string& family, const Task& t, const QuadratureSpec& q,
                       std::string& table) {
  Row row;
  row.family = family;
  row.task = t.name;
  json rec = {{"family", family}, {"task", t.name}, {"label", fam.label}, {"status", "ok"}};
  IntegralEstimate est;
  if (t.name == "l1-norm") {
    est = on_density(fam, [&](const auto& f) { return l1_norm(f, q); });
  } else if (t.name == "entropy") {
    est = on_density(fam, [&](const auto& f) { return entropy(f, q); });
  } else if (t.name == "fisher-gradient") {
    est = on_density(fam, [&](const auto& f) { return fisher_gradient_form(f, q); });
  } else if (t.name == "fisher-hessian") {
    est = on_density(fam, [&](const auto& f) { return fisher_hessian_form(f, q); });
  } else if (t.name == "log-det") {
    est = on_density(fam, [&](const auto& f) { return log_det_hessian_functional(f, q); });
  } else if (t.name == "entropy-gap") {
    const EntropyGap g = entropy_gap(fam.potential(), q);
    est = g.entropy;
    est.value = g.value;
    est.error = g.error;
    rec["mass"] = g.mass;
    rec["entropy"] = g.entropy.value;
  } else if (t.name == "asa") {
    const SConcaveProfile& f = fam.profile();
    est = asa_profile_formula(f, q);
    if (f.dimension() == 1 && f.s() == 1) {
      const IntegralEstimate b = asa_boundary_integral(f, q);
      rec["boundary"] = estimate_json(b);
      row.evaluations += b.evaluations;
    } else {
      rec["boundary"] = nullptr;
    }
  } else if (t.name == "hermite-expand") {
    const HermiteExpansion e = expansion_to_degree(fam.test_function(), t.degree);
    json coeffs = json::array();
    for (const auto& [a, c] : e.coefficients()) {
      coeffs.push_back({{"index", a}, {"coefficient", c}});
      table += csv_field(family) + "," + index_string(a) + "," + csv_num(c) + "\n";
    }
    est.value = e.coefficient_energy();
    est.error = e.tail_bound();
    est.method = "hermite-projection";
    rec["degree"] = t.degree;
    rec["norm_sq"] = e.norm_sq();
    rec["coefficients"] = coeffs;
  } else {
    fail(ErrorKind::usage, "unknown functional '" + t.name + "'");
  }
  row.lhs = est.value;
  row.lhs_err = est.error_available ? est.error : nan;
  row.evaluations += est.evaluations;
  const json e = estimate_json(est);
  rec["value"] = e["value"];
  rec["error"] = e["error"];
  rec["evaluations"] = row.evaluations;
  rec["method"] = e["method"];
  rec["warnings"] = e["warnings"];
  row.record = rec;
  return row;
}

/// Runs one checker; derivative-chain yields two rows.
inline std::vector<Row> verify_one(const std::map<std::string, Family>& fams, const std::string& family, const Task& t,
                                   const QuadratureSpec& q) {
  const Family& fam = fams.at(family);
  auto one = [&](const InequalityReport& r) { return std::vector<Row>{row_from_report(r, family)}; };
  if (t.name == "inverse-log-sobolev") return one(check_inverse_log_sobolev(fam.potential(), q));
  if (t.name == "log-sobolev-upper") return one(check_log_sobolev_upper(fam.potential(), q));
  if (t.name == "sandwich") return one(check_sandwich(fam.potential(), q));
  if (t.name == "entropy-gap") return one(check_entropy_gap(fam.potential(), q));
  if (t.name == "s-affine-isoperimetric") return one(check_s_affine_isoperimetric(fam.profile(), q));
  if (t.name == "reverse-poincare") return one(check_reverse_poincare(fam.test_function(), q));
  if (t.name == "gaussian-poincare") return one(check_gaussian_poincare(fam.test_function(), q));
  if (t.name == "derivative-chain") {
    const auto [a, b] = check_theorem_14(fam.test_function(), t.m);
    return {row_from_report(a, family), row_from_report(b, family)};
  }
  if (t.name == "affine-covariance") {
    const SConcaveProfile& f = fam.profile();
    const Matrix A = t.A ? *t.A : default_covariance_map(f.dimension());
    if (A.rows() != f.dimension() || A.cols() != f.dimension()) fail(ErrorKind::usage, "A must be n x n");
    const CovarianceReport c = check_affine_covariance(f, A, t.lambda, q);
    const double factor = c.original.value != 0.0 ? c.predicted / c.original.value : 0.0;
    auto r = identity_report("affine-covariance", fam.label + ", lambda=" + csv_num(t.lambda), c.transformed.value,
                             c.transformed.error, c.predicted, std::abs(factor) * c.original.error, identity_tolerance);
    r.evaluations = c.transformed.evaluations + c.original.evaluations;
    r.extras = {{"original", c.original.value},
                {"det_A", determinant(A)},
                {"lambda", t.lambda},
                {"unimodular_form", c.unimodular_form},
                {"relative_gap", c.relative_gap}};
    return one(r);
  }
  if (t.name == "valuation") {
    const Family& other = fams.at(t.family2);
    const ValuationReport v = check_valuation(fam.profile(), other.profile(), q);
    auto r = identity_report("valuation", fam.label + " | " + other.label, v.as_max + v.as_min, v.error / 2.0,
                             v.as1 + v.as2, v.error / 2.0, identity_tolerance);
    r.extras = {{"as1", v.as1},       {"as2", v.as2}, {"as_max", v.as_max}, {"as_min", v.as_min},
                {"relative_gap", v.relative_gap}};
    return one(r);
  }
  fail(ErrorKind::usage, "unknown checker '" + t.name + "'");
}

/// Builds every family; construction failures are configuration errors.
inline std::map<std::string, Family> build_families(const RunConfig& c) {
  std::map<std::string, Family> out;
  for (const auto& [name, d] : c.families) {
    try {
      out.emplace(name, make_family(d));
    } catch (const Error& e) {
      fail(ErrorKind::usage, "family '" + name + "': " + e.what());
    }
  }
  return out;
}

enum class Needs { density, potential, profile, test_function };

inline Needs needs_of(const std::string& task) {
  static const std::map<std::string, Needs> table = {
      {"l1-norm", Needs::density},           {"entropy", Needs::density},
      {"fisher-gradient", Needs::density},   {"fisher-hessian", Needs::density},
      {"log-det", Needs::density},           {"entropy-gap", Needs::potential},
      {"asa", Needs::profile},               {"hermite-expand", Needs::test_function},
      {"inverse-log-sobolev", Needs::potential}, {"log-sobolev-upper", Needs::potential},
      {"sandwich", Needs::potential},        {"s-affine-isoperimetric", Needs::profile},
      {"reverse-poincare", Needs::test_function}, {"gaussian-poincare", Needs::test_function},
      {"derivative-chain", Needs::test_function}, {"affine-covariance", Needs::profile},
      {"valuation", Needs::profile}};
  const auto it = table.find(task);
  if (it == table.end()) fail(ErrorKind::usage, "unknown task '" + task + "'");
  return it->second;
}

inline void require_kind(const Family& f, const std::string& task) {
  const Needs n = needs_of(task);
  const bool ok = (n == Needs::density && !f.is_test_function()) || (n == Needs::potential && f.is_potential()) ||
                  (n == Needs::profile && f.is_profile()) || (n == Needs::test_function && f.is_test_function());
  if (!ok) {
    static const char* what[] = {"a density", "a log-concave potential", "an s-concave profile", "a test function"};
    fail(ErrorKind::usage, "task '" + task + "' needs " + what[static_cast<int>(n)] + "; family '" + f.label + "' is not");
  }
}

inline const char* csv_header = "family,task,lhs,lhs_err,rhs,rhs_err,margin,verdict,equality,evaluations,seconds\n";

inline std::string csv_line(const Row& r) {
  return csv_field(r.family) + "," + csv_field(r.task) + "," + csv_num(r.lhs) + "," + csv_num(r.lhs_err) + "," +
         csv_num(r.rhs) + "," + csv_num(r.rhs_err) + "," + csv_num(r.margin) + "," + r.verdict + "," +
         (r.verdict.empty() ? "" : (r.equality ? "true" : "false")) + "," + std::to_string(r.evaluations) + "," +
         csv_num(r.seconds) + "\n";
}

inline QuadratureSpec run_spec(const RunConfig& c, int inner_jobs) {
  QuadratureSpec q = c.quadrature;
  q.seed = c.seed;
  q.jobs = inner_jobs;
  return q;
}

/// Runs tasks concurrently; rows come back in task order.
inline std::vector<std::vector<Row>> run_tasks(const RunConfig& c, int jobs,
                                               const std::function<std::vector<Row>(const Task&, const QuadratureSpec&)>& fn) {
  const std::size_t count = c.tasks.size();
  const int outer = count > 1 ? jobs : 1;
  const QuadratureSpec q = run_spec(c, count > 1 ? 1 : jobs);
  std::vector<std::vector<Row>> rows(count);
  parallel_for(count, outer, [&](std::size_t i) {
    const Task& t = c.tasks[i];
    const auto start = std::chrono::steady_clock::now();
    try {
      rows[i] = fn(t, q);
    } catch (const Error& e) {
      rows[i] = {error_row(t.family, t.name, e)};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (auto& r : rows[i]) r.seconds = secs / static_cast<double>(rows[i].size());
  });
  return rows;
}

inline json summarize(const std::vector<std::vector<Row>>& rows) {
  long total = 0, holds = 0, within = 0, violated = 0, equality = 0, errors = 0;
  for (const auto& group : rows)
    for (const auto& r : group) {
      ++total;
      if (r.status != "ok") ++errors;
      else if (r.verdict == "holds") ++holds;
      else if (r.verdict == "holds-within-error") ++within;
      else if (r.verdict == "violated") ++violated;
      if (r.equality) ++equality;
    }
  return {{"records", total}, {"holds", holds}, {"holds_within_error", within},
          {"violated", violated}, {"equality", equality}, {"errors", errors}};
}

inline CommandResult assemble(const std::string& command, const RunConfig& c, const std::vector<std::vector<Row>>& rows) {
  CommandResult out;
  json records = json::array();
  out.csv = csv_header;
  for (const auto& group : rows)
    for (const auto& r : group) {
      records.push_back(r.record);
      out.csv += csv_line(r);
    }
  const json summary = summarize(rows);
  out.body = {{"command", command}, {"seed", c.seed}, {"records", records}, {"summary", summary}};
  out.exit_code = (summary["errors"].get<long>() > 0 || summary["violated"].get<long>() > 0) ? 1 : 0;
  return out;
}

inline void check_task_kinds(const RunConfig& c, const std::map<std::string, Family>& fams) {
  for (const auto& t : c.tasks) {
    require_kind(fams.at(t.family), t.name);
    if (t.name == "valuation") require_kind(fams.at(t.family2), t.name);
  }
}

}  // namespace detail

/// Evaluates each (functional, family) pair. Exit 1 if any record failed.
inline CommandResult cmd_compute(const RunConfig& c, int jobs) {
  validate(c, "compute");
  const auto fams = detail::build_families(c);
  detail::check_task_kinds(c, fams);
  std::vector<std::string> tables(c.tasks.size());
  // each worker writes the table slot of its own task
  const auto rows = detail::run_tasks(c, jobs, [&](const Task& t, const QuadratureSpec& q) {
    const std::size_t i = static_cast<std::size_t>(&t - c.tasks.data());
    return std::vector<detail::Row>{detail::compute_one(fams.at(t.family), t.family, t, q, tables[i])};
  });
  CommandResult out = detail::assemble("compute", c, rows);
  for (const auto& t : tables) out.coefficient_csv += t;
  if (!out.coefficient_csv.empty()) out.coefficient_csv = "family,multi_index,coefficient\n" + out.coefficient_csv;
  return out;
}

/// Runs the named checkers. Exit 0 iff no record is violated or failed.
inline CommandResult cmd_verify(const RunConfig& c, int jobs) {
  validate(c, "verify");
  const auto fams = detail::build_families(c);
  detail::check_task_kinds(c, fams);
  const auto rows = detail::run_tasks(
      c, jobs, [&](const Task& t, const QuadratureSpec& q) { return detail::verify_one(fams, t.family, t, q); });
  return detail::assemble("verify", c, rows);
}

// ---- sweeps -------------------------------------------------------------------

namespace detail {

struct SweepLine {
  double value = 0.0;
  std::string family, task;
  double lhs = nan, lhs_err = nan, rhs = nan, rhs_err = nan, margin = nan;
  double ref_lhs = nan, ref_rhs = nan, ref_margin = nan;
  std::string status = "ok";
};

inline const char* sweep_header =
    "variable,value,family,task,lhs,lhs_err,rhs,rhs_err,margin,reference_lhs,reference_rhs,reference_margin,status\n";

inline void fill_from(SweepLine& l, const Row& r) {
  l.lhs = r.lhs;
  l.lhs_err = r.lhs_err;
  l.rhs = r.rhs;
  l.rhs_err = r.rhs_err;
  l.margin = r.margin;
  if (r.status != "ok") l.status = r.record.value("message", std::string("error"));
}

inline Row evaluate_task(const Family& fam, const std::string& task, const QuadratureSpec& q) {
  require_kind(fam, task);
  const std::map<std::string, Family> one = {{"f", fam}};
  Task t;
  t.family = "f";
  t.name = task;
  if (known(checker_names(), task)) {
    if (task == "valuation") fail(ErrorKind::usage, "valuation cannot be swept");
    return verify_one(one, "f", t, q).front();
  }
  std::string table;
  return compute_one(fam, "f", t, q, table);
}

inline double product_power_constant(const FamilyDescriptor& d) {
  if (d.normalize) return std::pow(2.0 / d.p * gamma(1.0 / d.p), -d.n);
  return d.C.value_or(1.0);
}

}  // namespace detail

/// One row per sweep value. Variables: p (family parameter, closed-form reference
/// for product-power), s (s-limit sweep), eps (regularisation, reference at eps = 0)
/// and order (Gauss-Hermite order, Gaussian closed-form reference).
inline CommandResult cmd_sweep(const RunConfig& c, int jobs) {
  validate(c, "sweep");
  const SweepConfig& w = *c.sweep;
  const FamilyDescriptor base = c.family(w.family);
  const std::string var = w.variable;
  std::string task = w.task;
  if (task.empty()) task = var == "order" ? "entropy" : var == "s" ? "s-affine-isoperimetric" : "inverse-log-sobolev";
  if (var == "s" && task != "s-affine-isoperimetric") fail(ErrorKind::usage, "the s-sweep runs s-affine-isoperimetric");
  if (var != "p") {
    RunConfig probe_config;
    probe_config.families = {{w.family, base}};
    const Family probe = detail::build_families(probe_config).at(w.family);
    detail::require_kind(probe, var == "s" ? "inverse-log-sobolev" : task);
  }
  const std::size_t count = w.values.size();
  std::vector<detail::SweepLine> lines(count);
  const QuadratureSpec q0 = detail::run_spec(c, var == "s" || count == 1 ? jobs : 1);

  if (var == "s") {
    std::vector<int> svals;
    for (double v : w.values) {
      if (v < 1.0 || v != std::floor(v)) fail(ErrorKind::usage, "s values must be positive integers");
      svals.push_back(static_cast<int>(v));
    }
    const Family fam = make_family(base);
    std::string failure;
    SweepResult sweep;
    try {
      sweep = s_limit_sweep(fam.potential(), w.eps, svals, q0);
    } catch (const Error& e) {
      failure = e.what();
    }
    for (std::size_t i = 0; i < count; ++i) {
      auto& l = lines[i];
      l.value = svals[i];
      l.family = fam.label + "|eps=" + detail::csv_num(w.eps);
      l.task = task;
      if (!failure.empty()) {
        l.status = failure;
        continue;
      }
      const SweepRow& r = sweep.rows[i];
      l.ref_margin = sweep.reference_margin;
      if (r.skipped) {
        l.status = "skipped: " + r.reason;
        continue;
      }
      l.lhs = r.lhs;
      l.rhs = r.rhs;
      l.margin = r.scaled_margin;
      l.lhs_err = r.error;
    }
  } else {
    parallel_for(count, count > 1 ? jobs : 1, [&](std::size_t i) {
      auto& l = lines[i];
      l.value = w.values[i];
      l.task = task;
      FamilyDescriptor d = base;
      QuadratureSpec q = q0;
      if (var == "p") d.p = l.value;
      if (var == "eps") d.eps = l.value;
      if (var == "order") {
        if (l.value < 1.0 || l.value != std::floor(l.value)) {
          l.status = "order must be a positive integer";
          return;
        }
        q.method = Method::gauss_hermite;
        q.order = static_cast<int>(l.value);
      }
      try {
        const Family fam = make_family(d);
        l.family = fam.label;
        detail::fill_from(l, detail::evaluate_task(fam, task, q));
        if (var == "p" && d.kind == "product-power" && task == "inverse-log-sobolev") {
          const ClosedForm cf = example31_closed_form(d.n, d.p);
          const double C = detail::product_power_constant(d);
          l.ref_lhs = C * cf.lhs;
          l.ref_rhs = C * cf.rhs;
          l.ref_margin = C * cf.margin();
        } else if (var == "eps") {
          FamilyDescriptor d0 = base;
          d0.eps.reset();
          const detail::Row r0 = detail::evaluate_task(make_family(d0), task, q);
          l.ref_lhs = r0.lhs;
          l.ref_rhs = r0.rhs;
          l.ref_margin = r0.margin;
        } else if (var == "order" && d.kind == "standard-gaussian" && task == "entropy") {
          l.ref_lhs = gaussian_entropy(d.n);
        }
      } catch (const Error& e) {
        l.status = e.what();
      }
    });
  }

  CommandResult out;
  out.csv = detail::sweep_header;
  json rows = json::array();
  long failures = 0;
  for (const auto& l : lines) {
    if (l.status != "ok" && l.status.rfind("skipped", 0) != 0) ++failures;
    out.csv += var + "," + detail::csv_num(l.value) + "," + detail::csv_field(l.family) + "," + l.task + "," +
               detail::csv_num(l.lhs) + "," + detail::csv_num(l.lhs_err) + "," + detail::csv_num(l.rhs) + "," +
               detail::csv_num(l.rhs_err) + "," + detail::csv_num(l.margin) + "," + detail::csv_num(l.ref_lhs) + "," +
               detail::csv_num(l.ref_rhs) + "," + detail::csv_num(l.ref_margin) + "," + detail::csv_field(l.status) + "\n";
    rows.push_back({{"value", l.value},
                    {"family", l.family},
                    {"task", l.task},
                    {"lhs", detail::num_or_null(l.lhs)},
                    {"lhs_err", detail::num_or_null(l.lhs_err)},
                    {"rhs", detail::num_or_null(l.rhs)},
                    {"rhs_err", detail::num_or_null(l.rhs_err)},
                    {"margin", detail::num_or_null(l.margin)},
                    {"reference_lhs", detail::num_or_null(l.ref_lhs)},
                    {"reference_rhs", detail::num_or_null(l.ref_rhs)},
                    {"reference_margin", detail::num_or_null(l.ref_margin)},
                    {"status", l.status}});
  }
  out.body = {{"command", "sweep"}, {"seed", c.seed}, {"variable", var}, {"rows", rows},
              {"summary", {{"rows", static_cast<long>(count)}, {"failures", failures}}}};
  out.exit_code = failures > 0 ? 1 : 0;
  return out;
}

/// Dispatches by subcommand name.
inline CommandResult run_command(const std::string& command, const RunConfig& c, int jobs) {
  if (command == "compute") return cmd_compute(c, jobs);
  if (command == "verify") return cmd_verify(c, jobs);
  if (command == "sweep") return cmd_sweep(c, jobs);
  fail(ErrorKind::usage, "unknown command '" + command + "'");
}

}  // namespace affiso::cli
