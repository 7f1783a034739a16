#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "affiso/affine_surface.hpp"
#include "affiso/error.hpp"
#include "affiso/families.hpp"
#include "affiso/functionals.hpp"
#include "affiso/hermite.hpp"
#include "affiso/potential.hpp"
#include "affiso/quadrature/gauss_hermite.hpp"

namespace affiso {

enum class Verdict { holds, holds_within_error, violated };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::holds_within_error: return "holds-within-error";
    case Verdict::violated: return "violated";
  }
  return "?";
}

inline constexpr double equality_tolerance = 1e-5;

/// Outcome of one inequality lhs <= rhs.
struct InequalityReport {
  std::string name;
  std::string inputs;
  double lhs = 0.0, lhs_error = 0.0;
  double rhs = 0.0, rhs_error = 0.0;
  double margin = 0.0;
  Verdict verdict = Verdict::holds;
  bool equality = false;
  long evaluations = 0;
  std::vector<std::pair<std::string, double>> extras;
  std::vector<std::string> notes;

  double extra(const std::string& key) const {
    for (const auto& [k, v] : extras)
      if (k == key) return v;
    fail(ErrorKind::usage, "report has no value '" + key + "'");
  }
};

/// Equality when |margin| <= 1e-5 max(|lhs|, |rhs|, 1). Violated only when the
/// margin is below minus the larger of the error sum and the equality tolerance.
inline void classify(InequalityReport& r) {
  r.margin = r.rhs - r.lhs;
  const double eq_tol = equality_tolerance * std::max({std::abs(r.lhs), std::abs(r.rhs), 1.0});
  const double band = std::max(r.lhs_error + r.rhs_error, eq_tol);
  r.equality = std::abs(r.margin) <= eq_tol;
  if (r.margin < -band) r.verdict = Verdict::violated;
  else if (r.margin <= band) r.verdict = Verdict::holds_within_error;
  else r.verdict = Verdict::holds;
}

inline InequalityReport make_report(std::string name, std::string inputs, double lhs, double lhs_err, double rhs,
                                    double rhs_err) {
  InequalityReport r;
  r.name = std::move(name);
  r.inputs = std::move(inputs);
  r.lhs = lhs;
  r.lhs_error = lhs_err;
  r.rhs = rhs;
  r.rhs_error = rhs_err;
  classify(r);
  return r;
}

namespace detail {

inline void require_convex(const Potential& f) {
  const ProbeReport p = convexity_probe(f);
  if (!p.pass)
    fail(ErrorKind::hypothesis, "potential of '" + f.label() + "' is not convex: Hessian eigenvalue " +
                                    std::to_string(p.extreme_eigenvalue) + " at " + format_point(p.worst_point));
}

inline void require_concave(const SConcaveProfile& f) {
  const ProbeReport p = concavity_probe(f);
  if (!p.pass)
    fail(ErrorKind::hypothesis, "profile of '" + f.label() + "' is not concave: Hessian eigenvalue " +
                                    std::to_string(p.extreme_eigenvalue) + " at " + format_point(p.worst_point));
}

inline void carry_warnings(InequalityReport& r, const IntegralEstimate& e) {
  r.evaluations += e.evaluations;
  for (const auto& w : e.warnings)
    if (std::find(r.notes.begin(), r.notes.end(), w) == r.notes.end()) r.notes.push_back(w);
}

inline double log_2pie() { return std::log(2.0 * M_PI * M_E); }

}  // namespace detail

/// int f ln det Hess(-ln f) <= 2 (Ent f + |f|_1 (n/2) ln(2 pi e)).
inline InequalityReport check_inverse_log_sobolev(const Potential& f, const QuadratureSpec& q = {}) {
  detail::require_convex(f);
  const int n = f.dimension();
  const IntegralEstimate ld = log_det_hessian_functional(f, q);
  const IntegralEstimate mass = l1_norm(f, q);
  const IntegralEstimate ent = entropy(f, q);
  const double c = 0.5 * n * detail::log_2pie();
  auto r = make_report("inverse-log-sobolev", f.label(), ld.value, ld.error, 2.0 * (ent.value + mass.value * c),
                       2.0 * (ent.error + mass.error * c));
  r.extras = {{"mass", mass.value}, {"entropy", ent.value}};
  for (const auto* e : {&ld, &mass, &ent}) detail::carry_warnings(r, *e);
  return r;
}

/// Ent f + (n/2) ln(2 pi e) <= (n/2) ln(I(f)/n), unit-mass f.
inline InequalityReport check_log_sobolev_upper(const Potential& f, const QuadratureSpec& q = {}) {
  detail::require_convex(f);
  const int n = f.dimension();
  const IntegralEstimate mass = l1_norm(f, q);
  require_unit_mass(mass);
  const IntegralEstimate ent = entropy(f, q);
  const IntegralEstimate I = fisher_hessian_form(f, q);
  if (!(I.value > 0.0)) fail(ErrorKind::degenerate, "Fisher information is not positive");
  auto r = make_report("log-sobolev-upper", f.label(), ent.value + 0.5 * n * detail::log_2pie(), ent.error,
                       0.5 * n * std::log(I.value / n), 0.5 * n * I.error / I.value);
  r.extras = {{"mass", mass.value}, {"fisher", I.value}};
  for (const auto* e : {&mass, &ent, &I}) detail::carry_warnings(r, *e);
  return r;
}

/// int f ln det <= 2 (Ent + (n/2) ln(2 pi e)) <= n ln(I/n), unit-mass f.
/// lhs and rhs are the outer terms; the middle term and both sub-margins are extras.
inline InequalityReport check_sandwich(const Potential& f, const QuadratureSpec& q = {}) {
  detail::require_convex(f);
  const int n = f.dimension();
  const IntegralEstimate mass = l1_norm(f, q);
  require_unit_mass(mass);
  const IntegralEstimate ld = log_det_hessian_functional(f, q);
  const IntegralEstimate ent = entropy(f, q);
  const IntegralEstimate I = fisher_hessian_form(f, q);
  if (!(I.value > 0.0)) fail(ErrorKind::degenerate, "Fisher information is not positive");
  const double mid = 2.0 * (ent.value + 0.5 * n * detail::log_2pie()), mid_err = 2.0 * ent.error;
  const double up = n * std::log(I.value / n), up_err = n * I.error / I.value;
  const auto lower = make_report("lower", f.label(), ld.value, ld.error, mid, mid_err);
  const auto upper = make_report("upper", f.label(), mid, mid_err, up, up_err);
  auto r = make_report("sandwich", f.label(), ld.value, ld.error, up, up_err);
  r.verdict = std::max(lower.verdict, upper.verdict, [](Verdict a, Verdict b) {
    auto rank = [](Verdict v) { return v == Verdict::holds ? 0 : (v == Verdict::holds_within_error ? 1 : 2); };
    return rank(a) < rank(b);
  });
  r.equality = lower.equality && upper.equality;
  r.extras = {{"middle", mid},
              {"middle_error", mid_err},
              {"lower_margin", lower.margin},
              {"upper_margin", upper.margin},
              {"lower_equality", lower.equality ? 1.0 : 0.0},
              {"upper_equality", upper.equality ? 1.0 : 0.0}};
  for (const auto* e : {&mass, &ld, &ent, &I}) detail::carry_warnings(r, *e);
  return r;
}

/// int f ln det Hess(-ln f) <= 2 (Ent f - Ent gamma), unit-mass f.
inline InequalityReport check_entropy_gap(const Potential& f, const QuadratureSpec& q = {}) {
  detail::require_convex(f);
  const EntropyGap gap = entropy_gap(f, q);
  const IntegralEstimate ld = log_det_hessian_functional(f, q);
  auto r = make_report("entropy-gap", f.label(), ld.value, ld.error, 2.0 * gap.value, 2.0 * gap.error);
  r.extras = {{"mass", gap.mass}, {"entropy", gap.entropy.value}};
  detail::carry_warnings(r, ld);
  detail::carry_warnings(r, gap.entropy);
  return r;
}

/// int |det Hess g|^(1/(n+s+1)) g^((s-1)(n+s)/(n+s+1)) <= d(n,s) (int f)^((n+s-1)/(n+s+1)).
inline InequalityReport check_s_affine_isoperimetric(const SConcaveProfile& f, const QuadratureSpec& q = {}) {
  detail::require_concave(f);
  const int n = f.dimension(), s = f.s();
  const double cs = c_s_constant(s);
  const IntegralEstimate as = asa_profile_formula(f, q);
  const IntegralEstimate mass = l1_norm(f, q);
  const double e = (n + s - 1.0) / (n + s + 1.0), d = d_ns_constant(n, s);
  const double rhs = d * std::pow(mass.value, e);
  const double rhs_err = mass.value > 0.0 ? rhs * e * mass.error / mass.value : 0.0;
  auto r = make_report("s-affine-isoperimetric", f.label(), as.value / cs, as.error / cs, rhs, rhs_err);
  r.extras = {{"affine_surface_area", as.value}, {"mass", mass.value}, {"d_ns", d}, {"s", static_cast<double>(s)}};
  detail::carry_warnings(r, as);
  detail::carry_warnings(r, mass);
  return r;
}

// ---- Gaussian-measure inequalities ------------------------------------------

namespace detail {

struct GaussianMoments {
  IntegralEstimate mean, second, grad_sq, hess_sq;
};

inline GaussianMoments gaussian_moments(const ScalarField& phi, const QuadratureSpec& q) {
  const int n = phi.dimension;
  const int order = q.order_for(n);
  GaussianMoments m;
  m.mean = integrate_gaussian([&](const Vector& x) { return phi.value(x); }, n, order, q.jobs);
  m.second = integrate_gaussian([&](const Vector& x) { const double v = phi.value(x); return v * v; }, n, order, q.jobs);
  m.grad_sq = integrate_gaussian([&](const Vector& x) { return gradient(phi, x).squaredNorm(); }, n, order, q.jobs);
  m.hess_sq = integrate_gaussian([&](const Vector& x) { return hessian(phi, x).squaredNorm(); }, n, order, q.jobs);
  return m;
}

inline HermiteExpansion expansion_of(const TestFunction& t) {
  if (t.polynomial) return expand(*t.polynomial);
  if (t.hermite_index) {
    HermiteExpansion e(1, *t.hermite_index);
    e.set({*t.hermite_index}, 1.0);
    e.set_norm_sq(1.0);
    return e;
  }
  return expand(t.phi);
}

}  // namespace detail

inline TestFunction as_test_function(const ScalarField& phi, std::string label = "phi") {
  return TestFunction{phi, std::nullopt, std::nullopt, std::move(label)};
}

/// E|grad phi|^2 - E|Hess phi|_HS^2 / 2 <= Var(phi) under the standard Gaussian.
/// For n <= 3 both sides are also evaluated from the Hermite expansion.
inline InequalityReport check_reverse_poincare(const TestFunction& t, const QuadratureSpec& q = {}) {
  const auto m = detail::gaussian_moments(t.phi, q);
  const double var = m.second.value - m.mean.value * m.mean.value;
  const double var_err = m.second.error + 2.0 * std::abs(m.mean.value) * m.mean.error;
  auto r = make_report("reverse-poincare", t.label, m.grad_sq.value - 0.5 * m.hess_sq.value,
                       m.grad_sq.error + 0.5 * m.hess_sq.error, var, var_err);
  if (t.dimension() <= 3) {
    const HermiteExpansion e = detail::expansion_of(t);
    const double s_lhs = spectral_reverse_poincare_lhs(e), s_var = spectral_variance(e);
    r.extras = {{"spectral_lhs", s_lhs},
                {"spectral_rhs", s_var},
                {"spectral_gap", std::max(std::abs(s_lhs - r.lhs), std::abs(s_var - r.rhs))},
                {"tail_energy", e.tail_bound()}};
  } else {
    r.notes.push_back("spectral cross-check skipped for n > 3");
  }
  for (const auto* e : {&m.mean, &m.second, &m.grad_sq, &m.hess_sq}) detail::carry_warnings(r, *e);
  return r;
}

/// Var(phi) <= E|grad phi|^2 under the standard Gaussian.
inline InequalityReport check_gaussian_poincare(const TestFunction& t, const QuadratureSpec& q = {}) {
  const auto m = detail::gaussian_moments(t.phi, q);
  const double var = m.second.value - m.mean.value * m.mean.value;
  const double var_err = m.second.error + 2.0 * std::abs(m.mean.value) * m.mean.error;
  auto r = make_report("gaussian-poincare", t.label, var, var_err, m.grad_sq.value, m.grad_sq.error);
  for (const auto* e : {&m.mean, &m.second, &m.grad_sq}) detail::carry_warnings(r, *e);
  return r;
}

/// The two inequalities of the derivative chain, left <= middle and middle <= right.
/// A non-zero mean is subtracted and recorded. Error bars are the tail energy
/// times 2^(D+1), the largest chain weight of a degree D+1 coefficient.
inline std::pair<InequalityReport, InequalityReport> check_theorem_14(const TestFunction& t, int m,
                                                                     double mean_tol = 1e-10) {
  if (t.dimension() != 1) fail(ErrorKind::domain, "the derivative chain is one-dimensional");
  HermiteExpansion e = detail::expansion_of(t);
  std::vector<std::string> notes;
  const double mean = e.mean();
  if (std::abs(mean) > mean_tol * std::max(1.0, std::sqrt(e.coefficient_energy()))) {
    e.set({0}, 0.0);
    e.set_norm_sq(e.norm_sq() - mean * mean);
    notes.push_back("centered: subtracted mean " + std::to_string(mean));
  }
  const ChainSums c = theorem14_sums(e, m, std::numeric_limits<double>::infinity());
  const double err = e.tail_bound() * std::ldexp(1.0, e.degree() + 1);
  const std::string in = t.label + ", m=" + std::to_string(m);
  auto a = make_report("derivative-chain-lower", in, c.left, err, c.middle, err);
  auto b = make_report("derivative-chain-upper", in, c.middle, err, c.right, err);
  a.notes = b.notes = notes;
  a.extras = b.extras = {{"left", c.left}, {"middle", c.middle}, {"right", c.right}, {"tail_energy", e.tail_bound()}};
  return {a, b};
}

// ---- s-limit sweep ------------------------------------------------------------

struct SweepRow {
  int s = 0;
  bool skipped = false;
  std::string reason;
  double lhs = 0.0, rhs = 0.0;
  double scaled_margin = 0.0;  // (n+s+1)(rhs - lhs)
  double error = 0.0;          // (n+s+1)(lhs_error + rhs_error)
};

struct SweepResult {
  double eps = 0.0;
  double reference_margin = 0.0;  // inverse log-Sobolev margin of f_eps
  double reference_error = 0.0;
  std::vector<SweepRow> rows;
};

/// For each s, applies the s-affine isoperimetric inequality to exp(-psi_eps / s)^s
/// and records (n+s+1)(rhs - lhs). Rows whose profile fails the concavity probe are skipped.
inline SweepResult s_limit_sweep(const Potential& f, double eps, const std::vector<int>& s_values,
                                 const QuadratureSpec& q = {}) {
  SweepResult out;
  out.eps = eps;
  const Potential fe = regularize(f, eps);
  const auto ref = check_inverse_log_sobolev(fe, q);
  out.reference_margin = ref.margin;
  out.reference_error = ref.lhs_error + ref.rhs_error;
  const int n = f.dimension();
  for (int s : s_values) {
    SweepRow row;
    row.s = s;
    try {
      const SConcaveProfile p = SConcaveProfile::from_potential(fe, s);
      const ProbeReport probe = concavity_probe(p);
      if (!probe.pass) {
        row.skipped = true;
        row.reason = "profile not concave (max Hessian eigenvalue " + std::to_string(probe.extreme_eigenvalue) + ")";
      } else {
        const auto r = check_s_affine_isoperimetric(p, q);
        row.lhs = r.lhs;
        row.rhs = r.rhs;
        row.scaled_margin = (n + s + 1.0) * r.margin;
        row.error = (n + s + 1.0) * (r.lhs_error + r.rhs_error);
      }
    } catch (const Error& e) {
      row.skipped = true;
      row.reason = e.what();
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace affiso
