#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "affiso/cli/commands.hpp"
#include "affiso/parallel.hpp"

namespace affiso::cli {

/// Options shared by the three subcommands. Inline family and task flags build a
/// one-family config when no --config is given.
struct Options {
  std::string config, out, table, format;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::vector<std::string> functionals, checkers;
  std::string family;
  int n = 1, s = 1, k = 0, m = 1;
  std::optional<int> degree;
  double p = 2.0, beta = 1.0, a = 1.0, lambda = 1.0;
  std::optional<double> eps;
  bool normalize = false;
  std::vector<double> coeffs;
  std::string variable, task;
  std::vector<double> values;
};

namespace detail {

inline void add_common(CLI::App* sub, Options& o, const std::string& command) {
  sub->add_option("--config", o.config, "JSON run configuration");
  sub->add_option("--out", o.out, "output path (default: stdout)");
  sub->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--seed", o.seed, "random seed (default 0)");
  sub->add_option("--jobs", o.jobs, "worker threads (default: AFFISO_JOBS or 1)")->check(CLI::PositiveNumber);
  sub->add_option("--family", o.family, "family kind for an inline run");
  sub->add_option("--n", o.n, "dimension");
  sub->add_option("--s", o.s, "profile exponent s");
  sub->add_option("--p", o.p, "power p");
  sub->add_option("--beta", o.beta, "power-cap exponent beta");
  sub->add_option("--a", o.a, "quadratic-cap offset a");
  sub->add_option("--k", o.k, "Hermite index");
  sub->add_option("--degree", o.degree, "polynomial degree / expansion truncation");
  sub->add_flag("--normalize", o.normalize, "normalize to unit mass");
  sub->add_option("--coeffs", o.coeffs, "univariate coefficients, constant term first");
  if (command == "compute") {
    sub->add_option("--functional", o.functionals, "functional name(s)");
    sub->add_option("--eps", o.eps, "regularisation eps");
    sub->add_option("--table", o.table, "write hermite-expand coefficients as CSV");
  } else if (command == "verify") {
    sub->add_option("--checker", o.checkers, "checker name(s)");
    sub->add_option("--eps", o.eps, "regularisation eps");
    sub->add_option("--m", o.m, "derivative-chain depth");
    sub->add_option("--lambda", o.lambda, "affine-covariance scale");
  } else {
    sub->add_option("--variable", o.variable, "p, s, eps or order");
    sub->add_option("--values", o.values, "sweep values");
    sub->add_option("--task", o.task, "checker or functional per row");
    sub->add_option("--eps", o.eps, "regularisation eps for the s-sweep (default 0.01)");
  }
}

inline bool any_inline(const CLI::App* sub) {
  for (const char* name : {"--family", "--n", "--s", "--p", "--beta", "--a", "--k", "--degree", "--normalize", "--coeffs",
                           "--functional", "--checker", "--eps", "--m", "--lambda", "--variable", "--values", "--task"}) {
    try {
      if (sub->count(name) > 0) return true;
    } catch (const CLI::OptionNotFound&) {
    }
  }
  return false;
}

inline RunConfig inline_config(const Options& o, const std::string& command) {
  RunConfig c;
  if (o.family.empty()) fail(ErrorKind::usage, "give --config or --family");
  FamilyDescriptor d;
  d.kind = o.family;
  d.n = o.n;
  d.s = o.s;
  d.p = o.p;
  d.beta = o.beta;
  d.a = o.a;
  d.k = o.k;
  if (o.degree) d.degree = *o.degree;
  d.normalize = o.normalize;
  d.coeffs = o.coeffs;
  if (o.eps && command != "sweep") d.eps = o.eps;
  c.families.emplace_back(d.kind, d);
  const auto& names = command == "verify" ? o.checkers : o.functionals;
  for (const auto& n : names) {
    Task t;
    t.family = d.kind;
    t.name = n;
    t.m = o.m;
    if (o.degree) t.degree = *o.degree;
    t.lambda = o.lambda;
    c.tasks.push_back(t);
  }
  if (command == "sweep") {
    SweepConfig w;
    w.variable = o.variable;
    w.values = o.values;
    w.family = d.kind;
    w.task = o.task;
    if (o.eps) w.eps = *o.eps;
    c.sweep = w;
  }
  return c;
}

inline void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::usage, "cannot write '" + path + "'");
  f << text;
}

}  // namespace detail

/// Full command-line entry point. Exit codes: 0 success, 1 numeric or hypothesis
/// failure or a violated inequality, 2 usage error.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Numerical verification of affine isoperimetric and log-Sobolev inequalities", "affiso"};
  app.require_subcommand(1);
  Options o;
  std::string command;
  for (const char* name : {"compute", "verify", "sweep"}) {
    static const std::map<std::string, std::string> help = {
        {"compute", "evaluate functionals on families"},
        {"verify", "run inequality checkers on families"},
        {"sweep", "tabulate a checker or functional over a parameter"}};
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    detail::add_common(sub, o, name);
    sub->callback([&command, name] { command = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o1, o2;
    const int code = app.exit(e, o1, o2);
    out << o1.str();
    err << o2.str();
    return code == 0 ? 0 : 2;
  }
  const CLI::App* sub = app.get_subcommand(command);
  try {
    RunConfig c;
    if (!o.config.empty()) {
      if (detail::any_inline(sub)) fail(ErrorKind::usage, "inline family or task options cannot be combined with --config");
      c = parse_config(read_json_file(o.config), command);
    } else {
      c = detail::inline_config(o, command);
    }
    if (o.seed) c.seed = *o.seed;
    if (!o.out.empty()) c.out = o.out;
    if (!o.format.empty()) c.format = o.format;
    else if (command == "sweep" && o.config.empty()) c.format = "csv";
    const int jobs = o.jobs ? *o.jobs : c.jobs.value_or(default_jobs());
    const CommandResult r = run_command(command, c, jobs);
    detail::write_output(c.out, c.format == "csv" ? r.csv : r.body.dump(2) + "\n", out);
    if (!o.table.empty()) detail::write_output(o.table, r.coefficient_csv, out);
    return r.exit_code;
  } catch (const Error& e) {
    err << "affiso: " << e.what() << "\n";
    return e.kind() == ErrorKind::usage ? 2 : 1;
  } catch (const std::exception& e) {
    err << "affiso: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace affiso::cli
