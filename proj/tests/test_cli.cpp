#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "affiso/cli/app.hpp"

namespace {

namespace fs = std::filesystem;
using affiso::cli::json;

struct CliRun {
  int code = 0;
  std::string out, err;
  json body() const { return json::parse(out); }
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "affiso");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = affiso::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string config(const std::string& name) { return std::string(AFFISO_CONFIG_DIR) + "/" + name; }

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("affiso_test_" + name);
  std::ofstream(p) << text;
  return p;
}

std::vector<std::string> csv_lines(const std::string& s) {
  std::vector<std::string> lines;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return lines;
}

// ---- compute ------------------------------------------------------------------

TEST(Compute, GaussianEntropy) {
  const CliRun r = cli({"compute", "--family", "standard-gaussian", "--functional", "entropy"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json rec = r.body()["records"][0];
  EXPECT_NEAR(rec["value"].get<double>(), -0.5 * std::log(2.0 * M_PI * M_E), 1e-10);
  EXPECT_EQ(rec["task"], "entropy");
  EXPECT_TRUE(rec.contains("error"));
  EXPECT_TRUE(rec.contains("evaluations"));
  EXPECT_TRUE(rec["warnings"].is_array());
}

TEST(Compute, AsaOfCapTwo) {
  const CliRun r = cli({"compute", "--family", "cap-gs", "--s", "2", "--functional", "asa"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(r.body()["records"][0]["value"].get<double>(), 4.0 * M_PI, 1e-8);
}

TEST(Compute, AsaReportsBoundaryOracleInThePlane) {
  const CliRun r = cli({"compute", "--family", "cap-gs", "--s", "1", "--functional", "asa"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json rec = r.body()["records"][0];
  EXPECT_NEAR(rec["value"].get<double>(), 2.0 * M_PI, 1e-8);
  EXPECT_NEAR(rec["boundary"]["value"].get<double>(), 2.0 * M_PI, 1e-6);
  const CliRun r2 = cli({"compute", "--family", "cap-gs", "--s", "2", "--functional", "asa"});
  EXPECT_TRUE(r2.body()["records"][0]["boundary"].is_null());
}

TEST(Compute, ConfigFileEvaluatesEveryTask) {
  const CliRun r = cli({"compute", "--config", config("compute.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json b = r.body();
  EXPECT_EQ(b["records"].size(), 10u);
  EXPECT_EQ(b["summary"]["errors"], 0);
  EXPECT_EQ(b["records"][0]["family"], "gauss1");
  EXPECT_EQ(b["records"][9]["task"], "asa");
}

TEST(Compute, HermiteTable) {
  const fs::path table = fs::temp_directory_path() / "affiso_test_table.csv";
  const CliRun r = cli({"compute", "--config", config("hermite.json"), "--table", table.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(table);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto lines = csv_lines(ss.str());
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "family,multi_index,coefficient");
  // x^3 - x = 2 h_1 + sqrt(6) h_3
  EXPECT_EQ(lines[1].substr(0, 7), "poly,1,");
  EXPECT_NEAR(std::stod(lines[1].substr(7)), 2.0, 1e-12);
  EXPECT_NEAR(std::stod(lines[2].substr(7)), std::sqrt(6.0), 1e-12);
}

TEST(Compute, NumericFailureIsRecordedAndExitsOne) {
  // entropy gap requires unit mass; the unnormalized quartic has mass 1.81
  const CliRun r = cli({"compute", "--family", "product-power", "--p", "4", "--functional", "entropy-gap", "--functional",
                     "entropy"});
  EXPECT_EQ(r.code, 1);
  const json b = r.body();
  EXPECT_EQ(b["records"][0]["status"], "error");
  EXPECT_EQ(b["records"][0]["error_kind"], "normalization");
  EXPECT_EQ(b["records"][1]["status"], "ok");
  EXPECT_EQ(b["summary"]["errors"], 1);
}

TEST(Compute, CsvHeaderIsFixed) {
  const CliRun r = cli({"compute", "--family", "standard-gaussian", "--functional", "l1-norm", "--format", "csv"});
  ASSERT_EQ(r.code, 0);
  const auto lines = csv_lines(r.out);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0], "family,task,lhs,lhs_err,rhs,rhs_err,margin,verdict,equality,evaluations,seconds");
  EXPECT_EQ(lines[1].substr(0, 26), "standard-gaussian,l1-norm,");
}

TEST(Compute, OutWritesFile) {
  const fs::path out = fs::temp_directory_path() / "affiso_test_out.json";
  fs::remove(out);
  const CliRun r = cli({"compute", "--family", "standard-gaussian", "--functional", "l1-norm", "--out", out.string()});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(out);
  const json b = json::parse(in);
  EXPECT_NEAR(b["records"][0]["value"].get<double>(), 1.0, 1e-12);
}

// ---- usage errors ---------------------------------------------------------------

TEST(Usage, UnknownFunctionalExitsTwo) {
  EXPECT_EQ(cli({"compute", "--family", "standard-gaussian", "--functional", "nope"}).code, 2);
}

TEST(Usage, UnknownCheckerExitsTwo) {
  EXPECT_EQ(cli({"verify", "--family", "standard-gaussian", "--checker", "nope"}).code, 2);
}

TEST(Usage, UnknownFamilyKindExitsTwo) {
  EXPECT_EQ(cli({"compute", "--family", "no-such-family", "--functional", "entropy"}).code, 2);
}

TEST(Usage, MissingSubcommandOrFlagExitsTwo) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"compute", "--bogus"}).code, 2);
  EXPECT_EQ(cli({"compute", "--family", "standard-gaussian", "--functional", "entropy", "--format", "xml"}).code, 2);
}

TEST(Usage, HelpExitsZero) { EXPECT_EQ(cli({"--help"}).code, 0); }

TEST(Usage, NothingToDoExitsTwo) {
  EXPECT_EQ(cli({"compute", "--family", "standard-gaussian"}).code, 2);
  EXPECT_EQ(cli({"verify"}).code, 2);
}

TEST(Usage, FamilyKindMismatchExitsTwo) {
  EXPECT_EQ(cli({"compute", "--family", "standard-gaussian", "--functional", "asa"}).code, 2);
  EXPECT_EQ(cli({"verify", "--family", "cap-gs", "--checker", "sandwich"}).code, 2);
  EXPECT_EQ(cli({"verify", "--family", "standard-gaussian", "--checker", "reverse-poincare"}).code, 2);
}

TEST(Usage, BadConfigFilesExitTwo) {
  EXPECT_EQ(cli({"compute", "--config", "/nonexistent/affiso.json"}).code, 2);
  EXPECT_EQ(cli({"compute", "--config", write_temp("bad.json", "{ not json").string()}).code, 2);
  EXPECT_EQ(cli({"compute", "--config", write_temp("key.json", R"({"familes": []})").string()}).code, 2);
  EXPECT_EQ(cli({"compute", "--config",
                 write_temp("ref.json", R"({"families":[{"kind":"standard-gaussian"}],
                                            "tasks":[{"family":"other","functional":"entropy"}]})")
                     .string()})
                .code,
            2);
  EXPECT_EQ(cli({"compute", "--config",
                 write_temp("dup.json", R"({"families":[{"kind":"cap-gs"},{"kind":"cap-gs"}],"functionals":["asa"]})")
                     .string()})
                .code,
            2);
  EXPECT_EQ(cli({"compute", "--config",
                 write_temp("construct.json", R"({"families":[{"kind":"product-power","p":0.5}],"functionals":["entropy"]})")
                     .string()})
                .code,
            2);
}

TEST(Usage, ConfigAndInlineFlagsAreExclusive) {
  EXPECT_EQ(cli({"compute", "--config", config("compute.json"), "--family", "cap-gs"}).code, 2);
}

// ---- config grammar ---------------------------------------------------------------

TEST(Config, MatricesNestedOrFlat) {
  const json nested = json::parse(R"({"kind":"gaussian-quadratic","n":2,"A":[[2,1],[1,1]]})");
  const json flat = json::parse(R"({"kind":"gaussian-quadratic","n":2,"A":[2,1,1,1]})");
  const auto a = affiso::cli::parse_family(nested), b = affiso::cli::parse_family(flat);
  ASSERT_TRUE(a.A && b.A);
  EXPECT_EQ(*a.A, *b.A);
  EXPECT_EQ((*a.A)(0, 1), 1.0);
  EXPECT_THROW(affiso::cli::parse_family(json::parse(R"({"kind":"gaussian-quadratic","n":2,"A":[1,2,3]})")),
               affiso::Error);
}

TEST(Config, TaskMatrixSizeIsInferred) {
  const auto t = affiso::cli::parse_task(json::parse(R"({"family":"f","checker":"affine-covariance","A":[2,1,1,1]})"), true);
  ASSERT_TRUE(t.A);
  EXPECT_EQ(t.A->rows(), 2);
  EXPECT_EQ((*t.A)(1, 0), 1.0);
}

TEST(Config, CartesianProductWhenNoTaskList) {
  const json j = json::parse(R"({"families":[{"name":"a","kind":"standard-gaussian"},{"name":"b","kind":"cap-gs"}],
                                 "functionals":["l1-norm","entropy"]})");
  const auto c = affiso::cli::parse_config(j, "compute");
  ASSERT_EQ(c.tasks.size(), 4u);
  EXPECT_EQ(c.tasks[0].family, "a");
  EXPECT_EQ(c.tasks[1].name, "entropy");
  EXPECT_EQ(c.tasks[2].family, "b");
  EXPECT_EQ(c.seed, 0u);
}

TEST(Config, QuadratureOverrides) {
  const json j = json::parse(R"({"families":[{"kind":"standard-gaussian"}],"functionals":["entropy"],
                                 "quadrature":{"method":"gauss-hermite","order":12},"seed":9})");
  const auto c = affiso::cli::parse_config(j, "compute");
  EXPECT_EQ(c.quadrature.method, affiso::Method::gauss_hermite);
  EXPECT_EQ(c.quadrature.order, 12);
  EXPECT_EQ(c.seed, 9u);
  const CliRun r = cli({"compute", "--config", write_temp("quad.json", j.dump()).string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.body()["records"][0]["method"], "gauss-hermite(12)");
  EXPECT_EQ(r.body()["seed"], 9);
  EXPECT_EQ(cli({"compute", "--config", write_temp("quad.json", j.dump()).string(), "--seed", "4"}).body()["seed"], 4);
}

// ---- verify ------------------------------------------------------------------------

TEST(Verify, GoldenSuiteHasNoViolations) {
  const CliRun r = cli({"verify", "--config", config("golden.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json s = r.body()["summary"];
  EXPECT_EQ(s["violated"], 0);
  EXPECT_EQ(s["errors"], 0);
  EXPECT_GT(s["equality"].get<long>(), 10);
  EXPECT_EQ(s["records"].get<long>(),
            s["holds"].get<long>() + s["holds_within_error"].get<long>());
}

TEST(Verify, CorruptedFamilyRecordsHypothesisError) {
  const CliRun r = cli({"verify", "--config", config("corrupted.json")});
  EXPECT_EQ(r.code, 1);
  for (const auto& rec : r.body()["records"]) {
    EXPECT_EQ(rec["status"], "error");
    EXPECT_EQ(rec["error_kind"], "hypothesis");
  }
}

TEST(Verify, EqualityFamilyIsFlagged) {
  const CliRun r = cli({"verify", "--family", "standard-gaussian", "--n", "2", "--checker", "inverse-log-sobolev"});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.body()["records"][0]["equality"].get<bool>());
  const CliRun q = cli({"verify", "--family", "product-power", "--p", "4", "--checker", "inverse-log-sobolev"});
  EXPECT_FALSE(q.body()["records"][0]["equality"].get<bool>());
  EXPECT_EQ(q.body()["records"][0]["verdict"], "holds");
}

TEST(Verify, DerivativeChainGivesTwoRecords) {
  const CliRun r = cli({"verify", "--family", "hermite-basis", "--k", "5", "--checker", "derivative-chain", "--m", "1"});
  ASSERT_EQ(r.code, 0);
  const json recs = r.body()["records"];
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0]["lhs"], 5.0);
  EXPECT_EQ(recs[0]["rhs"], 11.0);
  EXPECT_EQ(recs[1]["rhs"], 15.0);
}

TEST(Verify, ViolationExitsOne) {
  using affiso::cli::detail::Row;
  Row ok, bad;
  ok.verdict = "holds";
  bad.verdict = "violated";
  affiso::cli::RunConfig c;
  EXPECT_EQ(affiso::cli::detail::assemble("verify", c, {{ok}}).exit_code, 0);
  const auto r = affiso::cli::detail::assemble("verify", c, {{ok}, {bad}});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(r.body["summary"]["violated"], 1);
}

TEST(Verify, IdentityReportRejectsMismatch) {
  using affiso::cli::detail::identity_report;
  EXPECT_EQ(identity_report("id", "", 1.0, 0.0, 1.00001, 0.0, 1e-4).verdict, affiso::Verdict::holds);
  EXPECT_EQ(identity_report("id", "", 1.0, 0.0, 1.01, 0.0, 1e-4).verdict, affiso::Verdict::violated);
  EXPECT_EQ(identity_report("id", "", 1.01, 0.0, 1.0, 0.0, 1e-4).verdict, affiso::Verdict::violated);
}

TEST(Verify, AffineCovarianceDefaultMap) {
  const CliRun r = cli({"verify", "--family", "cap-gs", "--n", "2", "--checker", "affine-covariance", "--lambda", "2"});
  ASSERT_EQ(r.code, 0) << r.out;
  const json rec = r.body()["records"][0];
  EXPECT_TRUE(rec["equality"].get<bool>());
  EXPECT_NEAR(rec["extras"]["det_A"].get<double>(), 1.25, 1e-15);
}

// ---- determinism -------------------------------------------------------------------

TEST(Determinism, RepeatedRunsAreByteIdentical) {
  const CliRun a = cli({"verify", "--config", config("golden.json")});
  const CliRun b = cli({"verify", "--config", config("golden.json")});
  EXPECT_EQ(a.out, b.out);
}

TEST(Determinism, WorkerCountDoesNotChangeTheReport) {
  const CliRun a = cli({"verify", "--config", config("golden.json"), "--jobs", "1"});
  const CliRun b = cli({"verify", "--config", config("golden.json"), "--jobs", "3"});
  EXPECT_EQ(a.out, b.out);
}

TEST(Determinism, JsonBodyHasNoTiming) {
  const CliRun r = cli({"compute", "--family", "standard-gaussian", "--functional", "entropy"});
  EXPECT_EQ(r.out.find("seconds"), std::string::npos);
}

TEST(Determinism, JobsEnvironmentDefault) {
  ::setenv("AFFISO_JOBS", "3", 1);
  EXPECT_EQ(affiso::default_jobs(), 3);
  ::setenv("AFFISO_JOBS", "zero", 1);
  EXPECT_EQ(affiso::default_jobs(), 1);
  ::unsetenv("AFFISO_JOBS");
  EXPECT_EQ(affiso::default_jobs(), 1);
}

// ---- sweep ---------------------------------------------------------------------------

TEST(Sweep, PowerSweepMatchesClosedFormAndCrossesZeroAtTwo) {
  const CliRun r = cli({"sweep", "--config", config("sweep_p.json"), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json rows = r.body()["rows"];
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& row : rows) {
    const double lhs = row["lhs"], rhs = row["rhs"];
    EXPECT_NEAR(lhs, row["reference_lhs"].get<double>(), 1e-4 * std::abs(lhs));
    EXPECT_NEAR(rhs, row["reference_rhs"].get<double>(), 1e-4 * std::abs(rhs));
    if (row["value"] == 2.0) EXPECT_NEAR(row["margin"].get<double>(), 0.0, 1e-6);
    else EXPECT_GT(row["margin"].get<double>(), 0.1);
  }
}

TEST(Sweep, DefaultsToCsvWithFixedColumns) {
  const CliRun r = cli({"sweep", "--family", "product-power", "--variable", "p", "--values", "2", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = csv_lines(r.out);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0],
            "variable,value,family,task,lhs,lhs_err,rhs,rhs_err,margin,reference_lhs,reference_rhs,reference_margin,status");
  EXPECT_EQ(lines[1].substr(0, 6), "p,2,\"p");
}

TEST(Sweep, OrderSweepConvergesToGaussianEntropy) {
  const CliRun r = cli({"sweep", "--config", config("sweep_order.json"), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json rows = r.body()["rows"];
  const double target = -0.5 * std::log(2.0 * M_PI * M_E);
  EXPECT_NEAR(rows.back()["lhs"].get<double>(), target, 1e-12);
  EXPECT_NEAR(rows.back()["reference_lhs"].get<double>(), target, 1e-15);
}

TEST(Sweep, SSweepSkipsNonConcaveRowsAndApproachesReference) {
  const CliRun r = cli({"sweep", "--config", config("sweep_s_gaussian.json"), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json rows = r.body()["rows"];
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0]["status"].get<std::string>().rfind("skipped", 0), 0u);
  const double ref = rows[1]["reference_margin"];
  double prev = std::abs(rows[1]["margin"].get<double>() - ref);
  for (std::size_t i = 2; i < rows.size(); ++i) {
    const double gap = std::abs(rows[i]["margin"].get<double>() - ref);
    EXPECT_LT(gap, prev);
    prev = gap;
  }
}

TEST(Sweep, EpsSweepApproachesUnregularizedMargin) {
  const CliRun r = cli({"sweep", "--config", config("sweep_eps.json"), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json rows = r.body()["rows"];
  double prev = 1e300;
  for (const auto& row : rows) {
    const double gap = std::abs(row["margin"].get<double>() - row["reference_margin"].get<double>());
    EXPECT_LT(gap, prev);
    prev = gap;
  }
}

TEST(Sweep, BadVariableOrValuesExitTwo) {
  EXPECT_EQ(cli({"sweep", "--family", "product-power", "--variable", "q", "--values", "1"}).code, 2);
  EXPECT_EQ(cli({"sweep", "--family", "product-power", "--variable", "p"}).code, 2);
  EXPECT_EQ(cli({"sweep", "--family", "standard-gaussian", "--variable", "s", "--values", "2.5"}).code, 2);
}

TEST(Sweep, RowFailuresAreRecordedAndTheSweepContinues) {
  // p = 1 is outside the family; the other rows still run
  const CliRun r = cli({"sweep", "--family", "product-power", "--variable", "p", "--values", "1", "2", "--format", "json"});
  EXPECT_EQ(r.code, 1);
  const json rows = r.body()["rows"];
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NE(rows[0]["status"], "ok");
  EXPECT_EQ(rows[1]["status"], "ok");
}

}  // namespace
