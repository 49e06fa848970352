#include "cascade/cli.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cascade/csv.h"
#include "cascade/manifest.h"
#include "cascade/optimize.h"
#include "gtest/gtest.h"

using namespace cascade;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

CsvDocument parse(const std::string& text) {
  std::istringstream in(text);
  return read_csv(in);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

class CliFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cascade_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST(Cli, analytic_point) {
  const Outcome o = run({"analytic", "--n", "0", "--snr", "20", "--rho", "3", "--nu", "0.4"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const CsvDocument doc = parse(o.out);
  EXPECT_EQ(doc.meta("kind"), "analytic");
  const ErrorRates expected = error_rates_derivative({3.0, 0.4, 20.0, 0});
  EXPECT_EQ(doc.number(0, "eps"), expected.eps_avg);
  EXPECT_EQ(doc.number(0, "eps_plus"), expected.eps_plus);
}

TEST(Cli, analytic_routes_agree) {
  const Outcome d = run({"analytic", "--n", "2", "--snr", "20", "--rho", "3", "--nu", "0.4"});
  const Outcome q = run({"analytic", "--n", "2", "--snr", "20", "--rho", "3", "--nu", "0.4", "--route", "quadrature"});
  ASSERT_EQ(q.code, kExitOk) << q.err;
  EXPECT_NEAR(parse(d.out).number(0, "eps"), parse(q.out).number(0, "eps"), 1e-9);
  EXPECT_EQ(parse(q.out).meta("route"), "quadrature");
}

TEST(Cli, analytic_optimize_matches_sweep) {
  const Outcome o = run({"analytic", "--n", "1", "--snr", "20", "--optimize"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const Fig3Table table = sweep_fig3({20.0}, {1}, 1);
  EXPECT_EQ(parse(o.out).number(0, "eps"), table.rows[0].result.eps_opt);
  EXPECT_EQ(parse(o.out).number(0, "rho"), table.rows[0].result.rho_opt);
}

TEST(Cli, usage_errors_exit_2) {
  EXPECT_EQ(run({"analytic", "--n", "0", "--snr", "20", "--rho", "-1"}).code, kExitUsage);
  EXPECT_EQ(run({"analytic", "--n", "0", "--snr", "20"}).code, kExitUsage);
  EXPECT_EQ(run({"analytic", "--n", "0"}).code, kExitUsage);
  EXPECT_EQ(run({"analytic", "--n", "0", "--snr", "20", "--rho", "1", "--route", "magic"}).code, kExitUsage);
  EXPECT_EQ(run({"sample-tau", "--draws", "0"}).code, kExitUsage);
  EXPECT_EQ(run({"no-such-command"}).code, kExitUsage);
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"simulate", "--dt", "1"}).code, kExitUsage);
  EXPECT_EQ(run({"filter-one", "--in", "/nonexistent/record.csv"}).code, kExitUsage);
}

TEST(Cli, help_and_version) {
  const Outcome help = run({"--help"});
  EXPECT_EQ(help.code, kExitOk);
  EXPECT_NE(help.out.find("fig3"), std::string::npos);
  const Outcome version = run({"--version"});
  EXPECT_EQ(version.code, kExitOk);
}

TEST(Cli, sample_tau_summary) {
  const Outcome o = run({"sample-tau", "--n", "2", "--gamma", "2", "--draws", "5000", "--seed", "4"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const CsvDocument doc = parse(o.out);
  EXPECT_EQ(doc.number(0, "expected_mean"), 0.5);
  EXPECT_NEAR(doc.number(0, "mean"), 0.5, 4.0 * doc.number(0, "mean_stderr"));
  EXPECT_NEAR(doc.number(0, "expected_variance"), 0.25 / 3.0, 1e-15);
  EXPECT_GT(doc.number(0, "ks_p"), 0.001);
}

TEST_F(CliFiles, fig3_writes_csv_and_manifest) {
  const std::string out = path("fig3.csv");
  const Outcome o = run({"fig3", "--snr-grid", "10,100", "--n-max", "1", "--threads", "1", "--out", out});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  EXPECT_TRUE(o.out.empty());
  const CsvDocument doc = parse(slurp(out));
  ASSERT_EQ(doc.rows.size(), 4u);
  EXPECT_LT(doc.number(1, "eps"), doc.number(0, "eps"));
  const RunManifest manifest = read_manifest(manifest_path_for(out));
  EXPECT_EQ(manifest.command, "fig3");
  ASSERT_EQ(manifest.outputs.size(), 1u);
  EXPECT_EQ(manifest.outputs[0], out);
  EXPECT_FALSE(manifest.version.empty());
}

TEST_F(CliFiles, simulate_then_filter) {
  const std::string record = path("record.csv");
  const Outcome sim = run({"simulate", "--n", "1", "--snr", "20", "--state", "minus", "--t", "2",
                           "--seed", "9", "--out", record});
  ASSERT_EQ(sim.code, kExitOk) << sim.err;
  const std::string trace = path("trace.csv");
  const Outcome filt = run({"filter-one", "--n", "1", "--snr", "20", "--in", record, "--trace", trace});
  ASSERT_EQ(filt.code, kExitOk) << filt.err;
  const CsvDocument result = parse(filt.out);
  EXPECT_LT(result.number(0, "logLambda"), 0.0);
  EXPECT_EQ(result.text(0, "decision"), "minus");
  const CsvDocument trace_doc = parse(slurp(trace));
  EXPECT_EQ(trace_doc.number(trace_doc.rows.size() - 1, "logLambda"), result.number(0, "logLambda"));

  const Outcome again = run({"simulate", "--n", "1", "--snr", "20", "--state", "minus", "--t", "2", "--seed", "9"});
  EXPECT_EQ(again.out, slurp(record));
}

TEST_F(CliFiles, replay_is_byte_identical) {
  const std::string out = path("fig6.csv");
  const Outcome first = run({"fig6", "--ratios", "1,3", "--modes", "rates", "--trials", "60", "--no-references",
                             "--t", "1", "--threads", "1", "--out", out});
  ASSERT_EQ(first.code, kExitOk) << first.err;
  const std::string replayed = path("fig6_replay.csv");
  const Outcome second = run({"replay", "--manifest", manifest_path_for(out), "--threads", "3", "--out", replayed});
  ASSERT_EQ(second.code, kExitOk) << second.err;
  EXPECT_EQ(slurp(out), slurp(replayed));
  EXPECT_EQ(run({"replay", "--manifest", path("missing.json")}).code, kExitUsage);
}

TEST_F(CliFiles, seed_from_environment) {
  const std::string a = path("a.csv");
  const std::string b = path("b.csv");
  ::setenv(kSeedEnvVar, "777", 1);
  const Outcome o = run({"simulate", "--t", "0.5", "--out", a});
  ::unsetenv(kSeedEnvVar);
  ASSERT_EQ(o.code, kExitOk) << o.err;
  run({"simulate", "--t", "0.5", "--seed", "777", "--out", b});
  EXPECT_EQ(slurp(a), slurp(b));
  const RunManifest manifest = read_manifest(manifest_path_for(a));
  ASSERT_EQ(manifest.seeds.size(), 1u);
  EXPECT_EQ(manifest.seeds[0], 777u);
  bool explicit_seed = false;
  for (std::size_t i = 0; i + 1 < manifest.argv.size(); ++i) {
    if (manifest.argv[i] == "--seed" && manifest.argv[i + 1] == "777") explicit_seed = true;
  }
  EXPECT_TRUE(explicit_seed);
}
