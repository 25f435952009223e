#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lshape/function_table.hpp"
#include "lshape/random.hpp"
#include "lshape_cli/commands.hpp"
#include "lshape_cli/suites.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = lshape::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "lshape_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Cli, CountDotReport) {
  const auto r = run({"count", "--example", "dot", "--p", "3", "--n", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["command"], "count");
  EXPECT_EQ(j["results"]["cardinality"], "261");
  EXPECT_EQ(j["results"]["count"], "1215");
  EXPECT_EQ(j["results"]["closed_form_matches"], true);
  EXPECT_EQ(j.find("wall_clock_seconds"), j.end());
  EXPECT_EQ(r.out.find("warning"), std::string::npos);
  EXPECT_EQ(json::parse(r.out)["passed"], true);
}

TEST(Cli, ReportsAreByteIdentical) {
  const std::vector<std::vector<std::string>> cmds = {
      {"norm", "--random-dim", "2", "--u", "2", "3", "--seed", "9"},
      {"verify", "--suite", "inverse", "--trials", "10", "--seed", "4"},
      {"pseudorandomize", "--p", "3", "--n", "2", "--d", "1", "--seed", "2"},
  };
  for (const auto& c : cmds) {
    const auto a = run(c), b = run(c);
    EXPECT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
  }
}

TEST(Cli, SeedChangesRandomReports) {
  const auto a = run({"norm", "--random-dim", "2", "--u", "2", "--seed", "1"});
  const auto b = run({"norm", "--random-dim", "2", "--u", "2", "--seed", "2"});
  EXPECT_NE(a.out, b.out);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"verify", "--suite", "nope"}).code, 2);
  EXPECT_EQ(run({"count", "--p", "4", "--example", "dot"}).code, 2);
  EXPECT_EQ(run({"extremal", "--p", "3", "--n", "2", "--method", "exhaustive"}).code, 2);
}

TEST(Cli, ParseErrorNamesLine) {
  const auto path = scratch("bad_set.txt");
  {
    std::ofstream f(path);
    f << "p=3 m=2\n1\nnot-a-number\n";
  }
  const auto r = run({"count", "--input", path.string(), "--p", "3", "--n", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("3"), std::string::npos);
}

TEST(Cli, CountFromFileMatchesLibrary) {
  lshape::Rng rng(5);
  const auto s = lshape::random_set(rng, 3, 4, 0.4);
  const auto path = scratch("set.txt");
  {
    std::ofstream f(path);
    lshape::write_set(f, s);
  }
  const auto r = run({"count", "--input", path.string(), "--p", "3", "--n", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["results"]["cardinality"], std::to_string(s.cardinality()));
}

TEST(Cli, ConfigFileSuppliesOptions) {
  const auto path = scratch("config.ini");
  {
    std::ofstream f(path);
    f << "[extremal]\nmethod=exhaustive\n";
  }
  const auto r = run({"extremal", "--config", path.string(), "--p", "3", "--n", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["results"]["size"], "6");
}

TEST(Cli, TimingIsOptIn) {
  const auto r = run({"extremal", "--p", "3", "--n", "1", "--timing"});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(json::parse(r.out).contains("wall_clock_seconds"));
}

TEST(Cli, IncrementWritesTrajectory) {
  const auto traj = scratch("traj.jsonl");
  const auto r = run({"increment", "--planted", "halfA", "--p", "3", "--n", "2", "--seed", "7", "--trajectory",
                      traj.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(traj);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    const auto j = json::parse(line);
    EXPECT_TRUE(j.contains("seed"));
    ++lines;
  }
  EXPECT_GT(lines, 0);
}

TEST(Suites, AllPassAtSmallScale) {
  for (const auto& name : lshape::cli::suite_names()) {
    lshape::cli::SuiteOptions o;
    o.trials = 10;
    const auto r = lshape::cli::run_suite(name, o);
    EXPECT_TRUE(r.passed()) << name;
    EXPECT_GE(r.instances, 1u);
  }
  EXPECT_THROW(lshape::cli::run_suite("nope", {}), std::invalid_argument);
}
