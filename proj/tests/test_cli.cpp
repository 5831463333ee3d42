#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stochvote/cli.hpp"

namespace stochvote::cli {
namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<CsvRow> rows_of(const std::string& csv) {
  std::istringstream in(csv);
  return read_csv(in);
}

const CsvRow& max_group(const std::vector<CsvRow>& rows) {
  return *std::max_element(rows.begin(), rows.end(), [](const CsvRow& a, const CsvRow& b) {
    return *a.group_total < *b.group_total;
  });
}

TEST(Cli, ReferenceSweepPeaksNearFourHundredTen) {
  const auto r = invoke({"--n", "300", "--beta", "0.46", "--mu", "-0.3", "--sigma", "10", "--s",
                         "1000", "--principle", "A", "--alpha", "0.4:0.6"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = rows_of(r.out);
  ASSERT_EQ(rows.size(), 121u);  // step 1/(2n)
  const CsvRow& top = max_group(rows);
  EXPECT_NEAR(*top.group_total, 410.0, 0.05 * 410.0);
  EXPECT_NEAR(top.alpha, 0.494, 0.005);
}

TEST(Cli, SinglePointRatioOfGroupToEgoist) {
  const auto r = invoke({"--alpha", "0.5:0.5:1", "--principle", "B", "--mu", "0", "--n", "300",
                         "--egoists", "297", "--s", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = rows_of(r.out);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(*rows[0].group_step / *rows[0].egoist_step, 1.75, 0.05);
}

TEST(Cli, SimulationIsReproducible) {
  const std::vector<std::string> args{"--n", "15", "--egoists", "10", "--mu", "0.2", "--s", "20",
                                      "--principle", "A,B", "--alpha", "0.2:0.8:0.3",
                                      "--mode", "both", "--replications", "300", "--seed", "42"};
  const auto a = invoke(args);
  const auto b = invoke(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto rows = rows_of(a.out);
  EXPECT_EQ(rows.size(), 2u * 3u * 2u);
  EXPECT_EQ(std::count_if(rows.begin(), rows.end(),
                          [](const CsvRow& row) { return row.mode == "simulate"; }),
            6);
}

TEST(Cli, ParameterErrorsAreReported) {
  const std::vector<std::pair<std::vector<std::string>, std::string>> cases{
      {{"--n", "10", "--beta", "0", "--principle", "Aprime"}, "Aprime is undefined"},
      {{"--n", "10", "--egoists", "10"}, "g = 0"},
      {{"--n", "10", "--egoists", "4", "--alpha", "1.0"}, "[0, 1)"},
      {{"--n", "10"}, "exactly one of --beta or --egoists"},
      {{"--n", "10", "--beta", "0.2", "--egoists", "4"}, "exactly one of --beta or --egoists"},
      {{"--n", "10", "--beta", "0.13"}, "2*beta*n"},
      {{"--n", "10", "--egoists", "4", "--sigma", "0"}, "sigma"},
      {{"--n", "10", "--egoists", "4", "--principle", "C"}, "principle"},
      {{"--n", "10", "--egoists", "4", "--mode", "fast"}, "--mode"},
      {{"--n", "10", "--egoists", "4", "--format", "both"}, "--out"},
      {{"--n", "10", "--egoists", "4", "--alpha", "0.6:0.2"}, "below"},
  };
  for (const auto& [args, needle] : cases) {
    const auto r = invoke(args);
    EXPECT_EQ(r.code, 1) << needle;
    EXPECT_NE(r.err.find(needle), std::string::npos) << r.err;
    EXPECT_TRUE(r.out.empty());
  }
}

TEST(Cli, UnknownFlagIsAParseError) {
  const auto r = invoke({"--bogus", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST(Cli, GridNoteWhenStopIsMissed) {
  const auto r = invoke({"--n", "10", "--egoists", "4", "--alpha", "0:0.25:0.1"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("note: alpha grid ends at 0.2"), std::string::npos) << r.err;
  EXPECT_EQ(rows_of(r.out).size(), 3u);
}

TEST(Cli, ConfigFileWithOverrides) {
  const std::string cfg = std::string(STOCHVOTE_CONFIG_DIR) + "/reference.cfg";
  const RunSpec spec = parse_run_spec({"--config", cfg, "--s", "10", "--alpha", "0.5"});
  EXPECT_EQ(spec.n, 300);
  EXPECT_EQ(*spec.beta, 0.46);
  EXPECT_EQ(spec.mu, -0.3);
  EXPECT_EQ(spec.steps, 10);
  EXPECT_EQ(spec.principles.size(), 4u);
  EXPECT_EQ(spec.principles[2], Principle::APrime);
  EXPECT_EQ(spec.alpha.start, 0.5);

  const auto r = invoke({"--config", cfg, "--alpha", "0.494", "--principle", "A"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = rows_of(r.out);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(*rows[0].group_total, 416.08, 0.01);
}

TEST(Cli, WritesCsvAndSvgFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "stochvote_cli_test";
  std::filesystem::create_directories(dir);
  const std::string csv_path = (dir / "sweep.csv").string();
  const auto r = invoke({"--n", "30", "--egoists", "20", "--mu", "-0.1", "--principle", "A,Adprime",
                         "--format", "both", "--out", csv_path});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream csv(csv_path);
  EXPECT_EQ(rows_of(std::string(std::istreambuf_iterator<char>(csv), {})).size(), 2u * 60u);
  std::ifstream svg((dir / "sweep.svg").string());
  const std::string svg_text(std::istreambuf_iterator<char>(svg), {});
  EXPECT_NE(svg_text.find("<svg"), std::string::npos);
  EXPECT_NE(svg_text.find("n=30, egoists=20"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Cli, HelpersParseRangesAndPaths) {
  const AlphaRange single = parse_alpha_range("0.3");
  EXPECT_EQ(single.start, 0.3);
  EXPECT_EQ(single.stop, 0.3);
  EXPECT_FALSE(parse_alpha_range("0:0.5").step.has_value());
  EXPECT_FALSE(parse_alpha_range("0:0.5:auto").step.has_value());
  EXPECT_EQ(*parse_alpha_range("0:0.5:0.25").step, 0.25);
  EXPECT_THROW(parse_alpha_range("0:0.5:0"), parameter_error);
  EXPECT_THROW(parse_alpha_range("a:b"), parameter_error);
  EXPECT_THROW(parse_alpha_range("0:1:2:3"), parameter_error);
  EXPECT_EQ(svg_path_for("out/run.csv"), "out/run.svg");
  EXPECT_EQ(svg_path_for("out.d/run"), "out.d/run.svg");
  EXPECT_EQ(parse_principles("A,A'"), (std::vector<Principle>{Principle::A, Principle::APrime}));
  EXPECT_THROW(parse_principles("A,,B"), parameter_error);
}

}  // namespace
}  // namespace stochvote::cli
