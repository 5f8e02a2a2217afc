#include <gtest/gtest.h>

#include <cmath>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "abcheck/output.hpp"

using namespace abcheck;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t data_rows(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t rows = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.starts_with("#")) continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    ++rows;
  }
  return rows;
}

}  // namespace

TEST(FormatDouble, RoundTripsAndSpecials) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -2.5}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(std::nan("")), "nan");
}

TEST(Output, EmptyEnsembleIsHeaderOnly) {
  ExperimentSummary s;
  s.config_json = "{}";
  std::ostringstream out;
  write_trials_csv(out, s);
  EXPECT_EQ(data_rows(out.str()), 0u);
  EXPECT_TRUE(out.str().starts_with("# config: {}\n"));
}

TEST(Output, FixedSeedIsByteStable) {
  auto c = preset("heat-cfg3", "fe-be");
  c.experiment.trials = 10;
  c.experiment.threads = 2;
  const auto base = std::filesystem::temp_directory_path() / "abcheck_output_test";
  std::filesystem::remove_all(base);
  const auto a = emit_outputs(run_experiment(c), base / "a");
  const auto b = emit_outputs(run_experiment(c), base / "b");
  for (auto member : {&OutputPaths::trials, &OutputPaths::summary, &OutputPaths::curve_at_fault,
                      &OutputPaths::curve_fault_or_next}) {
    const auto text = slurp(a.*member);
    EXPECT_FALSE(text.empty());
    EXPECT_EQ(text, slurp(b.*member)) << (a.*member).string();
  }
  EXPECT_EQ(data_rows(slurp(a.trials)), 10u);
  EXPECT_EQ(data_rows(slurp(a.curve_fault_or_next)), c.experiment.grid_points);
  EXPECT_TRUE(slurp(a.summary).starts_with("# config: " + c.to_json()));
  std::filesystem::remove_all(base);
}

TEST(Output, PrefixAndUnwritablePath) {
  ExperimentSummary s;
  const auto dir = std::filesystem::temp_directory_path() / "abcheck_output_prefix";
  const auto p = emit_outputs(s, dir, "both_");
  EXPECT_EQ(p.trials.filename(), "both_trials.csv");
  std::filesystem::remove_all(dir);
  EXPECT_THROW((void)emit_outputs(s, "/proc/abcheck_no_such_dir"), std::exception);
}
