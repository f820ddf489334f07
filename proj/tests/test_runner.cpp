// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <stdlib.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "homolab/config.hpp"
#include "homolab/runner.hpp"

using namespace homolab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("homolab_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Cell (row, col) of a CSV file, 0-based with the header as row 0.
double cell(const fs::path& p, int row, int col) {
  std::ifstream in(p);
  std::string line;
  for (int i = 0; i <= row; ++i) std::getline(in, line);
  std::stringstream s(line);
  std::string c;
  for (int i = 0; i <= col; ++i) std::getline(s, c, ',');
  return std::stod(c);
}

RunConfig config_for(const std::string& text, const fs::path& out) {
  auto c = parse_config(text);
  c.output_dir = out.string();
  return c;
}

}  // namespace

TEST(Runner, HomogenizeLaminate) {
  const auto dir = fresh_dir("homogenize");
  const auto r = run_command("homogenize", config_for("coeff.kind = laminate_sine\ncell.n = 64\n", dir));
  ASSERT_EQ(r.exit_code, exit_ok) << r.message;
  EXPECT_NEAR(cell(dir / "homogenized.csv", 1, 2), std::sqrt(0.75), 1e-3);
  EXPECT_TRUE(fs::exists(dir / "resolved_config.txt"));
  const auto manifest = slurp(dir / "run_manifest.txt");
  EXPECT_NE(manifest.find("exit_code = 0"), std::string::npos);
  EXPECT_NE(manifest.find("homogenized.csv"), std::string::npos);
}

TEST(Runner, EigConstantField) {
  const auto dir = fresh_dir("eig");
  const auto r =
      run_command("eig", config_for("coeff.kind = constant\nmesh.rule = fixed\nmesh.n = 32\ncell.n = 16\n", dir));
  ASSERT_EQ(r.exit_code, exit_ok) << r.message;
  EXPECT_NEAR(cell(dir / "spectrum.csv", 1, 3), 2 * std::numbers::pi * std::numbers::pi, 0.1);
  EXPECT_TRUE(fs::exists(dir / "weyl.csv"));
}

TEST(Runner, UnknownCommandAndBadConfig) {
  const auto dir = fresh_dir("bad");
  EXPECT_EQ(run_command("frobnicate", config_for("coeff.kind = constant\n", dir)).exit_code, exit_config);
  EXPECT_FALSE(fs::exists(dir));
  const auto r = run_command("oned-scan", config_for("coeff.kind = constant\n", dir));
  EXPECT_EQ(r.exit_code, exit_config);
}

TEST(Runner, ReportWithoutTablesFails) {
  const auto dir = fresh_dir("report");
  EXPECT_EQ(run_command("report", config_for("coeff.kind = constant\n", dir)).exit_code, exit_config);
}

TEST(Runner, EnvironmentOverridesOutputDir) {
  const auto dir = fresh_dir("env_cfg");
  const auto env = fresh_dir("env_override");
  setenv("HOMOLAB_OUT", env.c_str(), 1);
  const auto r = run_command("certify", config_for("coeff.kind = product_sine\ncertify.samples = 16\n", dir));
  unsetenv("HOMOLAB_OUT");
  ASSERT_EQ(r.exit_code, exit_ok) << r.message;
  EXPECT_EQ(r.output_dir, env.string());
  EXPECT_TRUE(fs::exists(env / "certify.csv"));
  EXPECT_FALSE(fs::exists(dir));
}

TEST(Runner, DeterministicOutputs) {
  const std::string text = "coeff.kind = reciprocal_sine\ncoeff.dim = 1\neps_list = 1/8\noned.eps2_max = 1\n";
  const auto a = fresh_dir("det_a"), b = fresh_dir("det_b");
  ASSERT_EQ(run_command("oned-scan", config_for(text, a)).exit_code, exit_ok);
  auto cb = config_for(text, b);
  cb.jobs = 2;
  ASSERT_EQ(run_command("oned-scan", cb).exit_code, exit_ok);
  EXPECT_EQ(slurp(a / "oned_scan.csv"), slurp(b / "oned_scan.csv"));
  EXPECT_FALSE(slurp(a / "oned_scan.csv").empty());
}
