// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include "homolab/homolab.h"

namespace fs = std::filesystem;

TEST(CApi, VersionAndCommands) {
  EXPECT_GT(std::strlen(homolab_version()), 0u);
  ASSERT_EQ(homolab_command_count(), 9u);
  EXPECT_STREQ(homolab_command_name(0), "certify");
  EXPECT_EQ(homolab_command_name(99), nullptr);
}

TEST(CApi, ConfigErrorsCarryLine) {
  homolab_config* cfg = reinterpret_cast<homolab_config*>(0x1);
  EXPECT_EQ(homolab_config_parse_string("coeff.kind = constant\neig.tol = banana\n", &cfg), HOMOLAB_ERR_CONFIG);
  EXPECT_EQ(cfg, nullptr);
  EXPECT_EQ(homolab_last_error_line(), 2);
  EXPECT_NE(std::string(homolab_last_error()).find("banana"), std::string::npos);
  EXPECT_EQ(homolab_config_parse_file("/nonexistent.cfg", &cfg), HOMOLAB_ERR_CONFIG);
  EXPECT_EQ(homolab_config_parse_string(nullptr, &cfg), HOMOLAB_ERR_ARGUMENT);
  EXPECT_EQ(homolab_status_exit_code(HOMOLAB_ERR_CONFIG), 1);
  EXPECT_EQ(homolab_status_exit_code(HOMOLAB_ERR_NUMERICAL), 2);
  EXPECT_EQ(homolab_status_exit_code(HOMOLAB_OK), 0);
}

TEST(CApi, FieldAndHomogenize) {
  homolab_config* cfg = nullptr;
  ASSERT_EQ(homolab_config_parse_string("coeff.kind = laminate_sine\ncoeff.r = 0.5\n", &cfg), HOMOLAB_OK);
  homolab_field* f = nullptr;
  ASSERT_EQ(homolab_field_create(cfg, &f), HOMOLAB_OK);
  EXPECT_EQ(homolab_field_dim(f), 2);
  const double y[2] = {0.25, 0.0};
  double a[4];
  ASSERT_EQ(homolab_field_eval(f, y, a), HOMOLAB_OK);
  EXPECT_NEAR(a[0], 1.5, 1e-14);
  EXPECT_NEAR(a[1], 0.0, 1e-14);
  double ah[4];
  ASSERT_EQ(homolab_homogenize(f, 64, 1e-10, ah), HOMOLAB_OK);
  EXPECT_NEAR(ah[0], std::sqrt(0.75), 1e-3);
  EXPECT_NEAR(ah[3], 1.0, 1e-8);
  EXPECT_EQ(homolab_homogenize(f, 1, 1e-10, ah), HOMOLAB_ERR_ARGUMENT);
  homolab_field_destroy(f);
  homolab_config_destroy(cfg);
}

TEST(CApi, RunWritesOutputsAndLogs) {
  const auto dir = fs::temp_directory_path() / "homolab_capi_run";
  fs::remove_all(dir);
  homolab_config* cfg = nullptr;
  ASSERT_EQ(homolab_config_parse_string("coeff.kind = constant\ncell.n = 16\n", &cfg), HOMOLAB_OK);
  ASSERT_EQ(homolab_config_set_output_dir(cfg, dir.c_str()), HOMOLAB_OK);
  EXPECT_EQ(homolab_config_set_jobs(cfg, 0), HOMOLAB_ERR_ARGUMENT);
  EXPECT_NE(std::string(homolab_config_resolved_text(cfg)).find("coeff.kind = constant"), std::string::npos);
  int lines = 0, code = -1;
  auto sink = [](const char*, void* user) { ++*static_cast<int*>(user); };
  ASSERT_EQ(homolab_run("homogenize", cfg, sink, &lines, &code), HOMOLAB_OK);
  EXPECT_EQ(code, 0);
  EXPECT_GT(lines, 0);
  EXPECT_TRUE(fs::exists(dir / "homogenized.csv"));
  EXPECT_TRUE(fs::exists(dir / "run_manifest.txt"));
  ASSERT_EQ(homolab_run("nope", cfg, nullptr, nullptr, &code), HOMOLAB_OK);
  EXPECT_EQ(code, 1);
  homolab_config_destroy(cfg);
}
