// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "homolab/assembly.hpp"
#include "homolab/coefficient_field.hpp"
#include "homolab/eigensolver.hpp"
#include "homolab/experiments.hpp"

namespace homolab {

/// Validated run configuration. Every key has a default except coeff.kind.
struct RunConfig {
  std::string origin;  ///< file path or "<string>"

  std::string coeff_kind;  ///< constant | laminate_sine | product_sine | reciprocal_sine
  int dim = 2;
  double coeff_c = 1.0;     ///< constant value
  double coeff_mu = 1.0;
  double coeff_r = 0.5;
  double coeff_base = 2.0;  ///< reciprocal_sine denominator offset

  MeshRule mesh_rule = MeshRule::eps_over_16;
  int mesh_n = 128;
  int cell_n = 256;
  double cell_tol = 1e-10;
  AHatPolicy a_hat_policy = AHatPolicy::matched;

  double eig_tol = 1e-9;
  int eig_max_iter = 400;
  int eig_block = 4;
  int eig_count = 10;
  std::string eig_operator = "homogenized";  ///< homogenized | oscillating

  std::vector<double> eps_list{1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  int k_max = 20;
  std::string output_dir = "homolab_out";
  std::uint64_t seed = 20240601;
  int jobs = 1;

  SourceKind source = SourceKind::one;
  bool richardson = true;
  double layer_c = 1.0;
  double oned_eps2_min = 0.0;
  double oned_eps2_max = 4.0;
  int oned_n = 0;
  int certify_samples = 64;

  /// Every key with its effective value, sorted by key.
  std::map<std::string, std::string> resolved() const;
};

/// Parses `key = value` lines (`#` starts a comment). Reals accept rational
/// literals such as 1/8; lists are comma separated. Throws ConfigError with
/// the offending line for unknown keys, duplicates, malformed or out-of-range
/// values, and a line-0 error for a missing coeff.kind.
RunConfig parse_config(const std::string& text, const std::string& origin = "<string>");
RunConfig parse_config_file(const std::string& path);

/// Parses a real number literal, including p/q rationals. Throws InvalidArgument.
double parse_real_literal(const std::string& text);

/// `key = value` lines of resolved(), as written to resolved_config.txt.
std::string resolved_config_text(const RunConfig& config);

CoefficientField make_field(const RunConfig& config);
SweepOptions make_sweep_options(const RunConfig& config);
EigenOptions make_eigen_options(const RunConfig& config);

}  // namespace homolab
