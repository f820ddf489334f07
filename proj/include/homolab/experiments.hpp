// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "homolab/assembly.hpp"
#include "homolab/boundary.hpp"
#include "homolab/coefficient_field.hpp"
#include "homolab/domain.hpp"
#include "homolab/eigensolver.hpp"

namespace homolab {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int n_points = 0;
};

/// Least-squares line through (log x, log y). Needs >= 3 points, all positive.
FitResult fit_loglog_slope(std::span<const double> xs, std::span<const double> ys);

struct WeylEnvelope {
  double min = 0.0;  ///< min_k lambda_k / k^{2/d}
  double max = 0.0;
  double ratio = 0.0;
  bool flagged = false;  ///< ratio > 25
  int points = 0;
};

/// Envelope of lambda_k / k^{2/d}, k = 1..size. Needs >= 5 eigenvalues.
WeylEnvelope weyl_check(std::span<const double> lambdas, int dim);

/// Which homogenized tensor the sweeps compare against.
enum class AHatPolicy {
  matched,  ///< cell grid with the same cells per period as the domain mesh (n_cell = n * eps)
  fine,     ///< cell grid with `fine_cell_n` cells
};

AHatPolicy parse_a_hat_policy(const std::string& text);
std::string to_string(AHatPolicy policy);

struct SweepOptions {
  std::vector<double> eps_list{1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  int k_max = 20;
  MeshRule rule = MeshRule::eps_over_16;
  int fixed_n = 128;
  AHatPolicy a_hat_policy = AHatPolicy::matched;
  int fine_cell_n = 256;
  double cell_tol = 1e-10;
  EigenOptions eig;
  bool richardson = true;   ///< estimate FEM error of each gap from the h and 2h grids
  double c_layer = 1.0;     ///< boundary layer width factor for layer energies
  int jobs = 1;             ///< concurrent epsilon levels
  /// Progress callback, called once per finished level (may be empty).
  std::function<void(const std::string&)> progress;
};

struct GapRecord {
  double eps = 0.0;
  int k = 0;
  double lambda_eps = 0.0;
  double lambda_0 = 0.0;
  double gap = 0.0;
  double ratio_thm_a = 0.0;  ///< gap / (eps lambda_0^{3/2})
  double ratio_l2 = 0.0;     ///< gap / (eps lambda_0^2)
  double fem_error = 0.0;    ///< Richardson estimate of the discretization error in the gap
  bool resolved = false;     ///< fem_error <= 0.1 gap
  bool failed = false;       ///< solver failure for this level; numbers are meaningless
  std::string note;
};

struct FluxSweepRecord {
  FluxRecord flux;
  double layer_energy = 0.0;  ///< (1/eps) int_{Omega_{c eps}} |grad u|^2; NaN when the layer is empty
};

struct FluxSummary {
  int records = 0;
  double max_over_lambda_1p5 = 0.0;  ///< max flux / lambda^{3/2}
  double min_over_lambda_1p5 = 0.0;
  int refined_records = 0;           ///< records with eps^2 lambda < 1
  double max_refined = 0.0;          ///< max flux / (lambda (1 + eps lambda)) over those
  int low_frequency_records = 0;     ///< records with eps lambda <= 0.25
  double min_low_frequency = 0.0;    ///< min flux / lambda over those
  double min_layer_over_lambda = 0.0;  ///< min layer_energy / lambda over low-frequency records
};

FluxSummary summarize_fluxes(std::span<const FluxRecord> records, std::span<const double> layer_energy = {});

struct LevelInfo {
  double eps = 0.0;
  int n = 0;
  int cell_n = 0;
  Mat2 a_hat;
  bool failed = false;
  std::string error;
  double seconds = 0.0;
};

struct SpectralSweepResult {
  std::vector<GapRecord> gaps;         ///< sorted by (eps descending as given, k)
  std::vector<FluxSweepRecord> fluxes;
  std::vector<LevelInfo> levels;
  std::vector<double> homogenized_lambdas;  ///< lambda_0 on the finest level, for Weyl checks
  std::vector<double> oscillating_lambdas;  ///< lambda_eps on the finest level
};

/// Oscillating and homogenized Dirichlet spectra for every eps (index-paired),
/// the gap records, and boundary fluxes of the oscillating eigenfunctions.
/// Solver failures are recorded per level; the sweep itself does not throw.
SpectralSweepResult spectral_sweep(const CoefficientField& field, const SweepOptions& options);

std::vector<GapRecord> gap_sweep(const CoefficientField& field, const SweepOptions& options);

struct FluxSweepResult {
  std::vector<FluxSweepRecord> records;
  FluxSummary summary;
};

FluxSweepResult flux_sweep(const CoefficientField& field, const SweepOptions& options);

/// Homogenized tensor used for a level under the policy (cached per cell grid).
Mat2 sweep_a_hat(const CoefficientField& field, double eps, int n, const SweepOptions& options, int* cell_n = nullptr);

enum class SourceKind { one, sine };
SourceKind parse_source_kind(const std::string& text);
std::string to_string(SourceKind kind);

struct H1StudyRecord {
  ApproximationReport approx;
  double deviation_sup = 0.0;  ///< sup |Phi_eps - x| over both components
  double phi_min = 0.0;
  double phi_max = 0.0;
};

/// For every eps: u_eps, u_0 (same grid), Dirichlet correctors and the
/// approximation report for the source f.
std::vector<H1StudyRecord> h1_study(const CoefficientField& field, const SweepOptions& options,
                                    SourceKind source = SourceKind::one);

/// Runs fn(i) for i in [0, count) on up to `jobs` threads. Each index runs
/// exactly once; callers write results into slot i so output order is fixed.
void run_work_queue(int jobs, std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace homolab
