// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "homolab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "homolab/cell_problem.hpp"
#include "homolab/diagnostics.hpp"
#include "homolab/error.hpp"

namespace homolab {

FitResult fit_loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw InvalidArgument("fit_loglog_slope: xs and ys differ in length");
  if (xs.size() < 3) throw InvalidArgument("fit_loglog_slope: at least 3 points are required");
  const auto n = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  std::vector<double> lx(xs.size()), ly(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0) || !std::isfinite(xs[i]) || !std::isfinite(ys[i]))
      throw InvalidArgument("fit_loglog_slope: data must be finite and positive");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("fit_loglog_slope: xs are all equal");
  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  fit.n_points = static_cast<int>(xs.size());
  return fit;
}

WeylEnvelope weyl_check(std::span<const double> lambdas, int dim) {
  if (dim != 1 && dim != 2) throw InvalidArgument("weyl_check: dimension must be 1 or 2");
  if (lambdas.size() < 5) throw InvalidArgument("weyl_check: at least 5 eigenvalues are required");
  WeylEnvelope env;
  env.min = std::numeric_limits<double>::infinity();
  env.max = 0.0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) throw InvalidArgument("weyl_check: eigenvalues must be positive");
    const double v = lambdas[i] / std::pow(static_cast<double>(i + 1), 2.0 / dim);
    env.min = std::min(env.min, v);
    env.max = std::max(env.max, v);
  }
  env.ratio = env.max / env.min;
  env.flagged = env.ratio > 25.0;
  env.points = static_cast<int>(lambdas.size());
  return env;
}

AHatPolicy parse_a_hat_policy(const std::string& text) {
  if (text == "matched") return AHatPolicy::matched;
  if (text == "fine") return AHatPolicy::fine;
  throw InvalidArgument("unknown homogenized tensor policy '" + text + "' (expected matched or fine)");
}

std::string to_string(AHatPolicy policy) { return policy == AHatPolicy::matched ? "matched" : "fine"; }

SourceKind parse_source_kind(const std::string& text) {
  if (text == "one") return SourceKind::one;
  if (text == "sine") return SourceKind::sine;
  throw InvalidArgument("unknown source kind '" + text + "' (expected one or sine)");
}

std::string to_string(SourceKind kind) { return kind == SourceKind::one ? "one" : "sine"; }

void run_work_queue(int jobs, std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

int cell_grid_for(double eps, int n, const SweepOptions& options) {
  if (options.a_hat_policy == AHatPolicy::fine) return options.fine_cell_n;
  return std::max(2, static_cast<int>(std::lround(n * eps)));
}

class AHatCache {
 public:
  AHatCache(const CoefficientField& field, double tol) : field_(field), tol_(tol) {}

  Mat2 get(int cell_n) {
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(cell_n); it != cache_.end()) return it->second;
    }
    const Mat2 a = compute_homogenized(field_, cell_n, tol_).a_hat;
    std::lock_guard lock(mutex_);
    cache_.emplace(cell_n, a);
    return a;
  }

 private:
  const CoefficientField& field_;
  double tol_;
  std::mutex mutex_;
  std::map<int, Mat2> cache_;
};

void validate(const SweepOptions& options) {
  if (options.eps_list.empty()) throw InvalidArgument("sweep: eps_list is empty");
  for (std::size_t i = 0; i < options.eps_list.size(); ++i) {
    const double e = options.eps_list[i];
    if (!(e > 0.0) || e > 1.0) throw InvalidArgument("sweep: eps must lie in (0, 1]");
    if (i > 0 && !(e < options.eps_list[i - 1])) throw InvalidArgument("sweep: eps_list must be strictly decreasing");
  }
  if (options.k_max < 1) throw InvalidArgument("sweep: k_max must be positive");
  if (options.fixed_n < 2) throw InvalidArgument("sweep: mesh.n must be at least 2");
  if (options.fine_cell_n < 2) throw InvalidArgument("sweep: cell.n must be at least 2");
}

std::vector<double> lambdas_of(const std::vector<EigenPair>& pairs) {
  std::vector<double> out;
  for (const auto& p : pairs) out.push_back(p.lambda);
  return out;
}

struct LevelResult {
  LevelInfo info;
  std::vector<GapRecord> gaps;
  std::vector<FluxSweepRecord> fluxes;
  std::vector<double> lambda_eps, lambda_0;
};

LevelResult run_level(const CoefficientField& field, double eps, const SweepOptions& options, AHatCache& cache) {
  const auto start = std::chrono::steady_clock::now();
  const int dim = field.dim();
  LevelResult out;
  out.info.eps = eps;
  const int n = cells_for(options.rule, eps, options.fixed_n);
  out.info.n = n;
  out.info.cell_n = cell_grid_for(eps, n, options);
  const int count = options.k_max;

  // Eigenvalue differences lambda_eps - lambda_0 on grid m, with fluxes on the primary grid.
  auto solve_grid = [&](int m, bool primary, std::vector<double>& lam_eps, std::vector<double>& lam_0) {
    const DomainGrid grid(dim, m);
    const Mat2 a_hat = cache.get(cell_grid_for(eps, m, options));
    if (primary) out.info.a_hat = a_hat;
    {
      const DomainSystem osc(DomainOperator::oscillating(field, eps), grid);
      const auto pairs = eigen_spectrum(osc, count, options.eig);
      lam_eps = lambdas_of(pairs);
      if (primary) {
        for (int k = 0; k < count; ++k) {
          FluxSweepRecord rec;
          rec.flux = boundary_flux(osc, pairs[k].vector, pairs[k].lambda, k + 1);
          try {
            rec.layer_energy = boundary_layer_energy(grid, pairs[k].vector, eps, options.c_layer);
          } catch (const InvalidArgument&) {
            rec.layer_energy = std::numeric_limits<double>::quiet_NaN();
          }
          out.fluxes.push_back(std::move(rec));
        }
      }
    }
    const DomainSystem hom(DomainOperator::homogenized(dim, a_hat), grid);
    lam_0 = lambdas_of(eigen_spectrum(hom, count, options.eig));
  };

  try {
    solve_grid(n, true, out.lambda_eps, out.lambda_0);
    std::vector<double> coarse_eps, coarse_0;
    const int coarse = n / 2;
    const bool have_coarse = options.richardson && n % 2 == 0 && coarse >= 2 &&
                             static_cast<long long>(count) * 4 <= std::llround(std::pow(coarse - 1, dim));
    std::string coarse_note;
    if (have_coarse) {
      try {
        solve_grid(coarse, false, coarse_eps, coarse_0);
      } catch (const Error& e) {
        coarse_note = std::string("coarse grid failed: ") + e.what();
        coarse_eps.clear();
      }
    } else if (options.richardson) {
      coarse_note = "no coarse grid available";
    }
    for (int k = 0; k < count; ++k) {
      GapRecord g;
      g.eps = eps;
      g.k = k + 1;
      g.lambda_eps = out.lambda_eps[k];
      g.lambda_0 = out.lambda_0[k];
      g.gap = std::abs(g.lambda_eps - g.lambda_0);
      g.ratio_thm_a = g.gap / (eps * std::pow(g.lambda_0, 1.5));
      g.ratio_l2 = g.gap / (eps * g.lambda_0 * g.lambda_0);
      if (!coarse_eps.empty()) {
        const double diff_h = g.lambda_eps - g.lambda_0;
        const double diff_2h = coarse_eps[k] - coarse_0[k];
        g.fem_error = std::abs(diff_h - diff_2h) / 3.0;
        g.resolved = g.fem_error <= 0.1 * g.gap;
      } else if (!options.richardson) {
        g.fem_error = std::numeric_limits<double>::quiet_NaN();
        g.resolved = true;
        g.note = "guard disabled";
      } else {
        g.fem_error = std::numeric_limits<double>::quiet_NaN();
        g.resolved = false;
        g.note = coarse_note;
      }
      out.gaps.push_back(std::move(g));
    }
  } catch (const Error& e) {
    out.info.failed = true;
    out.info.error = e.what();
    out.fluxes.clear();
    out.gaps.clear();
    for (int k = 0; k < count; ++k) {
      GapRecord g;
      g.eps = eps;
      g.k = k + 1;
      g.gap = g.lambda_eps = g.lambda_0 = g.ratio_thm_a = g.ratio_l2 = g.fem_error =
          std::numeric_limits<double>::quiet_NaN();
      g.failed = true;
      g.note = e.what();
      out.gaps.push_back(std::move(g));
    }
  }
  out.info.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace

Mat2 sweep_a_hat(const CoefficientField& field, double eps, int n, const SweepOptions& options, int* cell_n) {
  const int c = cell_grid_for(eps, n, options);
  if (cell_n) *cell_n = c;
  return compute_homogenized(field, c, options.cell_tol).a_hat;
}

SpectralSweepResult spectral_sweep(const CoefficientField& field, const SweepOptions& options) {
  validate(options);
  AHatCache cache(field, options.cell_tol);
  std::vector<LevelResult> levels(options.eps_list.size());
  std::mutex progress_mutex;
  run_work_queue(options.jobs, levels.size(), [&](std::size_t i) {
    levels[i] = run_level(field, options.eps_list[i], options, cache);
    if (options.progress) {
      const auto& info = levels[i].info;
      std::ostringstream msg;
      msg << "eps=" << info.eps << " n=" << info.n << (info.failed ? " FAILED: " + info.error : " done") << " ("
          << info.seconds << " s)";
      std::lock_guard lock(progress_mutex);
      options.progress(msg.str());
    }
  });
  SpectralSweepResult result;
  for (auto& level : levels) {
    if (level.info.failed) warn("sweep level eps=" + std::to_string(level.info.eps) + " failed: " + level.info.error);
    result.levels.push_back(level.info);
    for (auto& g : level.gaps) result.gaps.push_back(std::move(g));
    for (auto& f : level.fluxes) result.fluxes.push_back(std::move(f));
  }
  for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
    if (!it->info.failed) {
      result.homogenized_lambdas = it->lambda_0;
      result.oscillating_lambdas = it->lambda_eps;
      break;
    }
  }
  return result;
}

std::vector<GapRecord> gap_sweep(const CoefficientField& field, const SweepOptions& options) {
  return spectral_sweep(field, options).gaps;
}

FluxSummary summarize_fluxes(std::span<const FluxRecord> records, std::span<const double> layer_energy) {
  FluxSummary s;
  s.max_over_lambda_1p5 = 0.0;
  s.min_over_lambda_1p5 = std::numeric_limits<double>::infinity();
  s.min_low_frequency = std::numeric_limits<double>::infinity();
  s.min_layer_over_lambda = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!(r.lambda > 0.0) || !std::isfinite(r.flux)) continue;
    ++s.records;
    const double c = r.flux / std::pow(r.lambda, 1.5);
    s.max_over_lambda_1p5 = std::max(s.max_over_lambda_1p5, c);
    s.min_over_lambda_1p5 = std::min(s.min_over_lambda_1p5, c);
    if (r.eps2_lambda < 1.0) {
      ++s.refined_records;
      s.max_refined = std::max(s.max_refined, r.flux / (r.lambda * (1.0 + r.eps * r.lambda)));
    }
    if (r.eps * r.lambda <= 0.25) {
      ++s.low_frequency_records;
      s.min_low_frequency = std::min(s.min_low_frequency, r.flux_over_lambda);
      if (i < layer_energy.size() && std::isfinite(layer_energy[i]))
        s.min_layer_over_lambda = std::min(s.min_layer_over_lambda, layer_energy[i] / r.lambda);
    }
  }
  if (s.records == 0) s.min_over_lambda_1p5 = 0.0;
  if (s.low_frequency_records == 0) s.min_low_frequency = 0.0;
  if (!std::isfinite(s.min_layer_over_lambda)) s.min_layer_over_lambda = 0.0;
  return s;
}

FluxSweepResult flux_sweep(const CoefficientField& field, const SweepOptions& options) {
  SweepOptions opts = options;
  opts.richardson = false;
  FluxSweepResult result;
  result.records = spectral_sweep(field, opts).fluxes;
  std::vector<FluxRecord> flat;
  std::vector<double> layer;
  for (const auto& r : result.records) {
    flat.push_back(r.flux);
    layer.push_back(r.layer_energy);
  }
  result.summary = summarize_fluxes(flat, layer);
  return result;
}

std::vector<H1StudyRecord> h1_study(const CoefficientField& field, const SweepOptions& options, SourceKind source) {
  validate(options);
  const int dim = field.dim();
  AHatCache cache(field, options.cell_tol);
  std::vector<H1StudyRecord> out(options.eps_list.size());
  std::mutex progress_mutex;
  run_work_queue(options.jobs, out.size(), [&](std::size_t i) {
    const double eps = options.eps_list[i];
    const int n = cells_for(options.rule, eps, options.fixed_n);
    const DomainGrid grid(dim, n);
    const auto f = interpolate(grid, [&](const Point& x) {
      if (source == SourceKind::one) return 1.0;
      const double s = std::sin(std::numbers::pi * x[0]);
      return dim == 1 ? s : s * std::sin(std::numbers::pi * x[1]);
    });
    std::vector<double> u_eps;
    DirichletCorrector corr;
    double f_norm = 0.0;
    {
      const DomainSystem osc(DomainOperator::oscillating(field, eps), grid);
      u_eps = solve_source(osc, f);
      corr = dirichlet_corrector(osc);
      f_norm = l2_norm(osc, f);
    }
    const Mat2 a_hat = cache.get(cell_grid_for(eps, n, options));
    const DomainSystem hom(DomainOperator::homogenized(dim, a_hat), grid);
    const auto u_0 = solve_source(hom, f);
    H1StudyRecord rec;
    rec.approx = corrector_approximation(grid, u_eps, u_0, corr, f_norm);
    rec.deviation_sup = corr.deviation_sup;
    rec.phi_min = corr.min_value;
    rec.phi_max = corr.max_value;
    out[i] = rec;
    if (options.progress) {
      std::lock_guard lock(progress_mutex);
      options.progress("h1 eps=" + std::to_string(eps) + " n=" + std::to_string(n) + " done");
    }
  });
  return out;
}

}  // namespace homolab
