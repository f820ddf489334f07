// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "homolab/runner.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "cholmod.h"
#include "homolab/boundary.hpp"
#include "homolab/cell_problem.hpp"
#include "homolab/domain.hpp"
#include "homolab/error.hpp"
#include "homolab/experiments.hpp"
#include "homolab/onedim.hpp"

#ifndef HOMOLAB_VERSION
#define HOMOLAB_VERSION "0.0.0"
#endif

namespace homolab {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Collects files of one run; every file is written completely or not at all.
class OutputDir {
 public:
  explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& content) {
    const fs::path tmp = dir_ / (name + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error("cannot write '" + (dir_ / name).string() + "'");
      out << content;
      if (!out) throw Error("write failed for '" + (dir_ / name).string() + "'");
    }
    fs::rename(tmp, dir_ / name);
    if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
  }

  const fs::path& path() const { return dir_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

class Csv {
 public:
  explicit Csv(const std::string& header) { out_ << header << '\n'; }
  template <typename... T>
  void row(const T&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  static std::string cell(double v) { return num(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
  std::ostringstream out_;
};

struct Context {
  const RunConfig& cfg;
  OutputDir& out;
  const LogSink& log;
  bool numerical_failure = false;
  std::string failure_note;

  void say(const std::string& msg) const {
    if (log) log(msg);
  }
};

std::string plot_header(const std::string& title, const std::string& xlabel, const std::string& ylabel, bool logx,
                        bool logy) {
  std::ostringstream s;
  s << "# gnuplot script; run from this directory: gnuplot -persist " << title << ".gp\n";
  s << "set datafile separator ','\n";
  s << "set key autotitle columnhead left top\n";
  s << "set xlabel '" << xlabel << "'\nset ylabel '" << ylabel << "'\n";
  if (logx) s << "set logscale x\n";
  if (logy) s << "set logscale y\n";
  s << "set grid\n";
  return s.str();
}

std::string ks_list(int k_max) {
  std::set<int> ks{1, std::max(1, k_max / 4), std::max(1, k_max / 2), k_max};
  std::string s;
  for (int k : ks) s += (s.empty() ? "" : " ") + std::to_string(k);
  return s;
}

// ---------------------------------------------------------------------------

void cmd_certify(Context& ctx) {
  const auto field = make_field(ctx.cfg);
  const auto rep = certify(field, ctx.cfg.certify_samples);
  Csv csv("metric,value");
  csv.row("field", field.name());
  csv.row("dim", field.dim());
  csv.row("declared_kappa", rep.declared_kappa);
  csv.row("kappa_observed", rep.kappa_observed);
  csv.row("symmetry_defect", rep.symmetry_defect);
  csv.row("periodicity_defect", rep.periodicity_defect);
  csv.row("lipschitz_estimate", rep.lipschitz_estimate);
  csv.row("samples_per_axis", rep.samples_per_axis);
  ctx.out.write("certify.csv", csv.str());
  ctx.say("certify: kappa_observed = " + short_num(rep.kappa_observed));
}

std::string homogenized_csv(const HomogenizedTensor& a) {
  Csv csv("i,j,a_hat_ij");
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j) csv.row(i + 1, j + 1, a.a_hat(i, j));
  return csv.str();
}

void cmd_homogenize(Context& ctx) {
  const auto field = make_field(ctx.cfg);
  const auto a = compute_homogenized(field, ctx.cfg.cell_n, ctx.cfg.cell_tol);
  ctx.out.write("homogenized.csv", homogenized_csv(a));
  ctx.say("homogenize: A_hat_11 = " + short_num(a.a_hat(0, 0)) + " on a torus with n = " +
          std::to_string(ctx.cfg.cell_n));
}

void cmd_correctors(Context& ctx) {
  const auto field = make_field(ctx.cfg);
  const TorusGrid grid(field.dim(), ctx.cfg.cell_n);
  const auto corr = solve_correctors(field, grid, ctx.cfg.cell_tol);
  const auto a = homogenized_tensor(field, corr);
  for (int j = 0; j < field.dim(); ++j) {
    Csv csv("y1,y2,value");
    for (std::size_t dof = 0; dof < grid.num_dofs(); ++dof) {
      const auto y = grid.node_coordinates(dof);
      csv.row(y[0], field.dim() == 2 ? y[1] : 0.0, corr.chi[j][dof]);
    }
    ctx.out.write("chi_" + std::to_string(j + 1) + ".csv", csv.str());
  }
  ctx.out.write("homogenized.csv", homogenized_csv(a));
  const auto b = b_field(field, corr, a);
  Csv summary("metric,value");
  summary.row("cell_n", ctx.cfg.cell_n);
  summary.row("corrector_max_abs", corr.max_abs());
  summary.row("corrector_max_residual", corr.max_residual);
  summary.row("a_hat_asymmetry", a.asymmetry());
  double b_mean = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) b_mean = std::max(b_mean, std::abs(b.mean()(i, j)));
  summary.row("b_mean_max_abs", b_mean);
  if (field.dim() == 2) {
    const auto fc = flux_corrector(b, ctx.cfg.cell_tol);
    summary.row("flux_corrector_max_abs", fc.max_abs);
    summary.row("flux_corrector_antisymmetry", fc.antisymmetry_defect());
    summary.row("weak_divergence_residual", weak_divergence_residual(fc, b));
  }
  ctx.out.write("cell_summary.csv", summary.str());
}

void cmd_eig(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto field = make_field(cfg);
  const auto opts = make_eigen_options(cfg);
  Csv spectrum("operator,eps,k,lambda,residual");
  Csv weyl("operator,eps,points,min,max,ratio,flagged");
  auto emit = [&](const DomainSystem& sys, double eps) {
    std::vector<EigenPair> pairs;
    try {
      pairs = eigen_spectrum(sys, cfg.eig_count, opts);
    } catch (const EigenConvergenceError& e) {
      ctx.numerical_failure = true;
      ctx.failure_note = e.what();
      pairs = e.partial();
    }
    std::vector<double> lams;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      spectrum.row(sys.op().label(), eps, k + 1, pairs[k].lambda, pairs[k].residual);
      lams.push_back(pairs[k].lambda);
    }
    if (lams.size() >= 5) {
      const auto env = weyl_check(lams, sys.grid().dim());
      weyl.row(sys.op().label(), eps, env.points, env.min, env.max, env.ratio, env.flagged ? "true" : "false");
    }
  };
  if (cfg.eig_operator == "homogenized") {
    const auto a = compute_homogenized(field, cfg.cell_n, cfg.cell_tol);
    const DomainGrid grid(field.dim(), cfg.mesh_n);
    emit(DomainSystem(DomainOperator::homogenized(field.dim(), a.a_hat), grid), 0.0);
  } else {
    for (double eps : cfg.eps_list) {
      const DomainGrid grid(field.dim(), cells_for(cfg.mesh_rule, eps, cfg.mesh_n));
      emit(DomainSystem(DomainOperator::oscillating(field, eps), grid), eps);
      ctx.say("eig: eps = " + short_num(eps) + " done");
    }
  }
  ctx.out.write("spectrum.csv", spectrum.str());
  ctx.out.write("weyl.csv", weyl.str());
}

void write_fit_rows(Csv& csv, const std::string& label, const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() < 3) {
    csv.row(label, static_cast<int>(xs.size()), "nan", "nan", "nan");
    return;
  }
  const auto fit = fit_loglog_slope(xs, ys);
  csv.row(label, fit.n_points, fit.slope, fit.intercept, fit.r_squared);
}

void cmd_gap_sweep(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto field = make_field(cfg);
  auto opts = make_sweep_options(cfg);
  opts.progress = [&](const std::string& m) { ctx.say("gap-sweep: " + m); };
  const auto res = spectral_sweep(field, opts);
  Csv gaps("eps,k,lambda_eps,lambda_0,gap,ratio_thm_a,ratio_l2,resolved");
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_k;
  for (const auto& g : res.gaps) {
    gaps.row(g.eps, g.k, g.lambda_eps, g.lambda_0, g.gap, g.ratio_thm_a, g.ratio_l2,
             g.failed ? "failed" : (g.resolved ? "true" : "underresolved"));
    if (!g.failed && g.resolved && g.gap > 0.0) {
      by_k[g.k].first.push_back(g.eps);
      by_k[g.k].second.push_back(g.gap);
    }
  }
  ctx.out.write("gaps.csv", gaps.str());
  Csv fit("k,n_points,slope,intercept,r_squared");
  for (int k = 1; k <= cfg.k_max; ++k) write_fit_rows(fit, std::to_string(k), by_k[k].first, by_k[k].second);
  ctx.out.write("gap_fit.csv", fit.str());
  Csv guard("eps,k,fem_error,gap,resolved,note");
  for (const auto& g : res.gaps)
    guard.row(g.eps, g.k, g.fem_error, g.gap, g.failed ? "failed" : (g.resolved ? "true" : "underresolved"),
              "\"" + g.note + "\"");
  ctx.out.write("gap_guard.csv", guard.str());
  Csv levels("eps,n,cell_n,a_hat_11,a_hat_12,a_hat_22,status,seconds");
  for (const auto& l : res.levels) {
    levels.row(l.eps, l.n, l.cell_n, l.a_hat(0, 0), l.a_hat(0, 1), l.a_hat(1, 1), l.failed ? "failed" : "ok",
               l.seconds);
    if (l.failed) {
      ctx.numerical_failure = true;
      ctx.failure_note = l.error;
    }
  }
  ctx.out.write("gap_levels.csv", levels.str());

  std::string p = plot_header("gap_vs_eps", "eps", "|lambda_eps - lambda_0|", true, true);
  p += "plot for [k in \"" + ks_list(cfg.k_max) +
       "\"] 'gaps.csv' using (column('k') == k + 0 ? column('eps') : 1/0):'gap' with linespoints title 'k = '.k\n";
  ctx.out.write("gap_vs_eps.gp", p);
  p = plot_header("ratio_vs_k", "k", "gap / (eps lambda_0^{3/2})", false, true);
  p += "plot 'gaps.csv' using 'k':'ratio_thm_a' with points title 'ratio\\_thm\\_a'\n";
  ctx.out.write("ratio_vs_k.gp", p);
}

void cmd_flux_sweep(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto field = make_field(cfg);
  auto opts = make_sweep_options(cfg);
  opts.progress = [&](const std::string& m) { ctx.say("flux-sweep: " + m); };
  opts.richardson = false;
  const auto res = spectral_sweep(field, opts);
  Csv flux("eps,k,lambda,flux,flux_over_lambda,eps2_lambda,regime");
  Csv extra("eps,k,lambda,flux_raw,flux_over_lambda_1p5,flux_over_lambda_1_eps_lambda,layer_energy,layer_over_lambda");
  std::vector<FluxRecord> flat;
  std::vector<double> layer;
  for (const auto& r : res.fluxes) {
    const auto& f = r.flux;
    flux.row(f.eps, f.k, f.lambda, f.flux, f.flux_over_lambda, f.eps2_lambda, f.regime);
    extra.row(f.eps, f.k, f.lambda, f.flux_raw, f.flux / std::pow(f.lambda, 1.5),
              f.flux / (f.lambda * (1 + f.eps * f.lambda)), r.layer_energy, r.layer_energy / f.lambda);
    flat.push_back(f);
    layer.push_back(r.layer_energy);
  }
  ctx.out.write("flux.csv", flux.str());
  ctx.out.write("flux_normalized.csv", extra.str());
  Csv summary("scope,records,max_flux_over_lambda_1p5,min_flux_over_lambda_1p5,refined_records,max_refined,"
              "low_frequency_records,min_low_frequency_flux_over_lambda,min_layer_over_lambda");
  auto add = [&](const std::string& scope, const std::vector<FluxRecord>& recs, const std::vector<double>& lay) {
    const auto s = summarize_fluxes(recs, lay);
    summary.row(scope, s.records, s.max_over_lambda_1p5, s.min_over_lambda_1p5, s.refined_records, s.max_refined,
                s.low_frequency_records, s.min_low_frequency, s.min_layer_over_lambda);
  };
  add("all", flat, layer);
  for (double eps : cfg.eps_list) {
    std::vector<FluxRecord> part;
    std::vector<double> lay;
    for (std::size_t i = 0; i < flat.size(); ++i)
      if (flat[i].eps == eps) {
        part.push_back(flat[i]);
        lay.push_back(layer[i]);
      }
    add("eps=" + num(eps), part, lay);
  }
  ctx.out.write("flux_summary.csv", summary.str());
  for (const auto& l : res.levels)
    if (l.failed) {
      ctx.numerical_failure = true;
      ctx.failure_note = l.error;
    }
  std::string p = plot_header("flux_vs_lambda", "lambda", "boundary flux", true, true);
  p += "plot 'flux.csv' using 'lambda':'flux' with points title 'flux', "
       "'flux.csv' using 'lambda':(4*column('lambda')) with lines title '4 lambda'\n";
  ctx.out.write("flux_vs_lambda.gp", p);
}

void cmd_h1_study(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto field = make_field(cfg);
  auto opts = make_sweep_options(cfg);
  opts.progress = [&](const std::string& m) { ctx.say("h1-study: " + m); };
  const auto recs = h1_study(field, opts, cfg.source);
  Csv approx("eps,h,h1_error,l2_error,grad_error,f_norm");
  Csv sup("eps,h,deviation_sup,deviation_over_eps,phi_min,phi_max,h1_over_eps_f,grad_over_eps_f");
  std::vector<double> xs, h1, grad, l2, dev;
  for (const auto& r : recs) {
    const auto& a = r.approx;
    approx.row(a.eps, a.h, a.h1_error, a.l2_error, a.grad_error, a.f_norm);
    sup.row(a.eps, a.h, r.deviation_sup, r.deviation_sup / a.eps, r.phi_min, r.phi_max,
            a.h1_error / (a.eps * a.f_norm), a.grad_error / (a.eps * a.f_norm));
    xs.push_back(a.eps);
    h1.push_back(a.h1_error / a.f_norm);
    grad.push_back(a.grad_error / a.f_norm);
    l2.push_back(a.l2_error / a.f_norm);
    dev.push_back(r.deviation_sup);
  }
  ctx.out.write("approx.csv", approx.str());
  ctx.out.write("corrector_sup.csv", sup.str());
  Csv fit("quantity,n_points,slope,intercept,r_squared");
  auto positive = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
  };
  if (positive(h1)) write_fit_rows(fit, "h1_error", xs, h1);
  if (positive(grad)) write_fit_rows(fit, "grad_error", xs, grad);
  if (positive(l2)) write_fit_rows(fit, "l2_error", xs, l2);
  if (positive(dev)) write_fit_rows(fit, "deviation_sup", xs, dev);
  ctx.out.write("approx_fit.csv", fit.str());
  std::string p = plot_header("approx_vs_eps", "eps", "error / ||f||", true, true);
  p += "plot 'approx.csv' using 'eps':(column('h1_error')/column('f_norm')) with linespoints title 'H1', "
       "'approx.csv' using 'eps':(column('l2_error')/column('f_norm')) with linespoints title 'L2'\n";
  ctx.out.write("approx_vs_eps.gp", p);
}

void cmd_oned_scan(Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (cfg.dim != 1) throw ConfigError("oned-scan needs coeff.dim = 1", 0);
  const auto field = make_field(cfg);
  Csv scan("eps,k,lambda,eps2_lambda,flux,flux_over_lambda,flux_over_lambda_1p5");
  Csv summary("eps,n,a_bar,rows,argmax_k,argmax_eps2_lambda,max_flux_over_lambda,max_flux_over_lambda_1p5,"
              "min_low_frequency_flux_over_lambda");
  for (double eps : cfg.eps_list) {
    ResonanceScan s;
    try {
      s = resonance_scan(field, eps, cfg.oned_eps2_min, cfg.oned_eps2_max, cfg.oned_n, cfg.eig_tol, cfg.jobs);
    } catch (const EigenConvergenceError& e) {
      ctx.numerical_failure = true;
      ctx.failure_note = e.what();
      continue;
    }
    double max15 = 0.0, low = std::numeric_limits<double>::infinity();
    for (const auto& r : s.rows) {
      scan.row(r.eps, r.k, r.lambda, r.eps2_lambda, r.flux, r.flux_over_lambda, r.flux_over_lambda_1p5);
      max15 = std::max(max15, r.flux_over_lambda_1p5);
      if (eps * r.lambda <= 0.25) low = std::min(low, r.flux_over_lambda);
    }
    if (s.rows.empty()) {
      summary.row(eps, s.n, s.a_bar, 0, 0, "nan", "nan", "nan", "nan");
    } else {
      const auto& best = s.rows[s.argmax_flux_over_lambda];
      summary.row(eps, s.n, s.a_bar, s.rows.size(), best.k, best.eps2_lambda, best.flux_over_lambda, max15,
                  std::isfinite(low) ? low : std::nan(""));
    }
    ctx.say("oned-scan: eps = " + short_num(eps) + " n = " + std::to_string(s.n) + " rows = " +
            std::to_string(s.rows.size()));
  }
  ctx.out.write("oned_scan.csv", scan.str());
  ctx.out.write("oned_summary.csv", summary.str());
  std::string p = plot_header("oned_flux", "eps^2 lambda", "flux / lambda", true, false);
  p += "plot 'oned_scan.csv' using 'eps2_lambda':'flux_over_lambda' with points title 'flux / lambda'\n";
  ctx.out.write("oned_flux.gp", p);
}

// ---------------------------------------------------------------------------
// report: summarizes whatever result tables are present in the output directory.

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InvalidArgument("table lacks column '" + name + "'");
    return static_cast<int>(it - header.begin());
  }
  double real(std::size_t r, const std::string& name) const { return std::strtod(rows[r][col(name)].c_str(), nullptr); }
  const std::string& text(std::size_t r, const std::string& name) const { return rows[r][col(name)]; }
};

bool read_table(const fs::path& path, Table& t) {
  std::ifstream in(path);
  if (!in) return false;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    return cells;
  };
  if (!std::getline(in, line)) return false;
  t.header = split(line);
  while (std::getline(in, line))
    if (!line.empty()) t.rows.push_back(split(line));
  return true;
}

void cmd_report(Context& ctx) {
  const fs::path dir = ctx.out.path();
  std::ostringstream r;
  r << "homolab report for " << dir.string() << "\n";
  int sections = 0;
  Table t;
  if (read_table(dir / "gaps.csv", t)) {
    ++sections;
    r << "\n[eigenvalue gaps]\n";
    std::map<double, std::vector<std::size_t>, std::greater<>> by_eps;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      by_eps[t.real(i, "eps")].push_back(i);
      if (t.text(i, "k") == "1" && t.text(i, "resolved") == "true" && t.real(i, "gap") > 0) {
        xs.push_back(t.real(i, "eps"));
        ys.push_back(t.real(i, "gap"));
      }
    }
    if (xs.size() >= 3) {
      const auto fit = fit_loglog_slope(xs, ys);
      r << "k = 1 slope of log gap vs log eps (resolved records): " << short_num(fit.slope) << " (r^2 "
        << short_num(fit.r_squared) << ", " << fit.n_points << " points)\n";
    } else {
      r << "k = 1 slope: fewer than 3 resolved records\n";
    }
    for (const auto& [eps, idx] : by_eps) {
      double max_a = 0.0, first = 0.0, last = 0.0;
      int resolved = 0;
      for (auto i : idx) {
        max_a = std::max(max_a, t.real(i, "ratio_thm_a"));
        resolved += t.text(i, "resolved") == "true";
      }
      first = t.real(idx.front(), "gap") / (eps * t.real(idx.front(), "lambda_0"));
      last = t.real(idx.back(), "gap") / (eps * t.real(idx.back(), "lambda_0"));
      r << "eps = " << short_num(eps) << ": max gap/(eps lambda^1.5) = " << short_num(max_a)
        << ", gap/(eps lambda) first->last k = " << short_num(first) << " -> " << short_num(last) << ", resolved "
        << resolved << "/" << idx.size() << "\n";
    }
  }
  t = {};
  if (read_table(dir / "flux.csv", t)) {
    ++sections;
    r << "\n[boundary flux]\n";
    std::vector<FluxRecord> recs;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      FluxRecord f;
      f.eps = t.real(i, "eps");
      f.lambda = t.real(i, "lambda");
      f.flux = t.real(i, "flux");
      f.flux_over_lambda = t.real(i, "flux_over_lambda");
      f.eps2_lambda = t.real(i, "eps2_lambda");
      recs.push_back(f);
    }
    const auto s = summarize_fluxes(recs);
    r << "records " << s.records << ", flux/lambda^1.5 in [" << short_num(s.min_over_lambda_1p5) << ", "
      << short_num(s.max_over_lambda_1p5) << "]\n";
    r << "eps^2 lambda < 1: " << s.refined_records << " records, max flux/(lambda(1+eps lambda)) = "
      << short_num(s.max_refined) << "\n";
    r << "eps lambda <= 0.25: " << s.low_frequency_records << " records";
    if (s.low_frequency_records > 0) r << ", min flux/lambda = " << short_num(s.min_low_frequency);
    r << "\n";
  }
  t = {};
  if (read_table(dir / "approx.csv", t)) {
    ++sections;
    r << "\n[corrector approximation]\n";
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const double eps = t.real(i, "eps"), f = t.real(i, "f_norm"), h1 = t.real(i, "h1_error");
      r << "eps = " << short_num(eps) << ": h1_error/(eps ||f||) = " << short_num(h1 / (eps * f)) << "\n";
      if (h1 > 0) {
        xs.push_back(eps);
        ys.push_back(h1 / f);
      }
    }
    if (xs.size() >= 3) r << "slope of log h1_error vs log eps: " << short_num(fit_loglog_slope(xs, ys).slope) << "\n";
  }
  t = {};
  if (read_table(dir / "oned_scan.csv", t)) {
    ++sections;
    r << "\n[1D resonance scan]\n";
    std::map<double, std::pair<double, double>> per_eps;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      auto& e = per_eps[t.real(i, "eps")];
      if (t.real(i, "flux_over_lambda") > e.first) {
        e.first = t.real(i, "flux_over_lambda");
        e.second = t.real(i, "eps2_lambda");
      }
    }
    for (const auto& [eps, best] : per_eps)
      r << "eps = " << short_num(eps) << ": max flux/lambda = " << short_num(best.first) << " at eps^2 lambda = "
        << short_num(best.second) << "\n";
  }
  t = {};
  if (read_table(dir / "weyl.csv", t)) {
    ++sections;
    r << "\n[Weyl envelope]\n";
    for (std::size_t i = 0; i < t.rows.size(); ++i)
      r << t.text(i, "operator") << " eps = " << short_num(t.real(i, "eps")) << ": ratio "
        << short_num(t.real(i, "ratio")) << (t.text(i, "flagged") == "true" ? " FLAGGED" : "") << "\n";
  }
  if (sections == 0)
    throw InvalidArgument("report: no result tables (gaps.csv, flux.csv, approx.csv, oned_scan.csv, weyl.csv) in '" +
                          dir.string() + "'");
  ctx.out.write("report.txt", r.str());
  ctx.say(r.str());
}

using Command = void (*)(Context&);

const std::vector<std::pair<std::string, Command>>& commands() {
  static const std::vector<std::pair<std::string, Command>> table = {
      {"certify", cmd_certify},       {"correctors", cmd_correctors}, {"homogenize", cmd_homogenize},
      {"eig", cmd_eig},               {"gap-sweep", cmd_gap_sweep},   {"flux-sweep", cmd_flux_sweep},
      {"h1-study", cmd_h1_study},     {"oned-scan", cmd_oned_scan},   {"report", cmd_report},
  };
  return table;
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& c : commands()) n.push_back(c.first);
    return n;
  }();
  return names;
}

const char* version_string() { return HOMOLAB_VERSION; }

RunOutcome run_command(const std::string& command, const RunConfig& config, const LogSink& log) {
  RunOutcome outcome;
  const auto it = std::find_if(commands().begin(), commands().end(), [&](const auto& c) { return c.first == command; });
  if (it == commands().end()) {
    outcome.exit_code = exit_config;
    outcome.message = "unknown command '" + command + "'";
    return outcome;
  }
  RunConfig cfg = config;
  if (const char* env = std::getenv("HOMOLAB_OUT"); env && *env) cfg.output_dir = env;
  outcome.output_dir = cfg.output_dir;
  try {
    fs::create_directories(cfg.output_dir);
  } catch (const std::exception& e) {
    outcome.exit_code = exit_config;
    outcome.message = "cannot create output directory '" + cfg.output_dir + "': " + e.what();
    return outcome;
  }
  OutputDir out(cfg.output_dir);
  const std::string started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  Context ctx{cfg, out, log, false, {}};
  try {
    out.write("resolved_config.txt", resolved_config_text(cfg));
    it->second(ctx);
    if (ctx.numerical_failure) {
      outcome.exit_code = exit_numerical;
      outcome.message = "numerical failure: " + ctx.failure_note;
    }
  } catch (const ConfigError& e) {
    outcome.exit_code = exit_config;
    outcome.message = e.what();
  } catch (const InvalidArgument& e) {
    outcome.exit_code = exit_config;
    outcome.message = e.what();
  } catch (const std::exception& e) {
    outcome.exit_code = exit_numerical;
    outcome.message = e.what();
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream m;
  m << "homolab_version = " << HOMOLAB_VERSION << "\n";
  m << "command = " << command << "\n";
  m << "config = " << cfg.origin << "\n";
  m << "output_dir = " << cfg.output_dir << "\n";
  m << "seed = " << cfg.seed << "\n";
  m << "jobs = " << cfg.jobs << "\n";
  m << "eigen_version = " << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "." << EIGEN_MINOR_VERSION << "\n";
  m << "cholmod_version = " << CHOLMOD_MAIN_VERSION << "." << CHOLMOD_SUB_VERSION << "." << CHOLMOD_SUBSUB_VERSION
    << "\n";
  m << "compiler = " << __VERSION__ << "\n";
  m << "started_utc = " << started << "\n";
  m << "wall_seconds = " << short_num(wall) << "\n";
  m << "exit_code = " << outcome.exit_code << "\n";
  m << "status = " << (outcome.message.empty() ? "ok" : outcome.message) << "\n";
  std::string files;
  for (const auto& f : out.files()) files += (files.empty() ? "" : ",") + f;
  m << "outputs = " << files << "\n";
  try {
    out.write("run_manifest.txt", m.str());
  } catch (const std::exception& e) {
    if (outcome.exit_code == exit_ok) {
      outcome.exit_code = exit_numerical;
      outcome.message = e.what();
    }
  }
  outcome.outputs = out.files();
  return outcome;
}

}  // namespace homolab
