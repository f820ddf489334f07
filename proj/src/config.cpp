// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "homolab/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "homolab/error.hpp"

namespace homolab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_plain_real(const std::string& t) {
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || t.empty()) throw InvalidArgument("'" + t + "' is not a number");
  return v;
}

long long parse_integer(const std::string& t) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw InvalidArgument("'" + t + "' is not an integer");
  return v;
}

bool parse_bool(const std::string& t) {
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  throw InvalidArgument("'" + t + "' is not a boolean (true/false)");
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

template <typename T>
void require(bool ok, const T& message) {
  if (!ok) throw InvalidArgument(message);
}

int positive_int(const std::string& v, const char* what, long long lo = 1, long long hi = 1 << 20) {
  const long long x = parse_integer(v);
  require(x >= lo && x <= hi, std::string(what) + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(x);
}

double positive_real(const std::string& v, const char* what) {
  const double x = parse_real_literal(v);
  require(x > 0.0 && std::isfinite(x), std::string(what) + " must be positive");
  return x;
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"coeff.kind",
       [](RunConfig& c, const std::string& v) {
         require(v == "constant" || v == "laminate_sine" || v == "product_sine" || v == "reciprocal_sine",
                 "unknown coefficient kind '" + v + "'");
         c.coeff_kind = v;
       }},
      {"coeff.dim", [](RunConfig& c, const std::string& v) { c.dim = positive_int(v, "coeff.dim", 1, 2); }},
      {"coeff.c", [](RunConfig& c, const std::string& v) { c.coeff_c = positive_real(v, "coeff.c"); }},
      {"coeff.mu", [](RunConfig& c, const std::string& v) { c.coeff_mu = positive_real(v, "coeff.mu"); }},
      {"coeff.r", [](RunConfig& c, const std::string& v) { c.coeff_r = parse_real_literal(v); }},
      {"coeff.base", [](RunConfig& c, const std::string& v) { c.coeff_base = positive_real(v, "coeff.base"); }},
      {"mesh.rule", [](RunConfig& c, const std::string& v) { c.mesh_rule = parse_mesh_rule(v); }},
      {"mesh.n", [](RunConfig& c, const std::string& v) { c.mesh_n = positive_int(v, "mesh.n", 2, 4096); }},
      {"cell.n", [](RunConfig& c, const std::string& v) { c.cell_n = positive_int(v, "cell.n", 2, 2048); }},
      {"cell.tol", [](RunConfig& c, const std::string& v) { c.cell_tol = positive_real(v, "cell.tol"); }},
      {"cell.policy", [](RunConfig& c, const std::string& v) { c.a_hat_policy = parse_a_hat_policy(v); }},
      {"eig.tol", [](RunConfig& c, const std::string& v) { c.eig_tol = positive_real(v, "eig.tol"); }},
      {"eig.max_iter", [](RunConfig& c, const std::string& v) { c.eig_max_iter = positive_int(v, "eig.max_iter"); }},
      {"eig.block", [](RunConfig& c, const std::string& v) { c.eig_block = positive_int(v, "eig.block", 1, 16); }},
      {"eig.count", [](RunConfig& c, const std::string& v) { c.eig_count = positive_int(v, "eig.count", 1, 200); }},
      {"eig.operator",
       [](RunConfig& c, const std::string& v) {
         require(v == "homogenized" || v == "oscillating", "eig.operator must be homogenized or oscillating");
         c.eig_operator = v;
       }},
      {"eps_list",
       [](RunConfig& c, const std::string& v) {
         std::vector<double> list;
         std::stringstream ss(v);
         std::string item;
         while (std::getline(ss, item, ',')) {
           const double e = parse_real_literal(trim(item));
           require(e > 0.0 && e <= 1.0, "eps values must lie in (0, 1]");
           require(list.empty() || e < list.back(), "eps_list must be strictly decreasing");
           list.push_back(e);
         }
         require(!list.empty(), "eps_list is empty");
         c.eps_list = std::move(list);
       }},
      {"k_max", [](RunConfig& c, const std::string& v) { c.k_max = positive_int(v, "k_max", 1, 200); }},
      {"output_dir",
       [](RunConfig& c, const std::string& v) {
         require(!v.empty(), "output_dir is empty");
         c.output_dir = v;
       }},
      {"seed",
       [](RunConfig& c, const std::string& v) {
         const long long s = parse_integer(v);
         require(s >= 0, "seed must be non-negative");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"jobs", [](RunConfig& c, const std::string& v) { c.jobs = positive_int(v, "jobs", 1, 64); }},
      {"source.kind", [](RunConfig& c, const std::string& v) { c.source = parse_source_kind(v); }},
      {"richardson", [](RunConfig& c, const std::string& v) { c.richardson = parse_bool(v); }},
      {"layer.c", [](RunConfig& c, const std::string& v) { c.layer_c = positive_real(v, "layer.c"); }},
      {"oned.eps2_min",
       [](RunConfig& c, const std::string& v) {
         c.oned_eps2_min = parse_real_literal(v);
         require(c.oned_eps2_min >= 0.0, "oned.eps2_min must be non-negative");
       }},
      {"oned.eps2_max", [](RunConfig& c, const std::string& v) { c.oned_eps2_max = positive_real(v, "oned.eps2_max"); }},
      {"oned.n", [](RunConfig& c, const std::string& v) { c.oned_n = positive_int(v, "oned.n", 0, 1 << 22); }},
      {"certify.samples",
       [](RunConfig& c, const std::string& v) { c.certify_samples = positive_int(v, "certify.samples", 2, 4096); }},
  };
  return table;
}

}  // namespace

double parse_real_literal(const std::string& text) {
  const std::string t = trim(text);
  const auto slash = t.find('/');
  double v = 0.0;
  if (slash == std::string::npos) {
    v = parse_plain_real(t);
  } else {
    const double num = parse_plain_real(trim(t.substr(0, slash)));
    const double den = parse_plain_real(trim(t.substr(slash + 1)));
    if (den == 0.0) throw InvalidArgument("'" + t + "' divides by zero");
    v = num / den;
  }
  if (!std::isfinite(v)) throw InvalidArgument("'" + t + "' is not finite");
  return v;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  cfg.origin = origin;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + line + "'", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown key '" + key + "'", line_no);
    if (auto prev = seen.find(key); prev != seen.end())
      throw ConfigError("duplicate key '" + key + "' (first set on line " + std::to_string(prev->second) + ")", line_no);
    if (value.empty()) throw ConfigError("key '" + key + "' has no value", line_no);
    seen[key] = line_no;
    try {
      it->second(cfg, value);
    } catch (const InvalidArgument& e) {
      throw ConfigError(key + ": " + e.what(), line_no);
    }
  }
  if (cfg.coeff_kind.empty()) throw ConfigError("missing required key 'coeff.kind'", 0);
  auto line_of = [&](const std::string& key) {
    const auto it = seen.find(key);
    return it == seen.end() ? 0 : it->second;
  };
  if (cfg.coeff_kind == "product_sine" && cfg.dim != 2)
    throw ConfigError("product_sine needs coeff.dim = 2", line_of("coeff.dim"));
  try {
    (void)make_field(cfg);
  } catch (const InvalidArgument& e) {
    const int l = std::max({line_of("coeff.r"), line_of("coeff.mu"), line_of("coeff.base"), line_of("coeff.c")});
    throw ConfigError(std::string("invalid coefficient: ") + e.what(), l);
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::map<std::string, std::string> RunConfig::resolved() const {
  std::map<std::string, std::string> m;
  m["coeff.kind"] = coeff_kind;
  m["coeff.dim"] = std::to_string(dim);
  m["coeff.c"] = format_real(coeff_c);
  m["coeff.mu"] = format_real(coeff_mu);
  m["coeff.r"] = format_real(coeff_r);
  m["coeff.base"] = format_real(coeff_base);
  m["mesh.rule"] = to_string(mesh_rule);
  m["mesh.n"] = std::to_string(mesh_n);
  m["cell.n"] = std::to_string(cell_n);
  m["cell.tol"] = format_real(cell_tol);
  m["cell.policy"] = to_string(a_hat_policy);
  m["eig.tol"] = format_real(eig_tol);
  m["eig.max_iter"] = std::to_string(eig_max_iter);
  m["eig.block"] = std::to_string(eig_block);
  m["eig.count"] = std::to_string(eig_count);
  m["eig.operator"] = eig_operator;
  std::string eps;
  for (std::size_t i = 0; i < eps_list.size(); ++i) eps += (i ? "," : "") + format_real(eps_list[i]);
  m["eps_list"] = eps;
  m["k_max"] = std::to_string(k_max);
  m["output_dir"] = output_dir;
  m["seed"] = std::to_string(seed);
  m["jobs"] = std::to_string(jobs);
  m["source.kind"] = to_string(source);
  m["richardson"] = richardson ? "true" : "false";
  m["layer.c"] = format_real(layer_c);
  m["oned.eps2_min"] = format_real(oned_eps2_min);
  m["oned.eps2_max"] = format_real(oned_eps2_max);
  m["oned.n"] = std::to_string(oned_n);
  m["certify.samples"] = std::to_string(certify_samples);
  return m;
}

std::string resolved_config_text(const RunConfig& config) {
  std::string out;
  for (const auto& [k, v] : config.resolved()) out += k + " = " + v + "\n";
  return out;
}

CoefficientField make_field(const RunConfig& c) {
  if (c.coeff_kind == "constant") return CoefficientField::constant(c.dim, c.coeff_c);
  if (c.coeff_kind == "laminate_sine") return CoefficientField::laminate_sine(c.dim, c.coeff_mu, c.coeff_r);
  if (c.coeff_kind == "product_sine") return CoefficientField::product_sine(c.coeff_mu, c.coeff_r);
  if (c.coeff_kind == "reciprocal_sine")
    return CoefficientField::reciprocal_sine(c.dim, c.coeff_mu, c.coeff_base, c.coeff_r);
  throw InvalidArgument("unknown coefficient kind '" + c.coeff_kind + "'");
}

EigenOptions make_eigen_options(const RunConfig& c) {
  EigenOptions o;
  o.tol = c.eig_tol;
  o.max_iter = c.eig_max_iter;
  o.block_size = c.eig_block;
  o.seed = c.seed;
  return o;
}

SweepOptions make_sweep_options(const RunConfig& c) {
  SweepOptions o;
  o.eps_list = c.eps_list;
  o.k_max = c.k_max;
  o.rule = c.mesh_rule;
  o.fixed_n = c.mesh_n;
  o.a_hat_policy = c.a_hat_policy;
  o.fine_cell_n = c.cell_n;
  o.cell_tol = c.cell_tol;
  o.eig = make_eigen_options(c);
  o.richardson = c.richardson;
  o.c_layer = c.layer_c;
  o.jobs = c.jobs;
  return o;
}

}  // namespace homolab
