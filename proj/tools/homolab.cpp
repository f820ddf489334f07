// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

// Command-line front end; talks to the library only through the C API.

#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "homolab/homolab.h"

namespace {

const char* describe(const std::string& cmd) {
  if (cmd == "certify") return "check ellipticity, symmetry and periodicity of the coefficient";
  if (cmd == "correctors") return "solve the cell problems and write correctors and diagnostics";
  if (cmd == "homogenize") return "compute the homogenized tensor";
  if (cmd == "eig") return "eigenvalues of the homogenized or oscillating Dirichlet problem";
  if (cmd == "gap-sweep") return "eigenvalue gaps across the eps list with convergence fits";
  if (cmd == "flux-sweep") return "boundary flux of eigenfunctions across the eps list";
  if (cmd == "h1-study") return "first-order corrector approximation error across the eps list";
  if (cmd == "oned-scan") return "1D boundary-flux resonance scan";
  if (cmd == "report") return "summarize result tables found in the output directory";
  return "";
}

void log_line(const char* line, void* user) {
  if (!*static_cast<bool*>(user)) std::fprintf(stderr, "%s\n", line);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"homolab: periodic homogenization spectral experiments"};
  app.set_version_flag("--version", std::string(homolab_version()));
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int jobs = 0;
  bool quiet = false;
  for (std::size_t i = 0; i < homolab_command_count(); ++i) {
    const std::string name = homolab_command_name(i);
    auto* sub = app.add_subcommand(name, describe(name));
    sub->add_option("-c,--config", config_path, "configuration file (key = value lines)")->required();
    sub->add_option("-o,--out", out_dir, "output directory (overrides output_dir)");
    sub->add_option("-j,--jobs", jobs, "worker threads (overrides jobs)")->check(CLI::PositiveNumber);
    sub->add_flag("-q,--quiet", quiet, "suppress progress lines");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  homolab_config* cfg = nullptr;
  homolab_status st = homolab_config_parse_file(config_path.c_str(), &cfg);
  if (st != HOMOLAB_OK) {
    std::fprintf(stderr, "homolab: %s: %s\n", config_path.c_str(), homolab_last_error());
    return homolab_status_exit_code(st);
  }
  if (!out_dir.empty()) st = homolab_config_set_output_dir(cfg, out_dir.c_str());
  if (st == HOMOLAB_OK && jobs > 0) st = homolab_config_set_jobs(cfg, jobs);
  if (st != HOMOLAB_OK) {
    std::fprintf(stderr, "homolab: %s\n", homolab_last_error());
    homolab_config_destroy(cfg);
    return homolab_status_exit_code(st);
  }

  int exit_code = 0;
  st = homolab_run(command.c_str(), cfg, log_line, &quiet, &exit_code);
  homolab_config_destroy(cfg);
  if (st != HOMOLAB_OK) {
    std::fprintf(stderr, "homolab: %s\n", homolab_last_error());
    return homolab_status_exit_code(st);
  }
  if (exit_code != 0) std::fprintf(stderr, "homolab %s: %s\n", command.c_str(), homolab_last_error());
  return exit_code;
}
