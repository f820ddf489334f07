// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "homolab/config.hpp"

namespace homolab {

/// Exit codes of a run.
enum ExitCode : int {
  exit_ok = 0,
  exit_config = 1,     ///< bad configuration, usage or arguments; nothing computed
  exit_numerical = 2,  ///< a numerical procedure failed (outputs may be partial)
};

/// Commands understood by run_command, in help order.
const std::vector<std::string>& command_names();

using LogSink = std::function<void(const std::string&)>;

struct RunOutcome {
  int exit_code = exit_ok;
  std::string message;               ///< empty on success
  std::string output_dir;            ///< effective directory (after HOMOLAB_OUT)
  std::vector<std::string> outputs;  ///< file names written, in order
};

/// Runs one command. The output directory is config.output_dir unless the
/// HOMOLAB_OUT environment variable is set. Writes resolved_config.txt and
/// run_manifest.txt next to the command's CSV files and plot scripts.
/// Never throws for failures of the computation; they map to exit codes.
RunOutcome run_command(const std::string& command, const RunConfig& config, const LogSink& log = {});

/// Library version string.
const char* version_string();

}  // namespace homolab
