// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>

namespace homolab {

/// Non-fatal conditions (under-resolved meshes, loose residuals) are reported
/// through a process-wide handler. The default writes to stderr.
using WarningHandler = std::function<void(const std::string&)>;

/// Installs a handler and returns the previous one. Passing an empty function
/// restores the default.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(const std::string& message);

}  // namespace homolab
