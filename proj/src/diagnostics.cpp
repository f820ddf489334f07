// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "homolab/diagnostics.hpp"

#include <iostream>
#include <mutex>

namespace homolab {

namespace {

std::mutex& handler_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& current_handler() {
  static WarningHandler h;
  return h;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(handler_mutex());
  WarningHandler previous = std::move(current_handler());
  current_handler() = std::move(handler);
  return previous;
}

void warn(const std::string& message) {
  std::lock_guard lock(handler_mutex());
  if (current_handler()) {
    current_handler()(message);
  } else {
    std::cerr << "homolab warning: " << message << '\n';
  }
}

}  // namespace homolab
