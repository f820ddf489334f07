// Copyright The homolab Authors.
// SPDX-License-Identifier: Apache-2.0

#include <exception>
#include <memory>
#include <new>
#include <string>

#include "homolab/cell_problem.hpp"
#include "homolab/config.hpp"
#include "homolab/error.hpp"
#include "homolab/homolab.h"
#include "homolab/runner.hpp"

struct homolab_config {
  homolab::RunConfig cfg;
  std::string resolved;
};

struct homolab_field {
  homolab::CoefficientField field;
};

namespace {

thread_local std::string g_last_error;
thread_local int g_last_line = 0;

homolab_status fail(homolab_status s, const std::string& msg, int line = 0) {
  g_last_error = msg;
  g_last_line = line;
  return s;
}

void clear() {
  g_last_error.clear();
  g_last_line = 0;
}

// Maps the active exception to a status.
homolab_status translate() {
  try {
    throw;
  } catch (const homolab::ConfigError& e) {
    return fail(HOMOLAB_ERR_CONFIG, e.what(), e.line());
  } catch (const homolab::InvalidArgument& e) {
    return fail(HOMOLAB_ERR_ARGUMENT, e.what());
  } catch (const homolab::NumericalError& e) {
    return fail(HOMOLAB_ERR_NUMERICAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(HOMOLAB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(HOMOLAB_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(HOMOLAB_ERR_INTERNAL, "unknown error");
  }
}

template <typename F>
homolab_status guarded(F&& f) {
  clear();
  try {
    return f();
  } catch (...) {
    return translate();
  }
}

}  // namespace

extern "C" {

const char* homolab_version(void) { return homolab::version_string(); }
const char* homolab_last_error(void) { return g_last_error.c_str(); }
int homolab_last_error_line(void) { return g_last_line; }

homolab_status homolab_config_parse_file(const char* path, homolab_config** out) {
  return guarded([&] {
    if (!path || !out) return fail(HOMOLAB_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    auto c = std::make_unique<homolab_config>();
    c->cfg = homolab::parse_config_file(path);
    *out = c.release();
    return HOMOLAB_OK;
  });
}

homolab_status homolab_config_parse_string(const char* text, homolab_config** out) {
  return guarded([&] {
    if (!text || !out) return fail(HOMOLAB_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    auto c = std::make_unique<homolab_config>();
    c->cfg = homolab::parse_config(text);
    *out = c.release();
    return HOMOLAB_OK;
  });
}

void homolab_config_destroy(homolab_config* config) { delete config; }

homolab_status homolab_config_set_output_dir(homolab_config* config, const char* dir) {
  return guarded([&] {
    if (!config || !dir || !*dir) return fail(HOMOLAB_ERR_ARGUMENT, "output directory must be non-empty");
    config->cfg.output_dir = dir;
    return HOMOLAB_OK;
  });
}

homolab_status homolab_config_set_jobs(homolab_config* config, int jobs) {
  return guarded([&] {
    if (!config || jobs < 1) return fail(HOMOLAB_ERR_ARGUMENT, "jobs must be >= 1");
    config->cfg.jobs = jobs;
    return HOMOLAB_OK;
  });
}

const char* homolab_config_resolved_text(homolab_config* config) {
  if (!config) return "";
  try {
    config->resolved = homolab::resolved_config_text(config->cfg);
  } catch (...) {
    translate();
    config->resolved.clear();
  }
  return config->resolved.c_str();
}

size_t homolab_command_count(void) { return homolab::command_names().size(); }

const char* homolab_command_name(size_t i) {
  const auto& names = homolab::command_names();
  return i < names.size() ? names[i].c_str() : nullptr;
}

homolab_status homolab_run(const char* command, const homolab_config* config, homolab_log_fn log, void* user,
                           int* exit_code) {
  return guarded([&] {
    if (!command || !config || !exit_code) return fail(HOMOLAB_ERR_ARGUMENT, "null argument");
    homolab::LogSink sink;
    if (log) sink = [log, user](const std::string& line) { log(line.c_str(), user); };
    const auto r = homolab::run_command(command, config->cfg, sink);
    *exit_code = r.exit_code;
    if (!r.message.empty()) g_last_error = r.message;
    return HOMOLAB_OK;
  });
}

homolab_status homolab_field_create(const homolab_config* config, homolab_field** out) {
  return guarded([&] {
    if (!config || !out) return fail(HOMOLAB_ERR_ARGUMENT, "null argument");
    *out = nullptr;
    *out = new homolab_field{homolab::make_field(config->cfg)};
    return HOMOLAB_OK;
  });
}

void homolab_field_destroy(homolab_field* field) { delete field; }

int homolab_field_dim(const homolab_field* field) { return field ? field->field.dim() : 0; }

homolab_status homolab_field_eval(const homolab_field* field, const double* y, double* a_out) {
  return guarded([&] {
    if (!field || !y || !a_out) return fail(HOMOLAB_ERR_ARGUMENT, "null argument");
    const int d = field->field.dim();
    const auto a = field->field.evaluate({y[0], d == 2 ? y[1] : 0.0});
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a_out[d * i + j] = a(i, j);
    return HOMOLAB_OK;
  });
}

homolab_status homolab_homogenize(const homolab_field* field, int cell_n, double tol, double* a_hat_out) {
  return guarded([&] {
    if (!field || !a_hat_out) return fail(HOMOLAB_ERR_ARGUMENT, "null argument");
    const auto a = homolab::compute_homogenized(field->field, cell_n, tol);
    for (int i = 0; i < a.dim; ++i)
      for (int j = 0; j < a.dim; ++j) a_hat_out[a.dim * i + j] = a.a_hat(i, j);
    return HOMOLAB_OK;
  });
}

int homolab_status_exit_code(homolab_status status) {
  switch (status) {
    case HOMOLAB_OK:
      return 0;
    case HOMOLAB_ERR_CONFIG:
    case HOMOLAB_ERR_ARGUMENT:
    case HOMOLAB_ERR_IO:
      return 1;
    default:
      return 2;
  }
}

}  // extern "C"
