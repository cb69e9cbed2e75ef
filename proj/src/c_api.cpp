#include "fcmcrlb/fcm_crlb.h"

#include <fstream>
#include <new>
#include <string>

#include "fcmcrlb/bounds.hpp"
#include "fcmcrlb/error.hpp"
#include "fcmcrlb/experiments.hpp"
#include "fcmcrlb/numerics.hpp"

struct fcm_config {
  fcmcrlb::ExperimentConfig cfg;
  std::string serialized;
};

struct fcm_result {
  fcmcrlb::ResultTable table;
  std::string csv;
};

namespace {

thread_local std::string g_last_error;

fcm_status status_of(fcmcrlb::ErrorCode code) {
  using fcmcrlb::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return FCM_ERR_INVALID_ARGUMENT;
    case ErrorCode::Domain: return FCM_ERR_DOMAIN;
    case ErrorCode::NotPsd: return FCM_ERR_NOT_PSD;
    case ErrorCode::Precondition: return FCM_ERR_PRECONDITION;
    case ErrorCode::DimensionMismatch: return FCM_ERR_DIMENSION;
    case ErrorCode::Config: return FCM_ERR_CONFIG;
    case ErrorCode::Io: return FCM_ERR_IO;
    case ErrorCode::Internal: return FCM_ERR_INTERNAL;
  }
  return FCM_ERR_INTERNAL;
}

template <typename Fn>
fcm_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return FCM_OK;
  } catch (const fcmcrlb::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return FCM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FCM_ERR_INTERNAL;
  }
}

fcm_status null_argument(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return FCM_ERR_INVALID_ARGUMENT;
}

std::optional<fcmcrlb::Experiment> experiment_arg(const char* name) {
  if (name == nullptr) return std::nullopt;
  return fcmcrlb::parse_experiment(name);
}

void refresh(fcm_config* c) { c->serialized = fcmcrlb::serialize_config(c->cfg); }

}  // namespace

extern "C" {

const char* fcm_status_string(fcm_status status) {
  switch (status) {
    case FCM_OK: return "ok";
    case FCM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case FCM_ERR_DOMAIN: return "domain error";
    case FCM_ERR_NOT_PSD: return "matrix not positive semidefinite";
    case FCM_ERR_PRECONDITION: return "precondition violated";
    case FCM_ERR_DIMENSION: return "dimension mismatch";
    case FCM_ERR_CONFIG: return "configuration error";
    case FCM_ERR_IO: return "i/o error";
    case FCM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* fcm_last_error(void) { return g_last_error.c_str(); }

void fcm_set_warning_callback(fcm_warning_fn fn, void* user_data) {
  if (fn == nullptr) {
    fcmcrlb::set_warning_handler(nullptr);
    return;
  }
  fcmcrlb::set_warning_handler([fn, user_data](std::string_view msg) {
    const std::string s(msg);
    fn(s.c_str(), user_data);
  });
}

fcm_status fcm_config_default(const char* experiment, fcm_config** out) {
  if (experiment == nullptr) return null_argument("experiment");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    auto* c = new fcm_config{fcmcrlb::default_config(fcmcrlb::parse_experiment(experiment)), {}};
    refresh(c);
    *out = c;
  });
}

fcm_status fcm_config_parse(const char* json_text, const char* experiment, fcm_config** out) {
  if (json_text == nullptr) return null_argument("json_text");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    auto* c = new fcm_config{fcmcrlb::parse_config(json_text, experiment_arg(experiment)), {}};
    refresh(c);
    *out = c;
  });
}

fcm_status fcm_config_load(const char* path, const char* experiment, fcm_config** out) {
  if (path == nullptr) return null_argument("path");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    auto* c = new fcm_config{fcmcrlb::load_config(path, experiment_arg(experiment)), {}};
    refresh(c);
    *out = c;
  });
}

void fcm_config_free(fcm_config* cfg) { delete cfg; }

fcm_status fcm_config_set_seed(fcm_config* cfg, uint64_t seed) {
  if (cfg == nullptr) return null_argument("cfg");
  return guarded([&] {
    cfg->cfg.master_seed = seed;
    refresh(cfg);
  });
}

fcm_status fcm_config_set_mode(fcm_config* cfg, const char* mode) {
  if (cfg == nullptr) return null_argument("cfg");
  if (mode == nullptr) return null_argument("mode");
  return guarded([&] {
    cfg->cfg.mode = fcmcrlb::parse_mode(mode);
    refresh(cfg);
  });
}

fcm_status fcm_config_set_workers(fcm_config* cfg, unsigned workers) {
  if (cfg == nullptr) return null_argument("cfg");
  return guarded([&] {
    fcmcrlb::require(workers >= 1, fcmcrlb::ErrorCode::InvalidArgument,
                     "workers must be >= 1");
    cfg->cfg.workers = workers;
    refresh(cfg);
  });
}

fcm_status fcm_config_set_out_path(fcm_config* cfg, const char* path) {
  if (cfg == nullptr) return null_argument("cfg");
  if (path == nullptr) return null_argument("path");
  return guarded([&] {
    cfg->cfg.out_path = path;
    refresh(cfg);
  });
}

fcm_status fcm_config_set_paper_scale(fcm_config* cfg) {
  if (cfg == nullptr) return null_argument("cfg");
  return guarded([&] {
    cfg->cfg.apply_paper_scale();
    refresh(cfg);
  });
}

const char* fcm_config_out_path(const fcm_config* cfg) {
  return cfg ? cfg->cfg.out_path.c_str() : "";
}

const char* fcm_config_experiment(const fcm_config* cfg) {
  return cfg ? fcmcrlb::to_string(cfg->cfg.experiment).data() : "";
}

const char* fcm_config_serialized(const fcm_config* cfg) {
  return cfg ? cfg->serialized.c_str() : "";
}

uint64_t fcm_config_hash(const fcm_config* cfg) {
  return cfg ? fcmcrlb::config_hash(cfg->cfg) : 0;
}

fcm_status fcm_run(const fcm_config* cfg, fcm_result** out) {
  if (cfg == nullptr) return null_argument("cfg");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    auto* r = new fcm_result{fcmcrlb::run_experiment(cfg->cfg), {}};
    r->csv = r->table.to_csv();
    *out = r;
  });
}

const char* fcm_result_csv(const fcm_result* result) { return result ? result->csv.c_str() : ""; }

size_t fcm_result_rows(const fcm_result* result) {
  return result ? result->table.rows.size() : 0;
}

fcm_status fcm_result_write(const fcm_result* result, const char* path) {
  if (result == nullptr) return null_argument("result");
  if (path == nullptr) return null_argument("path");
  return guarded([&] {
    std::ofstream out(path, std::ios::binary);
    fcmcrlb::require(static_cast<bool>(out), fcmcrlb::ErrorCode::Io,
                     std::string("cannot open ") + path + " for writing");
    out << result->csv;
    fcmcrlb::require(static_cast<bool>(out), fcmcrlb::ErrorCode::Io,
                     std::string("write failed: ") + path);
  });
}

void fcm_result_free(fcm_result* result) { delete result; }

fcm_status fcm_bessel_j0(double x, double* out) {
  if (out == nullptr) return null_argument("out");
  return guarded([&] { *out = fcmcrlb::bessel_j0(x); });
}

fcm_status fcm_lambda_max_fit(int n, double fdts, double* out) {
  if (out == nullptr) return null_argument("out");
  return guarded([&] { *out = fcmcrlb::lambda_max_fit(n, fdts); });
}

fcm_status fcm_avgmse_lb(int n, long n_t, double gamma, double omega, double* out) {
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    fcmcrlb::require(n >= 1 && n_t >= 1 && gamma > 0.0 && omega > 0.0,
                     fcmcrlb::ErrorCode::InvalidArgument,
                     "fcm_avgmse_lb: arguments must be positive");
    const double x = 1.0 + 1.0 / (omega * gamma);
    *out = x * x / static_cast<double>(n_t);
  });
}

fcm_status fcm_avgmse_lb_pilot_free(int n, long n_t, double gamma, double lambda_max,
                                    double* out) {
  if (out == nullptr) return null_argument("out");
  return guarded([&] { *out = fcmcrlb::avgmse_lb_pilot_free(n, n_t, gamma, lambda_max); });
}

fcm_status fcm_avgmse_lb_insightful(int n, long n_t, double gamma, double fdts, double* out) {
  if (out == nullptr) return null_argument("out");
  return guarded([&] { *out = fcmcrlb::avgmse_lb_insightful(n, n_t, gamma, fdts); });
}

}  // extern "C"
