#include "oraclebound.h"

#include <cstdlib>
#include <cstring>
#include <map>
#include <string>

#include "json.hpp"

#include "core/config.hpp"
#include "core/emit.hpp"
#include "core/harness.hpp"
#include "core/infobounds.hpp"
#include "core/presets.hpp"

struct ob_config {
  ob::ExperimentConfig cfg;
};

struct ob_result {
  ob::ExperimentConfig cfg;  // stem and seed for write-time file naming
  ob::ExperimentResult res;
};

namespace {

thread_local std::string tl_error = "ok";

ob_status map_code(ob::Err e) {
  switch (e) {
    case ob::Err::invalid_argument: return OB_EINVAL;
    case ob::Err::domain_violation: return OB_EDOMAIN;
    case ob::Err::incompatible: return OB_EINCOMPATIBLE;
    case ob::Err::unsupported: return OB_EUNSUPPORTED;
    case ob::Err::precondition: return OB_EPRECONDITION;
    case ob::Err::construction_failure: return OB_ECONSTRUCTION;
    case ob::Err::parse: return OB_EPARSE;
    case ob::Err::io: return OB_EIO;
    case ob::Err::internal: return OB_EINTERNAL;
  }
  return OB_EINTERNAL;
}

ob_status set_error(ob_status code, const std::string& msg) {
  tl_error = msg;
  return code;
}

// Runs the body, translating exceptions into status codes.
template <typename F>
ob_status guarded(F&& body) {
  try {
    return body();
  } catch (const ob::Error& e) {
    return set_error(map_code(e.code()), e.what());
  } catch (const std::exception& e) {
    return set_error(OB_EINTERNAL, e.what());
  } catch (...) {
    return set_error(OB_EINTERNAL, "unknown exception");
  }
}

// malloc-backed copy so callers can release with ob_string_free / free.
char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ob_status require_args(std::initializer_list<const void*> ptrs) {
  for (const void* p : ptrs)
    if (!p) return set_error(OB_EINVAL, "null argument");
  return OB_OK;
}

}  // namespace

extern "C" {

const char* ob_version(void) { return "0.1.0"; }

const char* ob_last_error(void) { return tl_error.c_str(); }

void ob_string_free(char* s) { std::free(s); }

ob_status ob_config_parse(const char* text, ob_config** out) {
  if (ob_status s = require_args({text, out})) return s;
  return guarded([&] {
    auto* h = new ob_config{ob::parse_config(text)};
    *out = h;
    return OB_OK;
  });
}

ob_status ob_config_preset(const char* name, ob_config** out) {
  if (ob_status s = require_args({name, out})) return s;
  return guarded([&] {
    auto* h = new ob_config{ob::preset_config(name)};
    *out = h;
    return OB_OK;
  });
}

ob_status ob_config_override_seed(ob_config* cfg, uint64_t seed) {
  if (ob_status s = require_args({cfg})) return s;
  cfg->cfg.sweep.base_seed = seed;
  return OB_OK;
}

ob_status ob_config_set_stem(ob_config* cfg, const char* stem) {
  if (ob_status s = require_args({cfg, stem})) return s;
  return guarded([&] {
    ob::require(*stem != '\0', ob::Err::invalid_argument, "stem must be nonempty");
    cfg->cfg.stem = stem;
    return OB_OK;
  });
}

ob_status ob_config_echo(const ob_config* cfg, char** out) {
  if (ob_status s = require_args({cfg, out})) return s;
  return guarded([&] {
    *out = dup_string(ob::echo_config(cfg->cfg));
    return OB_OK;
  });
}

void ob_config_free(ob_config* cfg) { delete cfg; }

ob_status ob_run(const ob_config* cfg, int jobs, ob_result** out) {
  if (ob_status s = require_args({cfg, out})) return s;
  return guarded([&] {
    ob::ExperimentConfig c = cfg->cfg;
    c.sweep.jobs = jobs > 0 ? jobs : 0;
    auto* h = new ob_result{c, ob::run_experiment(c)};
    *out = h;
    return OB_OK;
  });
}

ob_status ob_result_csv(const ob_result* res, char** out) {
  if (ob_status s = require_args({res, out})) return s;
  return guarded([&] {
    *out = dup_string(ob::result_csv(res->res));
    return OB_OK;
  });
}

ob_status ob_result_json(const ob_result* res, char** out) {
  if (ob_status s = require_args({res, out})) return s;
  return guarded([&] {
    *out = dup_string(ob::result_json(res->res));
    return OB_OK;
  });
}

ob_status ob_result_write(const ob_result* res, const char* out_dir, const char* format,
                          char** paths) {
  if (ob_status s = require_args({res, out_dir, format})) return s;
  return guarded([&] {
    std::vector<std::string> written =
        ob::write_outputs(res->res, res->cfg, out_dir, format);
    if (paths) {
      std::string joined;
      for (size_t i = 0; i < written.size(); ++i) {
        if (i) joined += '\n';
        joined += written[i];
      }
      *paths = dup_string(joined);
    }
    return OB_OK;
  });
}

int ob_result_all_valid(const ob_result* res) {
  if (!res || !res->res.completed) return 0;
  for (const ob::BoundReport& r : res->res.reports)
    if (!r.all_valid()) return 0;
  return 1;
}

void ob_result_free(ob_result* res) { delete res; }

ob_status ob_fano_lower(int64_t n, double delta, double* out) {
  if (ob_status s = require_args({out})) return s;
  return guarded([&] {
    ob::require(n >= INT32_MIN && n <= INT32_MAX, ob::Err::invalid_argument,
                "fano_lower: hypothesis count out of range");
    *out = ob::fano_lower(static_cast<int>(n), delta);
    return OB_OK;
  });
}

ob_status ob_plugin_mi(const int64_t* counts, int n, double* mi, double* miller_madow) {
  if (ob_status s = require_args({counts})) return s;
  return guarded([&] {
    ob::require(n >= 1, ob::Err::invalid_argument, "plugin_mi: n >= 1");
    std::vector<int64_t> c(counts, counts + static_cast<size_t>(n) * n);
    ob::MiEstimate est = ob::plugin_mi(c, n);
    if (mi) *mi = est.mi_nats;
    if (miller_madow) *miller_madow = est.miller_madow;
    return OB_OK;
  });
}

ob_status ob_thm_lower_json(const char* which, const char* params_json, char** out) {
  if (ob_status s = require_args({which, params_json, out})) return s;
  return guarded([&] {
    auto bound = ob::thm_bound_from_name(which);
    ob::require(bound.has_value(), ob::Err::invalid_argument,
                std::string("unknown bound '") + which + "'");
    nlohmann::json obj = nlohmann::json::parse(params_json, nullptr, false);
    ob::require(obj.is_object(), ob::Err::parse, "params must be a JSON object of numbers");
    std::map<std::string, double> params;
    for (const auto& [k, v] : obj.items()) {
      ob::require(v.is_number(), ob::Err::parse, "param '" + k + "' must be a number");
      params[k] = v.get<double>();
    }
    *out = dup_string(ob::report_json(ob::thm_lower(*bound, params)));
    return OB_OK;
  });
}

ob_status ob_recurrence_check(double K, double L, double alpha, const double* eps, int64_t len,
                              int64_t* holds_up_to, int64_t* first_violation) {
  if (ob_status s = require_args({eps})) return s;
  return guarded([&] {
    ob::require(len >= 1, ob::Err::invalid_argument, "recurrence_check: len >= 1");
    ob::RecurrenceReport rep =
        ob::recurrence_check(K, L, alpha, ob::ConstSpan(eps, static_cast<size_t>(len)));
    if (holds_up_to) *holds_up_to = rep.holds_up_to;
    if (first_violation) *first_violation = rep.first_violation.value_or(-1);
    return OB_OK;
  });
}

}  // extern "C"
