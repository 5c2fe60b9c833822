#include "convergema/convergema.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <sstream>
#include <string>

#include "core/convergence.hpp"
#include "core/errors.hpp"
#include "core/io.hpp"
#include "core/pipeline.hpp"

using namespace convergema;

struct cvg_config {
  Config config;
};

struct cvg_obs {
  ObservationLog log;
};

struct cvg_trace {
  Config config;
  std::unique_ptr<LearningTrace> trace;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
cvg_status guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return CVG_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<cvg_status>(static_cast<int>(e.code()));
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return CVG_PARSE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CVG_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return CVG_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw Error(ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

PowerLawCurve to_curve(cvg_curve c) { return {c.a, c.b, c.c}; }

}  // namespace

extern "C" {

CVG_API const char* cvg_status_string(cvg_status status) {
  if (status == CVG_OK) return "ok";
  return error_code_name(static_cast<ErrorCode>(status));
}

CVG_API const char* cvg_last_error(void) { return g_last_error.c_str(); }

CVG_API void cvg_string_free(char* s) { std::free(s); }

CVG_API const char* cvg_version(void) { return "0.1.0"; }

CVG_API cvg_status cvg_curve_evaluate(cvg_curve curve, double x, double* out) {
  return guard([&] {
    require(out, "out");
    *out = evaluate(to_curve(curve), x);
  });
}

CVG_API cvg_status cvg_curve_derivative(cvg_curve curve, double x, double* out) {
  return guard([&] {
    require(out, "out");
    *out = derivative(to_curve(curve), x);
  });
}

CVG_API cvg_status cvg_intersect(cvg_curve c1, cvg_curve c2, double x_min, double x_max,
                                 int* count, double* roots_x, double* roots_y) {
  return guard([&] {
    require(count, "count");
    require(roots_x, "roots_x");
    require(roots_y, "roots_y");
    const IntersectionSet s = intersect(to_curve(c1), to_curve(c2), x_min, x_max);
    *count = s.count;
    if (s.first) {
      roots_x[0] = s.first->x;
      roots_y[0] = s.first->y;
    }
    if (s.count == 2) {
      roots_x[1] = s.last->x;
      roots_y[1] = s.last->y;
    }
  });
}

CVG_API cvg_config* cvg_config_create(void) {
  try {
    return new cvg_config{};
  } catch (...) {
    g_last_error = "out of memory";
    return nullptr;
  }
}

CVG_API void cvg_config_destroy(cvg_config* cfg) { delete cfg; }

#define CVG_SETTER(name, type, stmt)                              \
  CVG_API cvg_status cvg_config_set_##name(cvg_config* cfg, type value) { \
    return guard([&] {                                            \
      require(cfg, "cfg");                                        \
      stmt;                                                       \
    });                                                           \
  }

CVG_SETTER(nu, double, cfg->config.params.nu = value)
CVG_SETTER(slowdown, int, cfg->config.params.slowdown = value)
CVG_SETTER(lambda, int, cfg->config.params.lambda = value)
CVG_SETTER(kernel, int64_t, cfg->config.kernel = value)
CVG_SETTER(step, int64_t, cfg->config.step = value)
CVG_SETTER(tau, double, cfg->config.condition.tau = value)
CVG_SETTER(fit_tol, double, cfg->config.fit.rel_sse_tol = value)
CVG_SETTER(fit_max_iter, int, cfg->config.fit.max_iterations = value)
CVG_SETTER(anchor_weight, double, cfg->config.anchor_weight = value)

#undef CVG_SETTER

CVG_API cvg_status cvg_config_set_horizon_len(cvg_config* cfg, int horizon_len) {
  return guard([&] {
    require(cfg, "cfg");
    if (horizon_len < 3) throw Error(ErrorCode::kInvalidArgument, "horizon length must be >= 3");
    cfg->config.horizon_len = static_cast<std::size_t>(horizon_len);
  });
}

CVG_API cvg_status cvg_config_set_tau_r(cvg_config* cfg, double tau_r) {
  return guard([&] {
    require(cfg, "cfg");
    if (tau_r > 0.0) {
      cfg->config.tau_r = tau_r;
    } else {
      cfg->config.tau_r.reset();
    }
  });
}

CVG_API cvg_status cvg_config_set_strategy(cvg_config* cfg, const char* strategy) {
  return guard([&] {
    require(cfg, "cfg");
    require(strategy, "strategy");
    cfg->config.strategy = parse_strategy(strategy);
  });
}

CVG_API cvg_status cvg_config_set_condition(cvg_config* cfg, const char* condition) {
  return guard([&] {
    require(cfg, "cfg");
    require(condition, "condition");
    const std::string c = condition;
    if (c == "absolute") {
      cfg->config.condition.kind = ConditionKind::kAbsolute;
    } else if (c == "relative") {
      cfg->config.condition.kind = ConditionKind::kRelative;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "condition must be absolute or relative");
    }
  });
}

CVG_API cvg_status cvg_config_set_plevel_source(cvg_config* cfg, const char* source) {
  return guard([&] {
    require(cfg, "cfg");
    require(source, "source");
    const std::string s = source;
    if (s == "reference") {
      cfg->config.plevel_source = PLevelSource::kReference;
    } else if (s == "anchored") {
      cfg->config.plevel_source = PLevelSource::kAnchored;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "plevel source must be reference or anchored");
    }
  });
}

CVG_API cvg_status cvg_config_set_error_target(cvg_config* cfg, const char* target) {
  return guard([&] {
    require(cfg, "cfg");
    require(target, "target");
    const std::string s = target;
    if (s == "raw") {
      cfg->config.error_target = ErrorTarget::kRaw;
    } else if (s == "fitted") {
      cfg->config.error_target = ErrorTarget::kFitted;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "error target must be raw or fitted");
    }
  });
}

CVG_API cvg_status cvg_config_validate(const cvg_config* cfg) {
  return guard([&] {
    require(cfg, "cfg");
    validate(cfg->config);
  });
}

CVG_API cvg_obs* cvg_obs_create(void) {
  try {
    return new cvg_obs{};
  } catch (...) {
    g_last_error = "out of memory";
    return nullptr;
  }
}

CVG_API void cvg_obs_destroy(cvg_obs* obs) { delete obs; }

CVG_API cvg_status cvg_obs_parse_csv(cvg_obs* obs, const char* text, const cvg_config* cfg) {
  return guard([&] {
    require(obs, "obs");
    require(text, "text");
    std::istringstream in(text);
    obs->log = read_observations(in, cfg ? declared_scheme(cfg->config) : std::nullopt);
  });
}

CVG_API cvg_status cvg_obs_load_csv(cvg_obs* obs, const char* path, const cvg_config* cfg) {
  return guard([&] {
    require(obs, "obs");
    require(path, "path");
    obs->log = read_observations_file(path, cfg ? declared_scheme(cfg->config) : std::nullopt);
  });
}

CVG_API cvg_status cvg_obs_add(cvg_obs* obs, int level, double size, double accuracy) {
  return guard([&] {
    require(obs, "obs");
    obs->log.append({level, size, accuracy});
  });
}

CVG_API size_t cvg_obs_count(const cvg_obs* obs) { return obs ? obs->log.size() : 0; }

CVG_API cvg_status cvg_obs_get(const cvg_obs* obs, size_t index, int* level, double* size,
                               double* accuracy) {
  return guard([&] {
    require(obs, "obs");
    if (index >= obs->log.size()) throw Error(ErrorCode::kInvalidArgument, "index out of range");
    const Observation& o = obs->log[index];
    if (level) *level = o.level;
    if (size) *size = o.x;
    if (accuracy) *accuracy = o.accuracy;
  });
}

CVG_API cvg_status cvg_obs_to_csv(const cvg_obs* obs, char** out) {
  return guard([&] {
    require(obs, "obs");
    require(out, "out");
    *out = dup_string(observations_to_csv(obs->log));
  });
}

CVG_API cvg_status cvg_trace_create(const cvg_config* cfg, cvg_trace** out) {
  return guard([&] {
    require(out, "out");
    *out = nullptr;
    auto t = std::make_unique<cvg_trace>();
    if (cfg) t->config = cfg->config;
    validate(t->config);
    t->trace = std::make_unique<LearningTrace>(trace_options(t->config));
    *out = t.release();
  });
}

CVG_API void cvg_trace_destroy(cvg_trace* trace) { delete trace; }

CVG_API cvg_status cvg_trace_extend(cvg_trace* trace, int level, double size, double accuracy) {
  return guard([&] {
    require(trace, "trace");
    if (!(accuracy > 0.0) || accuracy > 100.0) {
      throw Error(ErrorCode::kInvalidArgument, "accuracy must lie in (0, 100]");
    }
    if (auto scheme = declared_scheme(trace->config)) {
      if (size != static_cast<double>(scheme->position(level))) {
        throw Error(ErrorCode::kInvalidArgument, "size disagrees with the declared scheme");
      }
    }
    trace->trace->extend({level, size, accuracy});
  });
}

CVG_API cvg_status cvg_trace_wlevel(const cvg_trace* trace, int* found, int* level) {
  return guard([&] {
    require(trace, "trace");
    require(found, "found");
    const auto w = trace->trace->wlevel();
    *found = w ? 1 : 0;
    if (w && level) *level = *w;
  });
}

CVG_API cvg_status cvg_trace_plevel(const cvg_trace* trace, int* found, int* level) {
  return guard([&] {
    require(trace, "trace");
    require(found, "found");
    const auto p = trace->trace->plevel();
    *found = p ? 1 : 0;
    if (p && level) *level = *p;
  });
}

CVG_API size_t cvg_trace_backbone_size(const cvg_trace* trace) {
  return trace ? trace->trace->backbone().size() : 0;
}

CVG_API cvg_status cvg_trace_backbone_get(const cvg_trace* trace, size_t index, int* level,
                                          double* alpha) {
  return guard([&] {
    require(trace, "trace");
    const auto bb = trace->trace->backbone();
    if (index >= bb.size()) throw Error(ErrorCode::kInvalidArgument, "index out of range");
    if (level) *level = bb[index].level;
    if (alpha) *alpha = bb[index].alpha;
  });
}

CVG_API cvg_status cvg_trace_trend(const cvg_trace* trace, int level, cvg_curve* out) {
  return guard([&] {
    require(trace, "trace");
    require(out, "out");
    const FitResult* t = trace->trace->trend(level);
    if (!t) throw Error(ErrorCode::kInvalidArgument, "no trend at level " + std::to_string(level));
    *out = {t->curve.a, t->curve.b, t->curve.c};
  });
}

CVG_API cvg_status cvg_trace_clevel(const cvg_trace* trace, int* found, int* level) {
  return guard([&] {
    require(trace, "trace");
    require(found, "found");
    const auto c = clevel(*trace->trace, trace->config.condition);
    *found = c ? 1 : 0;
    if (c && level) *level = *c;
  });
}

CVG_API cvg_status cvg_trace_report_json(const cvg_trace* trace, char** out) {
  return guard([&] {
    require(trace, "trace");
    require(out, "out");
    ObservationLog log;
    for (const auto& o : trace->trace->observations()) log.append(o);
    *out = dup_string(analyze(trace->config, log).report.dump(2));
  });
}

CVG_API cvg_status cvg_analyze(const cvg_config* cfg, const cvg_obs* obs, char** report_json,
                               char** series_csv, int* converged) {
  return guard([&] {
    require(cfg, "cfg");
    require(obs, "obs");
    require(report_json, "report_json");
    const AnalysisOutput a = analyze(cfg->config, obs->log);
    std::string report = a.report.dump(2);
    char* r = dup_string(report);
    if (series_csv) {
      try {
        *series_csv = dup_string(a.series_csv);
      } catch (...) {
        std::free(r);
        throw;
      }
    }
    *report_json = r;
    if (converged) *converged = a.converged ? 1 : 0;
  });
}

CVG_API cvg_status cvg_tune(const cvg_config* cfg, const cvg_obs* obs, const cvg_obs* horizon,
                            char** report_json, int* selected) {
  return guard([&] {
    require(cfg, "cfg");
    require(obs, "obs");
    require(horizon, "horizon");
    require(report_json, "report_json");
    const nlohmann::json j = tune(cfg->config, obs->log, horizon->log);
    *report_json = dup_string(j.dump(2));
    if (selected) *selected = j["converged"].get<bool>() ? 1 : 0;
  });
}

CVG_API cvg_status cvg_evaluate_frame(const char* frame_json, const char* base_dir,
                                      char** report_json, char** table_csv) {
  return guard([&] {
    require(frame_json, "frame_json");
    require(report_json, "report_json");
    const auto frame = nlohmann::json::parse(frame_json);
    const FrameOutput f = evaluate_frame(frame, base_dir ? base_dir : "");
    char* r = dup_string(f.report.dump(2));
    if (table_csv) {
      try {
        *table_csv = dup_string(f.csv);
      } catch (...) {
        std::free(r);
        throw;
      }
    }
    *report_json = r;
  });
}

CVG_API cvg_status cvg_simulate(const char* spec_json, uint64_t seed, int has_seed,
                                cvg_obs** out) {
  return guard([&] {
    require(spec_json, "spec_json");
    require(out, "out");
    *out = nullptr;
    auto o = std::make_unique<cvg_obs>();
    o->log = simulate(nlohmann::json::parse(spec_json),
                      has_seed ? std::optional<std::uint64_t>(seed) : std::nullopt);
    *out = o.release();
  });
}

}  // extern "C"
