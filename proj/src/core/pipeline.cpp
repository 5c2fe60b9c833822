#include "core/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "core/errors.hpp"
#include "core/io.hpp"
#include "core/tuning.hpp"

namespace convergema {

using nlohmann::json;

namespace {

json optional_int(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }
json optional_num(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

const char* condition_name(ConditionKind k) {
  return k == ConditionKind::kAbsolute ? "absolute" : "relative";
}

std::string fixed2(const std::optional<double>& v) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", round_table(*v));
  return buf;
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
  return p.string();
}

// Unanchored trace plus the matching baseline run and absolute threshold.
struct Baseline {
  double tau_a = 0.0;
  Run run;
};

Baseline make_baseline(const LearningTrace& plain, const Config& config) {
  Baseline b;
  if (config.tau_r) {
    b.tau_a = normalize_threshold(plain, *config.tau_r);
    b.run = make_run("baseline", plain, {ConditionKind::kRelative, *config.tau_r}, b.tau_a);
  } else {
    b.tau_a = config.condition.tau;
    EpsilonOptions lenient;
    lenient.require_decreasing = false;
    // The plain backbone may rise, so the usual decreasing check is off here.
    b.run.name = "baseline";
    b.run.strategy = plain.options().strategy;
    b.run.condition = {ConditionKind::kAbsolute, b.tau_a};
    b.run.plevel = plain.plevel();
    b.run.clevel = AbsoluteRule(b.tau_a, lenient).stop_level(plain);
    b.run.threshold_level = b.run.clevel;
    if (b.run.clevel) {
      if (const FitResult* t = plain.trend(*b.run.clevel)) b.run.stop_trend = t->curve;
    }
  }
  if (!b.run.clevel) {
    throw Error(ErrorCode::kUnresolvedCLevel,
                "the unanchored baseline never converges on these observations");
  }
  return b;
}

struct Metrics {
  std::optional<double> rc, a_c, a_e, rp_c, rp_e;
};

Metrics metrics_for(const Run& run, const Run& baseline, const Horizon* horizon, double tau,
                    ErrorTarget target) {
  Metrics m;
  if (!run.clevel || !baseline.clevel) return m;
  m.rc = relative_cost(run, baseline);
  if (horizon && run.stop_trend) {
    m.a_c = accuracy(run, *horizon, tau, AccuracyMode::kConvergence, target);
    m.a_e = accuracy(run, *horizon, tau, AccuracyMode::kError, target);
    m.rp_c = relative_performance(*m.a_c, *m.rc);
    m.rp_e = relative_performance(*m.a_e, *m.rc);
  }
  return m;
}

json row_json(const std::string& frame, const std::string& name, const std::string& strategy,
              const std::string& condition, double tau, std::optional<int> plevel,
              std::optional<int> clevel, const Metrics& m, std::optional<double> put_value,
              std::optional<int> look_ahead) {
  return {{"frame", frame},
          {"run", name},
          {"strategy", strategy},
          {"condition", condition},
          {"tau", tau},
          {"plevel", optional_int(plevel)},
          {"clevel", optional_int(clevel)},
          {"a_c", optional_num(m.a_c)},
          {"rc", optional_num(m.rc)},
          {"rp_c", optional_num(m.rp_c)},
          {"a_e", optional_num(m.a_e)},
          {"rp_e", optional_num(m.rp_e)},
          {"put", optional_num(put_value)},
          {"look_ahead", optional_int(look_ahead)}};
}

std::string rows_csv(const json& rows) {
  std::ostringstream out;
  out << "frame,run,strategy,condition,tau,plevel,clevel,a_c,rc,rp_c,a_e,rp_e,put,look_ahead\n";
  auto num = [](const json& v) -> std::optional<double> {
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
  };
  auto integer = [](const json& v) { return v.is_null() ? std::string() : std::to_string(v.get<int>()); };
  for (const auto& r : rows) {
    out << r["frame"].get<std::string>() << ',' << r["run"].get<std::string>() << ','
        << r["strategy"].get<std::string>() << ',' << r["condition"].get<std::string>() << ','
        << fixed2(num(r["tau"])) << ',' << integer(r["plevel"]) << ',' << integer(r["clevel"])
        << ',' << fixed2(num(r["a_c"])) << ',' << fixed2(num(r["rc"])) << ','
        << fixed2(num(r["rp_c"])) << ',' << fixed2(num(r["a_e"])) << ','
        << fixed2(num(r["rp_e"])) << ',' << fixed2(num(r["put"])) << ','
        << integer(r["look_ahead"]) << '\n';
  }
  return out.str();
}

ErrorTarget parse_error_target(const std::string& s) {
  if (s == "raw") return ErrorTarget::kRaw;
  if (s == "fitted") return ErrorTarget::kFitted;
  throw Error(ErrorCode::kInvalidArgument, "error target must be raw or fitted, got '" + s + "'");
}

void evaluate_fixture_frame(const json& frame, json& rows) {
  const std::string name = frame.value("name", std::string("frame"));
  const double tau = frame.value("tau", 0.0);
  const json& base = frame.at("baseline");
  const int base_cl = base.at("clevel").get<int>();

  auto add = [&](const std::string& run, const json& r) {
    Metrics m;
    const int cl = r.at("clevel").get<int>();
    m.rc = relative_cost(cl, base_cl);
    if (r.contains("a_c")) {
      m.a_c = r["a_c"].get<double>();
      m.rp_c = relative_performance(*m.a_c, *m.rc);
    }
    if (r.contains("a_e")) {
      m.a_e = r["a_e"].get<double>();
      m.rp_e = relative_performance(*m.a_e, *m.rc);
    }
    std::optional<double> put_value;
    if (r.contains("put")) put_value = r["put"].get<double>();
    std::optional<int> la;
    if (r.contains("look_ahead")) la = r["look_ahead"].get<int>();
    std::optional<int> pl;
    if (r.contains("plevel")) pl = r["plevel"].get<int>();
    rows.push_back(row_json(name, run, r.value("strategy", std::string()),
                            r.value("condition", std::string()), tau, pl, cl, m, put_value, la));
  };
  add("baseline", base);
  for (const auto& r : frame.value("runs", json::array())) {
    add(r.at("name").get<std::string>(), r);
  }
}

void evaluate_live_frame(const json& frame, const std::string& base_dir, json& rows) {
  Config config;
  config.strategy = AnchoringStrategy::none();
  const std::string name = frame.value("name", std::string("frame"));
  if (frame.contains("params")) {
    const auto& p = frame["params"];
    config.params.nu = p.value("nu", config.params.nu);
    config.params.slowdown = p.value("slowdown", config.params.slowdown);
    config.params.lambda = p.value("lambda", config.params.lambda);
  }
  config.horizon_len = frame.value("horizon_len", config.horizon_len);
  config.anchor_weight = frame.value("anchor_weight", config.anchor_weight);
  config.error_target = parse_error_target(frame.value("error_target", std::string("raw")));
  if (frame.contains("tau_r")) config.tau_r = frame["tau_r"].get<double>();
  if (frame.contains("tau")) config.condition.tau = frame["tau"].get<double>();
  if (!frame.contains("tau_r") && !frame.contains("tau")) {
    throw Error(ErrorCode::kInvalidArgument, "frame '" + name + "' needs tau_r or tau");
  }
  validate(config);

  const std::string obs_path = resolve(base_dir, frame.at("observations").get<std::string>());
  const ObservationLog obs = read_observations_file(obs_path);
  const ObservationLog horizon_log =
      frame.contains("horizon")
          ? read_observations_file(resolve(base_dir, frame["horizon"].get<std::string>()))
          : obs;
  const Horizon horizon = make_horizon(horizon_log, config.horizon_len, config.fit);

  const LearningTrace plain = LearningTrace::build(obs, trace_options(config));
  const Baseline base = make_baseline(plain, config);
  const double tau = base.tau_a;

  rows.push_back(row_json(name, "baseline", "none", condition_name(base.run.condition.kind), tau,
                          base.run.plevel, base.run.clevel,
                          metrics_for(base.run, base.run, &horizon, tau, config.error_target),
                          std::nullopt, std::nullopt));

  for (const auto& r : frame.value("runs", json::array())) {
    const std::string run_name = r.at("name").get<std::string>();
    std::string strategy_text = r.at("strategy").get<std::string>();
    const std::string cond_text = r.value("condition", std::string("absolute"));
    ProximityCondition cond{ConditionKind::kAbsolute, tau};
    if (cond_text == "relative") {
      if (!config.tau_r) throw Error(ErrorCode::kInvalidArgument, "relative runs need tau_r");
      cond = {ConditionKind::kRelative, *config.tau_r};
    } else if (cond_text != "absolute") {
      throw Error(ErrorCode::kInvalidArgument, "unknown condition '" + cond_text + "'");
    }

    std::optional<double> put_value;
    std::optional<int> look_ahead;
    AnchoringStrategy strategy;
    constexpr std::string_view auto_suffix = "+auto";
    if (strategy_text.size() > auto_suffix.size() &&
        strategy_text.compare(strategy_text.size() - auto_suffix.size(), auto_suffix.size(),
                              auto_suffix) == 0) {
      const AnchoringStrategy fixed =
          parse_strategy(strategy_text.substr(0, strategy_text.size() - auto_suffix.size()));
      const TuningResult t = find_optimal_look_ahead(plain, fixed.beta, tau, *base.run.clevel);
      if (!t.selected) {
        throw Error(ErrorCode::kNotReached, "look-ahead tuning found no candidate for run '" +
                                                run_name + "'");
      }
      const auto& sel = t.candidates[*t.selected];
      look_ahead = sel.look_ahead;
      put_value = sel.put;
      strategy = AnchoringStrategy::fixed_look_ahead(fixed.beta, *sel.look_ahead);
      strategy_text = strategy.to_string();
    } else {
      strategy = parse_strategy(strategy_text);
      if (strategy.kind == AnchorKind::kFixedLookAhead) look_ahead = strategy.look_ahead;
    }

    const LearningTrace trace = plain.with_strategy(strategy);
    const Run run = make_run(run_name, trace, cond, tau);
    rows.push_back(row_json(name, run_name, strategy_text, cond_text, tau, run.plevel, run.clevel,
                            metrics_for(run, base.run, &horizon, tau, config.error_target),
                            put_value, look_ahead));
  }
}

}  // namespace

void validate(const Config& config) {
  validate(config.params);
  validate(config.condition);
  if (config.tau_r && !(*config.tau_r > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "relative threshold must be positive");
  }
  if (config.kernel && *config.kernel <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "kernel must be positive");
  }
  if (config.step && *config.step <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "step must be positive");
  }
  if (config.horizon_len < 3) throw Error(ErrorCode::kInvalidArgument, "horizon length must be >= 3");
  if (!(config.fit.rel_sse_tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "fit tolerance must be positive");
  }
  if (config.fit.max_iterations < 1) {
    throw Error(ErrorCode::kInvalidArgument, "fit iteration cap must be >= 1");
  }
  if (!(config.anchor_weight > 0.0) || !std::isfinite(config.anchor_weight)) {
    throw Error(ErrorCode::kInvalidArgument, "anchor weight must be positive");
  }
}

std::optional<LearningScheme> declared_scheme(const Config& config) {
  if (!config.kernel && !config.step) return std::nullopt;
  return LearningScheme::uniform(config.kernel.value_or(kDefaultKernel),
                                 config.step.value_or(kDefaultStep));
}

TraceOptions trace_options(const Config& config) {
  TraceOptions o;
  o.params = config.params;
  o.strategy = config.strategy;
  o.fit = config.fit;
  o.anchor_weight = config.anchor_weight;
  o.plevel_source = config.plevel_source;
  return o;
}

AnalysisOutput analyze(const Config& config, const ObservationLog& observations) {
  validate(config);
  if (observations.size() < 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "need at least 3 observations to fit a trend, got " +
                    std::to_string(observations.size()));
  }
  const LearningTrace trace = LearningTrace::build(observations, trace_options(config));

  EpsilonOptions eps_opts;
  eps_opts.require_decreasing = config.condition.kind == ConditionKind::kAbsolute;
  const auto eps = epsilon_sequence(trace, eps_opts);
  const std::optional<int> stop = clevel(trace, config.condition);

  const auto p = trace.plevel();
  const bool put_applies = trace.options().strategy.is_fixed() && p &&
                           config.condition.kind == ConditionKind::kAbsolute;
  std::map<int, double> puts;
  if (put_applies) {
    for (const auto& r : eps) {
      if (r.level > *p + 1) puts[r.level] = put(trace, eps, config.condition.tau, r.level);
    }
  }

  json backbone = json::array();
  json trends = json::array();
  for (const auto& b : trace.backbone()) {
    json entry{{"level", b.level}, {"size", b.x}, {"alpha", b.alpha}};
    entry["anchor"] = optional_num(trace.anchor(b.level));
    backbone.push_back(entry);
    json t = to_json(*trace.trend(b.level));
    t["level"] = b.level;
    trends.push_back(t);
  }
  json epsilon = json::array();
  std::map<int, const EpsilonRecord*> eps_by_level;
  for (const auto& r : eps) {
    json j = to_json(r);
    const auto it = puts.find(r.level);
    j["put"] = it == puts.end() ? json(nullptr) : json(it->second);
    epsilon.push_back(j);
    eps_by_level[r.level] = &r;
  }

  AnalysisOutput out;
  out.converged = stop.has_value();
  out.report = {
      {"observations", observations.size()},
      {"strategy", config.strategy.to_string()},
      {"condition", {{"kind", condition_name(config.condition.kind)}, {"tau", config.condition.tau}}},
      {"params",
       {{"nu", config.params.nu}, {"slowdown", config.params.slowdown}, {"lambda", config.params.lambda}}},
      {"wlevel", optional_int(trace.wlevel())},
      {"plevel", optional_int(p)},
      {"backbone", backbone},
      {"trends", trends},
      {"skipped_levels", trace.skipped_levels()},
      {"anchor_events", trace.anchor_events()},
      {"epsilon", epsilon},
      {"clevel", optional_int(stop)},
      {"converged", out.converged}};

  std::ostringstream csv;
  csv << "level,size,alpha,anchor,epsilon,is_rupture,put\n";
  for (const auto& b : trace.backbone()) {
    csv << b.level << ',' << format_double(b.x) << ',' << format_double(b.alpha) << ',';
    if (auto a = trace.anchor(b.level)) csv << format_double(*a);
    csv << ',';
    const auto e = eps_by_level.find(b.level);
    if (e != eps_by_level.end()) {
      csv << format_double(e->second->epsilon) << ',' << (e->second->is_rupture ? 1 : 0);
    } else {
      csv << ',';
    }
    csv << ',';
    const auto pv = puts.find(b.level);
    if (pv != puts.end()) csv << format_double(pv->second);
    csv << '\n';
  }
  out.series_csv = csv.str();
  return out;
}

json tune(const Config& config, const ObservationLog& observations, const ObservationLog& horizon_log) {
  validate(config);
  const Horizon horizon = make_horizon(horizon_log, config.horizon_len, config.fit);
  Config plain_config = config;
  plain_config.strategy = AnchoringStrategy::none();
  const LearningTrace plain = LearningTrace::build(observations, trace_options(plain_config));
  const Baseline base = make_baseline(plain, config);
  const double beta = config.strategy.is_fixed() ? config.strategy.beta : 100.0;

  const TuningResult result = find_optimal_look_ahead(plain, beta, base.tau_a, *base.run.clevel);

  json candidates = json::array();
  for (const auto& c : result.candidates) {
    candidates.push_back({{"zeta", c.zeta},
                          {"look_ahead", optional_int(c.look_ahead)},
                          {"put", optional_num(c.put)},
                          {"clevel", optional_int(c.clevel)},
                          {"rc", optional_num(c.rc)}});
  }
  json selected = nullptr;
  if (result.selected) {
    const auto& c = result.candidates[*result.selected];
    const LearningTrace trace =
        plain.with_strategy(AnchoringStrategy::fixed_look_ahead(beta, *c.look_ahead));
    const Run run = make_run("tuned", trace, {ConditionKind::kAbsolute, base.tau_a}, base.tau_a);
    const Metrics m = metrics_for(run, base.run, &horizon, base.tau_a, config.error_target);
    selected = candidates[*result.selected];
    selected["strategy"] = AnchoringStrategy::fixed_look_ahead(beta, *c.look_ahead).to_string();
    selected["a_c"] = optional_num(m.a_c);
    selected["a_e"] = optional_num(m.a_e);
    selected["rp_c"] = optional_num(m.rp_c);
    selected["rp_e"] = optional_num(m.rp_e);
  }
  return {{"beta", beta},
          {"tau_a", base.tau_a},
          {"tau_r", optional_num(config.tau_r)},
          {"baseline_clevel", *base.run.clevel},
          {"plevel", optional_int(plain.plevel())},
          {"wlevel", optional_int(plain.wlevel())},
          {"alpha_dinfty", horizon.alpha_dinfty},
          {"candidates", candidates},
          {"selected", selected},
          {"converged", result.selected.has_value()}};
}

FrameOutput evaluate_frame(const json& frame, const std::string& base_dir) {
  json rows = json::array();
  try {
    const bool fixture = frame.value("fixture", false);
    const json frames = frame.contains("frames") ? frame.at("frames") : json::array({frame});
    for (const auto& f : frames) {
      if (fixture) {
        evaluate_fixture_frame(f, rows);
      } else {
        evaluate_live_frame(f, base_dir, rows);
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("frame definition: ") + e.what());
  }
  FrameOutput out;
  out.report = {{"rows", rows}};
  out.csv = rows_csv(rows);
  return out;
}

ObservationLog simulate(const json& spec_json, std::optional<std::uint64_t> seed_override) {
  GeneratorSpec spec = generator_spec_from_json(spec_json);
  if (seed_override) spec.seed = *seed_override;
  return generate(spec);
}

}  // namespace convergema
