// convergema: command-line front end over the C API.
//
//   convergema analyze  obs.csv [--strategy fixed:100] [--tau 0.5] [--out r.json]
//   convergema tune     obs.csv --horizon h.csv [--tau-r 0.05]
//   convergema evaluate frame.json [--out r.json] [--csv table.csv]
//   convergema simulate spec.json [--seed N] [--out obs.csv]
//
// Exit status: 0 converged (or success), 2 not converged yet, 1 error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "convergema/convergema.h"

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

struct Options {
  std::string strategy = "fixed:100";
  std::string condition = "absolute";
  double tau = 0.5;
  std::optional<double> tau_r;
  double nu = 2e-5;
  int slowdown = 1;
  int lambda = 5;
  std::optional<long long> kernel;
  std::optional<long long> step;
  std::string horizon;
  int horizon_len = 160;
  std::optional<double> fit_tol;
  std::optional<int> fit_max_iter;
  double anchor_weight = 1.0;
  std::string plevel_source = "reference";
  std::string error_target = "raw";
  std::string out;
  std::string series;
  std::string csv;
  std::optional<unsigned long long> seed;
  std::string input;
};

class Failure : public std::runtime_error {
 public:
  Failure(cvg_status status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  cvg_status status() const { return status_; }

 private:
  cvg_status status_;
};

void check(cvg_status s) {
  if (s != CVG_OK) {
    throw Failure(s, std::string(cvg_status_string(s)) + ": " + cvg_last_error());
  }
}

struct ConfigHandle {
  cvg_config* p = cvg_config_create();
  ~ConfigHandle() { cvg_config_destroy(p); }
};

struct ObsHandle {
  cvg_obs* p = nullptr;
  ObsHandle() : p(cvg_obs_create()) {}
  explicit ObsHandle(cvg_obs* raw) : p(raw) {}
  ~ObsHandle() { cvg_obs_destroy(p); }
};

struct CString {
  char* p = nullptr;
  ~CString() { cvg_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

void apply(const Options& o, cvg_config* cfg) {
  check(cvg_config_set_strategy(cfg, o.strategy.c_str()));
  check(cvg_config_set_condition(cfg, o.condition.c_str()));
  check(cvg_config_set_tau(cfg, o.tau));
  if (o.tau_r) check(cvg_config_set_tau_r(cfg, *o.tau_r));
  check(cvg_config_set_nu(cfg, o.nu));
  check(cvg_config_set_slowdown(cfg, o.slowdown));
  check(cvg_config_set_lambda(cfg, o.lambda));
  if (o.kernel) check(cvg_config_set_kernel(cfg, *o.kernel));
  if (o.step) check(cvg_config_set_step(cfg, *o.step));
  check(cvg_config_set_horizon_len(cfg, o.horizon_len));
  if (o.fit_tol) check(cvg_config_set_fit_tol(cfg, *o.fit_tol));
  if (o.fit_max_iter) check(cvg_config_set_fit_max_iter(cfg, *o.fit_max_iter));
  check(cvg_config_set_anchor_weight(cfg, o.anchor_weight));
  check(cvg_config_set_plevel_source(cfg, o.plevel_source.c_str()));
  check(cvg_config_set_error_target(cfg, o.error_target.c_str()));
  check(cvg_config_validate(cfg));
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Failure(CVG_IO, "cannot write '" + path + "'");
  f << text;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Failure(CVG_IO, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string show(const nlohmann::json& v) {
  if (v.is_null()) return "-";
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v.get<double>());
    return buf;
  }
  return v.dump();
}

int run_analyze(const Options& o) {
  ConfigHandle cfg;
  apply(o, cfg.p);
  ObsHandle obs;
  check(cvg_obs_load_csv(obs.p, o.input.c_str(), cfg.p));

  CString report, series;
  int converged = 0;
  check(cvg_analyze(cfg.p, obs.p, &report.p, &series.p, &converged));
  const auto j = nlohmann::json::parse(report.str());

  std::cout << "observations " << j["observations"] << "  strategy " << o.strategy
            << "  condition " << o.condition << " tau " << o.tau << "\n";
  std::cout << "WLevel " << show(j["wlevel"]) << "  PLevel " << show(j["plevel"]) << "\n";
  std::cout << "level  alpha          anchor      epsilon     put\n";
  std::map<int, nlohmann::json> eps;
  for (const auto& e : j["epsilon"]) eps[e["level"].get<int>()] = e;
  for (const auto& b : j["backbone"]) {
    const int level = b["level"].get<int>();
    char line[160];
    std::snprintf(line, sizeof line, "%5d  %-13s  %-10s", level, show(b["alpha"]).c_str(),
                  show(b["anchor"]).c_str());
    std::cout << line;
    if (auto it = eps.find(level); it != eps.end()) {
      std::cout << "  " << show(it->second["epsilon"]) << (it->second["rupture"].get<bool>() ? "*" : " ")
                << "  " << show(it->second["put"]);
    }
    std::cout << "\n";
  }
  if (converged) {
    std::cout << "CLevel " << j["clevel"] << ": converged, stop training\n";
  } else {
    std::cout << "not converged yet, keep training\n";
  }
  if (!o.out.empty()) write_file(o.out, report.str() + "\n");
  if (!o.series.empty()) write_file(o.series, series.str());
  return converged ? kExitConverged : kExitNotConverged;
}

int run_tune(const Options& o) {
  if (o.horizon.empty()) {
    throw Failure(CVG_MISSING_HORIZON, "MissingHorizon: tune needs --horizon <csv>");
  }
  ConfigHandle cfg;
  apply(o, cfg.p);
  ObsHandle obs, horizon;
  check(cvg_obs_load_csv(obs.p, o.input.c_str(), cfg.p));
  check(cvg_obs_load_csv(horizon.p, o.horizon.c_str(), cfg.p));

  CString report;
  int selected = 0;
  check(cvg_tune(cfg.p, obs.p, horizon.p, &report.p, &selected));
  const auto j = nlohmann::json::parse(report.str());
  std::cout << "baseline CLevel " << j["baseline_clevel"] << "  tau_a " << show(j["tau_a"])
            << "  PLevel " << show(j["plevel"]) << "\n";
  std::cout << " zeta  look-ahead  put        clevel  rc\n";
  for (const auto& c : j["candidates"]) {
    char line[160];
    std::snprintf(line, sizeof line, "%5.0f  %-10s  %-9s  %-6s  %s", c["zeta"].get<double>(),
                  show(c["look_ahead"]).c_str(), show(c["put"]).c_str(),
                  show(c["clevel"]).c_str(), show(c["rc"]).c_str());
    std::cout << line << "\n";
  }
  if (selected) {
    const auto& s = j["selected"];
    std::cout << "selected " << s["strategy"].get<std::string>() << " (zeta " << show(s["zeta"])
              << ", PUT " << show(s["put"]) << ", RC " << show(s["rc"]) << ")\n";
  } else {
    std::cout << "no candidate converged\n";
  }
  if (!o.out.empty()) write_file(o.out, report.str() + "\n");
  return selected ? kExitConverged : kExitNotConverged;
}

int run_evaluate(const Options& o) {
  const std::string text = read_file(o.input);
  const std::string base = std::filesystem::path(o.input).parent_path().string();
  CString report, table;
  check(cvg_evaluate_frame(text.c_str(), base.c_str(), &report.p, &table.p));
  std::cout << table.str();
  if (!o.out.empty()) write_file(o.out, report.str() + "\n");
  if (!o.csv.empty()) write_file(o.csv, table.str());
  return kExitConverged;
}

int run_simulate(const Options& o) {
  const std::string text = read_file(o.input);
  std::optional<unsigned long long> seed = o.seed;
  if (const char* env = std::getenv("CONVERGEMA_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      seed = std::stoull(env, &used);
      if (env[used] != '\0') throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw Failure(CVG_INVALID_ARGUMENT,
                    std::string("InvalidArgument: CONVERGEMA_SEED is not an integer: ") + env);
    }
  }
  cvg_obs* raw = nullptr;
  check(cvg_simulate(text.c_str(), seed.value_or(0), seed ? 1 : 0, &raw));
  ObsHandle obs(raw);
  CString csv;
  check(cvg_obs_to_csv(obs.p, &csv.p));
  if (o.out.empty()) {
    std::cout << csv.str();
  } else {
    write_file(o.out, csv.str());
  }
  return kExitConverged;
}

void add_trace_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--strategy", o.strategy,
                  "none | canonical | fixed:<beta> | fixed:<beta>+<lookahead>")
      ->capture_default_str();
  cmd->add_option("--condition", o.condition, "absolute | relative")
      ->check(CLI::IsMember({"absolute", "relative"}))
      ->capture_default_str();
  cmd->add_option("--tau", o.tau, "proximity threshold")->capture_default_str();
  cmd->add_option("--tau-r", o.tau_r, "relative threshold of the unanchored baseline");
  cmd->add_option("--nu", o.nu, "verticality threshold")->capture_default_str();
  cmd->add_option("--slowdown", o.slowdown)->capture_default_str();
  cmd->add_option("--lambda", o.lambda, "flat window for WLevel")->capture_default_str();
  cmd->add_option("--kernel", o.kernel, "check sizes against this kernel (default 5000)");
  cmd->add_option("--step", o.step, "check sizes against this uniform step (default 5000)");
  cmd->add_option("--fit-tol", o.fit_tol, "relative SSE improvement tolerance");
  cmd->add_option("--fit-max-iter", o.fit_max_iter, "fit iteration cap");
  cmd->add_option("--anchor-weight", o.anchor_weight)->capture_default_str();
  cmd->add_option("--plevel-source", o.plevel_source, "reference | anchored")
      ->check(CLI::IsMember({"reference", "anchored"}))
      ->capture_default_str();
  cmd->add_option("--error-target", o.error_target, "raw | fitted")
      ->check(CLI::IsMember({"raw", "fitted"}))
      ->capture_default_str();
  cmd->add_option("--out", o.out, "write the JSON report here");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convergence thresholds for incrementally trained learners"};
  app.require_subcommand(1);
  Options o;

  auto* analyze = app.add_subcommand("analyze", "fit the trace and decide whether to stop");
  analyze->add_option("observations", o.input, "CSV with header level,size,accuracy")
      ->required();
  add_trace_flags(analyze, o);
  analyze->add_option("--series", o.series, "write plot series CSV here");

  auto* tune = app.add_subcommand("tune", "sweep look-aheads by PUT and pick the turning point");
  tune->add_option("observations", o.input)->required();
  add_trace_flags(tune, o);
  tune->add_option("--horizon", o.horizon, "horizon observations CSV");
  tune->add_option("--horizon-len", o.horizon_len, "horizon length")->capture_default_str();

  auto* evaluate = app.add_subcommand("evaluate", "compute RC / A / RP tables for a frame");
  evaluate->add_option("frame", o.input, "frame definition JSON")->required();
  evaluate->add_option("--out", o.out, "write the JSON report here");
  evaluate->add_option("--csv", o.csv, "write the table CSV here");

  auto* simulate = app.add_subcommand("simulate", "generate synthetic observations");
  simulate->add_option("spec", o.input, "generator spec JSON")->required();
  simulate->add_option("--seed", o.seed, "override the spec seed");
  simulate->add_option("--out", o.out, "write CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*analyze) return run_analyze(o);
    if (*tune) return run_tune(o);
    if (*evaluate) return run_evaluate(o);
    if (*simulate) return run_simulate(o);
  } catch (const Failure& f) {
    std::cerr << "convergema: " << f.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "convergema: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
