#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "core/convergence.hpp"
#include "core/evalframe.hpp"
#include "core/synth.hpp"
#include "core/trace_engine.hpp"

namespace convergema {

/// Everything a command needs. Defaults follow the reference experimental
/// setting: nu 2e-5, slowdown 1, lambda 5, kernel and step 5000, horizon 160.
struct Config {
  TraceParams params;
  // When set, observation sizes are checked against kernel/step.
  std::optional<std::int64_t> kernel;
  std::optional<std::int64_t> step;
  AnchoringStrategy strategy = AnchoringStrategy::fixed(100.0);
  ProximityCondition condition{ConditionKind::kAbsolute, 0.5};
  // Relative threshold for the unanchored baseline in tune/evaluate. When
  // set, the absolute threshold is normalized from it.
  std::optional<double> tau_r;
  std::size_t horizon_len = 160;
  FitConfig fit;
  double anchor_weight = 1.0;
  PLevelSource plevel_source = PLevelSource::kReference;
  ErrorTarget error_target = ErrorTarget::kRaw;
};

inline constexpr std::int64_t kDefaultKernel = 5000;
inline constexpr std::int64_t kDefaultStep = 5000;

/// Range checks on every field; throws kInvalidArgument.
void validate(const Config& config);

/// The scheme to check observations against, if kernel or step was given.
std::optional<LearningScheme> declared_scheme(const Config& config);

TraceOptions trace_options(const Config& config);

struct AnalysisOutput {
  nlohmann::json report;
  std::string series_csv;  // level,size,alpha,anchor,epsilon,is_rupture,put
  bool converged = false;
};

/// Streams the observations through a trace and applies the stop rule.
AnalysisOutput analyze(const Config& config, const ObservationLog& observations);

/// Look-ahead sweep against the unanchored baseline. "converged" in the
/// result is true when a candidate was selected.
nlohmann::json tune(const Config& config, const ObservationLog& observations,
                    const ObservationLog& horizon);

struct FrameOutput {
  nlohmann::json report;
  std::string csv;
};

/// Evaluates a frame definition. Relative paths inside it resolve against
/// base_dir. See README for the two accepted layouts (live and fixture).
FrameOutput evaluate_frame(const nlohmann::json& frame, const std::string& base_dir);

ObservationLog simulate(const nlohmann::json& spec, std::optional<std::uint64_t> seed_override);

}  // namespace convergema
