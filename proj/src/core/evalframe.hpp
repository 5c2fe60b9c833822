#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/convergence.hpp"
#include "core/fitting.hpp"
#include "core/scheme.hpp"

namespace convergema {

/// Long observation set standing in for the limit of the learning curve.
struct Horizon {
  std::vector<Observation> observations;
  FitResult limit_trend;
  double alpha_dinfty = 0.0;  // == limit_trend.curve.c
};

/// Fits the plain trend on the first `length` observations of `log`.
/// Throws kMissingHorizon when fewer than `length` (or 3) are available.
Horizon make_horizon(const ObservationLog& log, std::size_t length, const FitConfig& fit = {});

struct Run {
  std::string name;
  AnchoringStrategy strategy;
  ProximityCondition condition;
  std::optional<int> plevel;
  std::optional<int> clevel;
  std::optional<int> threshold_level;  // first epsilon <= tau on this run's trace
  std::optional<PowerLawCurve> stop_trend;  // effective trend at CLevel
};

/// Evaluates a run on a trace built with its strategy. `tau_a` sets the
/// threshold level used by accuracy().
Run make_run(std::string name, const LearningTrace& trace, const ProximityCondition& condition,
             double tau_a);

/// CLevel(run) / CLevel(baseline). Throws kUnresolvedCLevel.
double relative_cost(const Run& run, const Run& baseline);
double relative_cost(int clevel, int baseline_clevel);

enum class AccuracyMode { kConvergence, kError };
enum class ErrorTarget { kRaw, kFitted };

/// 0 if any divergence exceeds tau, else 100 * max divergence / tau.
/// Divergences are taken at the horizon sizes from the run's threshold level
/// on (its CLevel when the threshold level is unknown), plus the gap between
/// the asymptotes. Convergence mode compares against the limit trend; error
/// mode against the horizon observations (or the limit trend at finite sizes
/// with ErrorTarget::kFitted). Throws kUnresolvedCLevel.
double accuracy(const Run& run, const Horizon& horizon, double tau, AccuracyMode mode,
                ErrorTarget target = ErrorTarget::kRaw);

inline double relative_performance(double accuracy_value, double rc) {
  return accuracy_value / rc;
}

enum class Ordering { kFaster, kSlower, kEquivalent, kIncomparable };

/// Compares paired runs by CLevel: kFaster when every a <= b (and some <),
/// kEquivalent when all equal, kIncomparable when mixed. Sizes must match.
Ordering faster_than(const std::vector<int>& clevels_a, const std::vector<int>& clevels_b);

/// Two-decimal rounding, half to even, applied to the value first fixed at
/// six decimals.
double round_table(double value);

}  // namespace convergema
