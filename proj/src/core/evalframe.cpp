#include "core/evalframe.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace convergema {

Horizon make_horizon(const ObservationLog& log, std::size_t length, const FitConfig& fit_config) {
  if (length < 3 || log.size() < length) {
    throw Error(ErrorCode::kMissingHorizon,
                "horizon needs " + std::to_string(length) + " observations, found " +
                    std::to_string(log.size()));
  }
  Horizon h;
  h.observations.assign(log.entries().begin(),
                        log.entries().begin() + static_cast<std::ptrdiff_t>(length));
  FitProblem problem;
  for (const auto& o : h.observations) problem.points.push_back({o.x, o.accuracy});
  h.limit_trend = fit(problem, fit_config);
  h.alpha_dinfty = h.limit_trend.curve.c;
  return h;
}

Run make_run(std::string name, const LearningTrace& trace, const ProximityCondition& condition,
             double tau_a) {
  Run run;
  run.name = std::move(name);
  run.strategy = trace.options().strategy;
  run.condition = condition;
  run.plevel = trace.plevel();
  run.clevel = clevel(trace, condition);
  EpsilonOptions lenient;
  lenient.require_decreasing = false;
  run.threshold_level = AbsoluteRule(tau_a, lenient).stop_level(trace);
  if (run.clevel) {
    if (const FitResult* t = trace.trend(*run.clevel)) run.stop_trend = t->curve;
  }
  return run;
}

double relative_cost(int clevel, int baseline_clevel) {
  if (clevel <= 0 || baseline_clevel <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "CLevels must be positive");
  }
  return static_cast<double>(clevel) / baseline_clevel;
}

double relative_cost(const Run& run, const Run& baseline) {
  if (!run.clevel || !baseline.clevel) {
    throw Error(ErrorCode::kUnresolvedCLevel,
                "relative cost needs resolved CLevels for '" + run.name + "' and '" +
                    baseline.name + "'");
  }
  return relative_cost(*run.clevel, *baseline.clevel);
}

double accuracy(const Run& run, const Horizon& horizon, double tau, AccuracyMode mode,
                ErrorTarget target) {
  if (!run.clevel || !run.stop_trend) {
    throw Error(ErrorCode::kUnresolvedCLevel, "accuracy needs the run's CLevel trend");
  }
  if (!(tau > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tau must be positive");
  if (horizon.observations.empty()) throw Error(ErrorCode::kMissingHorizon, "empty horizon");

  const int iota = run.threshold_level.value_or(*run.clevel);
  double worst = std::abs(horizon.alpha_dinfty - run.stop_trend->c);
  for (const auto& o : horizon.observations) {
    if (o.level < iota) continue;
    const bool raw = mode == AccuracyMode::kError && target == ErrorTarget::kRaw;
    const double want = raw ? o.accuracy : evaluate(horizon.limit_trend.curve, o.x);
    worst = std::max(worst, std::abs(want - evaluate(*run.stop_trend, o.x)));
  }
  if (worst > tau) return 0.0;
  return 100.0 * worst / tau;
}

Ordering faster_than(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kInvalidArgument, "faster_than needs paired runs");
  }
  bool a_le = true;
  bool b_le = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    a_le = a_le && a[i] <= b[i];
    b_le = b_le && b[i] <= a[i];
  }
  if (a_le && b_le) return Ordering::kEquivalent;
  if (a_le) return Ordering::kFaster;
  if (b_le) return Ordering::kSlower;
  return Ordering::kIncomparable;
}

double round_table(double value) {
  const long long micro = std::llround(value * 1e6);
  const long long sign = micro < 0 ? -1 : 1;
  const long long m = micro * sign;
  long long q = m / 10000;
  const long long rem = m % 10000;
  if (rem > 5000 || (rem == 5000 && (q % 2) == 1)) ++q;
  return static_cast<double>(sign * q) / 100.0;
}

}  // namespace convergema
