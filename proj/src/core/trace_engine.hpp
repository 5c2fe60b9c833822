#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "core/anchoring.hpp"
#include "core/fitting.hpp"
#include "core/scheme.hpp"

namespace convergema {

struct TraceParams {
  double nu = 2e-5;  // verticality threshold
  int slowdown = 1;
  int lambda = 5;  // window of levels that must stay flat
};

/// Throws kInvalidArgument unless 0 < nu < 1, slowdown >= 1, lambda >= 0.
void validate(const TraceParams& params);

/// Largest admissible |d alpha| / d x, i.e. nu^(1/slowdown) / (1 - nu).
double verticality_threshold(double nu, int slowdown);

/// s / (s + 1). Maps [0, inf) onto [0, 1); N(s) < nu  <=>  s < nu / (1 - nu).
double normalized_slope(double slope);

struct BackbonePoint {
  int level = 0;
  double alpha = 0.0;
  double x = 0.0;
};

/// Smallest level whose slopes to the next lambda+1 backbone entries all
/// stay within the verticality threshold. Gaps are bridged: slopes are taken
/// between consecutive entries of `backbone`, whatever their levels.
std::optional<int> working_level(const std::vector<BackbonePoint>& backbone,
                                 const TraceParams& params);

/// Smallest level >= wlevel whose asymptote is <= 100.
std::optional<int> prediction_level(const std::vector<BackbonePoint>& backbone, int wlevel);

enum class PLevelSource { kReference, kAnchored };

struct TraceOptions {
  TraceParams params;
  AnchoringStrategy strategy;
  FitConfig fit;
  double anchor_weight = 1.0;
  PLevelSource plevel_source = PLevelSource::kReference;
};

/// Trends per level, fitted incrementally.
///
/// Two families are kept: the reference (plain, unanchored) trends, which
/// decide WLevel, and the anchored trends the strategy produces for levels
/// past WLevel. The effective trace is reference up to WLevel and anchored
/// after it. Once WLevel resolves, anchored fits for the levels already seen
/// are computed on the spot, so incremental extension and a rebuild from
/// scratch agree. WLevel and PLevel never move once found.
class LearningTrace {
 public:
  explicit LearningTrace(TraceOptions options);

  static LearningTrace build(const ObservationLog& log, TraceOptions options);

  /// Throws kLevelGap unless obs.level is last_level() + 1.
  void extend(const Observation& obs);

  /// Same observations and reference fits under another strategy.
  LearningTrace with_strategy(const AnchoringStrategy& strategy) const;

  const TraceOptions& options() const noexcept { return options_; }
  const std::vector<Observation>& observations() const noexcept { return observations_; }
  int last_level() const noexcept { return static_cast<int>(observations_.size()); }
  double x_at(int level) const { return observations_.at(static_cast<std::size_t>(level - 1)).x; }

  std::optional<int> wlevel() const noexcept { return wlevel_; }
  std::optional<int> plevel() const noexcept;
  std::optional<int> reference_plevel() const noexcept { return ref_plevel_; }

  const std::map<int, FitResult>& reference_trends() const noexcept { return reference_; }
  const std::map<int, FitResult>& anchored_trends() const noexcept { return anchored_; }
  const std::map<int, double>& anchors() const noexcept { return anchors_; }
  std::optional<double> anchor(int level) const;
  std::optional<double> anchored_alpha(int level) const;

  /// Effective trend at a level, or nullptr when that level was skipped.
  const FitResult* trend(int level) const;
  bool anchored_at(int level) const;

  std::vector<BackbonePoint> backbone() const;
  std::vector<BackbonePoint> reference_backbone() const;

  /// Effective levels >= 3 without a trend (fit failed or did not converge).
  std::set<int> skipped_levels() const;

  /// Levels where an anchor was introduced or switched to a different rule.
  const std::set<int>& anchor_events() const noexcept { return anchor_events_; }

  /// Fit the first `level` observations with an optional anchor using this
  /// trace's fit settings. Throws like fit().
  FitResult fit_at(int level, std::optional<double> anchor) const;

 private:
  std::optional<FitResult> try_fit(int level, std::optional<double> anchor) const;
  void fit_anchored_through(int level);

  TraceOptions options_;
  std::vector<Observation> observations_;
  std::map<int, FitResult> reference_;
  std::set<int> reference_skipped_;
  std::map<int, FitResult> anchored_;
  std::set<int> anchored_skipped_;
  std::map<int, double> anchors_;
  std::set<int> anchor_events_;
  std::optional<int> wlevel_;
  std::optional<int> ref_plevel_;
  std::optional<int> anchored_plevel_;
  int anchored_through_ = 0;
};

}  // namespace convergema
