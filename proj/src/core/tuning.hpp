#pragma once

#include <optional>
#include <vector>

#include "core/trace_engine.hpp"

namespace convergema {

struct TuningCandidate {
  double zeta = 0.0;
  std::optional<int> look_ahead;  // absent when PUT never drops to zeta
  std::optional<double> put;      // PUT at PLevel + look_ahead
  std::optional<int> clevel;
  std::optional<double> rc;
};

struct TuningResult {
  std::vector<TuningCandidate> candidates;  // zeta = 100, 90, ..., 0
  std::optional<std::size_t> selected;
};

/// Index (into the inputs) of the turning point: the candidate followed by
/// the longest run of non-decreasing RC. Ties go to the smallest look-ahead,
/// then to the earlier candidate. Inputs are in sweep order.
std::optional<std::size_t> select_turning_point(const std::vector<double>& rc,
                                                const std::vector<int>& look_ahead);

/// Sweeps zeta from 100 down to 0 in steps of 10. Each candidate anchors
/// the reference observations with fixed:beta+lambda, lambda being the
/// minimal look-ahead for zeta on the fixed:beta trace, and stops under the
/// absolute condition tau. RC is its CLevel over baseline_clevel.
TuningResult find_optimal_look_ahead(const LearningTrace& reference, double beta, double tau,
                                     int baseline_clevel);

}  // namespace convergema
