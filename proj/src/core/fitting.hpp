#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "core/curve_model.hpp"

namespace convergema {

struct DataPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Observations to fit, plus an optional anchor: a target value for the
/// curve at the point of infinity. Since the power-law limit is c, the anchor
/// enters the objective as the residual (anchor - c).
struct FitProblem {
  std::vector<DataPoint> points;
  std::optional<double> anchor;
  double anchor_weight = 1.0;
};

struct FitConfig {
  double rel_sse_tol = 1e-12;
  double step_tol = 1e-10;
  int max_iterations = 200;
};

struct FitResult {
  PowerLawCurve curve;
  std::vector<double> residuals;  // observed - fitted, one per point
  std::optional<double> residual_at_infinity;  // anchor - c
  double sse = 0.0;  // includes anchor_weight * residual_at_infinity^2
  bool converged = false;
  int iterations = 0;
};

/// Throws Error(kInvalidArgument) when the problem violates its invariants:
/// fewer than three points, non-finite values, x not strictly increasing and
/// positive, y outside (0, 100], or a non-positive anchor weight.
void validate(const FitProblem& problem);

/// Levenberg-Marquardt (trust-region) least squares over (log a, log b, c),
/// so every iterate is a valid pattern. Starts from the better of a fixed
/// heuristic guess and a variable-projection scan over b.
///
/// Non-convergence is reported through FitResult::converged, not thrown.
/// Throws Error(kDegenerateData) when every y is identical.
FitResult fit(const FitProblem& problem, const FitConfig& config = {});

/// Residuals, residual at infinity and SSE of an arbitrary curve against
/// the problem. Shared by fit() and the oracle so both report SSE the same way.
FitResult score(const FitProblem& problem, const PowerLawCurve& curve);

struct GridSpec {
  double log_a_min = -7.0;  // natural log bounds
  double log_a_max = 12.0;
  int a_steps = 48;
  double log_b_min = -4.6;
  double log_b_max = 1.4;
  int b_steps = 48;
  // c bounds default to the data range widened upward; NaN means derive.
  double c_min = std::numeric_limits<double>::quiet_NaN();
  double c_max = std::numeric_limits<double>::quiet_NaN();
  int c_steps = 48;
  int refine_sweeps = 20000;
};

/// Test oracle: exhaustive lattice search followed by coordinate descent
/// (closed-form in a and c, golden section in log b). Shares no code with
/// fit() beyond score().
FitResult oracle_fit(const FitProblem& problem, const GridSpec& grid = {});

}  // namespace convergema
