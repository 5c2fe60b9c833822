#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "core/curve_model.hpp"
#include "core/trace_engine.hpp"

namespace convergema {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct IntersectionSet {
  std::optional<Point> first;
  std::optional<Point> last;
  int count = 0;  // 0, 1 or 2
};

/// Roots of c1 - c2 on [x_min, x_max]. Sign-change scan on a 2048-cell
/// geometric grid, with the difference's single critical point added as a
/// node so each monotone piece is bracketed, then bisection to 1e-12
/// relative. Throws kCoincidentCurves for identical or numerically
/// indistinguishable curves.
IntersectionSet intersect(const PowerLawCurve& c1, const PowerLawCurve& c2, double x_min,
                          double x_max);

struct EpsilonRecord {
  int level = 0;
  double epsilon = 0.0;
  std::optional<Point> q;  // absent when the pair had no usable intersection
  int intersections = 0;
  bool is_rupture = false;
};

struct EpsilonOptions {
  // Throw kNotDecreasing if a non-fixed strategy leaves an increasing
  // backbone past WLevel + 1.
  bool require_decreasing = true;
  double decreasing_tol = 1e-9;
};

/// One record per effective level i >= max(4, WLevel + 2), from the last
/// intersection of trend i with the previous fitted trend, scanned up to
/// 1e3 times the largest size seen at level i. Ruptures: intersection count
/// changed from the previous record, no intersection, coincident trends, or
/// an anchor event at i. Without a root or for coincident trends, epsilon is
/// carried over from the previous record. Empty when WLevel is unresolved.
std::vector<EpsilonRecord> epsilon_sequence(const LearningTrace& trace,
                                            const EpsilonOptions& options = {});

enum class ConditionKind { kAbsolute, kRelative };

struct ProximityCondition {
  ConditionKind kind = ConditionKind::kAbsolute;
  double tau = 0.5;
};

void validate(const ProximityCondition& condition);

/// Stop rule. Swappable so alternative relative conditions can be tried.
class ConvergenceRule {
 public:
  virtual ~ConvergenceRule() = default;
  virtual std::optional<int> stop_level(const LearningTrace& trace) const = 0;
};

/// First non-rupture epsilon <= tau.
class AbsoluteRule : public ConvergenceRule {
 public:
  explicit AbsoluteRule(double tau, EpsilonOptions options = {}) : tau_(tau), options_(options) {}
  std::optional<int> stop_level(const LearningTrace& trace) const override;

 private:
  double tau_;
  EpsilonOptions options_;
};

/// Smallest i > PLevel with |alpha_j - alpha_{j-1}| <= tau for every backbone
/// entry j in i .. i + lambda.
class RelativeRule : public ConvergenceRule {
 public:
  explicit RelativeRule(double tau) : tau_(tau) {}
  std::optional<int> stop_level(const LearningTrace& trace) const override;

 private:
  double tau_;
};

std::unique_ptr<ConvergenceRule> make_rule(const ProximityCondition& condition);

std::optional<int> clevel(const LearningTrace& trace, const ProximityCondition& condition);

/// Absolute threshold matching a relative one: epsilon at the first record at
/// or after the level where the relative condition stops. Throws
/// kUnresolvedCLevel when that level does not exist yet.
double normalize_threshold(const LearningTrace& trace, double tau_r);

/// Distance estimate used by put(): running minimum of non-rupture epsilon
/// up to `level` (ruptures count only before the first regular record).
std::optional<double> put_distance(const std::vector<EpsilonRecord>& eps, int level);

/// Percentage of uncovered threshold at `level` (> PLevel + 1), clamped to
/// [0, 100]. Throws kMissingPLevel or kInvalidArgument on precondition
/// failures.
double put(const LearningTrace& trace, double tau, int level);
double put(const LearningTrace& trace, const std::vector<EpsilonRecord>& eps, double tau,
           int level);

/// Smallest l > PLevel + 1 with put(l) <= zeta, minus PLevel. Throws
/// kNotReached when no level in the trace qualifies.
int minimal_look_ahead(const LearningTrace& trace, double tau, double zeta);

}  // namespace convergema
