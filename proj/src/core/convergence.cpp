#include "core/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/errors.hpp"

namespace convergema {

namespace {

constexpr int kCells = 2048;
constexpr double kCoincidentGap = 1e-12;
constexpr double kRootRelTol = 1e-12;

// c1 - c2 at x = exp(log_x).
double gap(const PowerLawCurve& c1, const PowerLawCurve& c2, double log_x) {
  return (-c1.a * std::exp(-c1.b * log_x) + c1.c) - (-c2.a * std::exp(-c2.b * log_x) + c2.c);
}

double bisect(const PowerLawCurve& c1, const PowerLawCurve& c2, double lo, double hi) {
  double g_lo = gap(c1, c2, std::log(lo));
  while ((hi - lo) > kRootRelTol * lo) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double g_mid = gap(c1, c2, std::log(mid));
    if (g_mid == 0.0) return mid;
    if ((g_mid < 0.0) == (g_lo < 0.0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

IntersectionSet intersect(const PowerLawCurve& c1, const PowerLawCurve& c2, double x_min,
                          double x_max) {
  if (!(x_min > 0.0) || !(x_max > x_min) || !std::isfinite(x_max)) {
    throw Error(ErrorCode::kInvalidArgument, "intersection range must satisfy 0 < x_min < x_max");
  }
  if (c1 == c2) throw Error(ErrorCode::kCoincidentCurves, "curves are identical");

  const double l0 = std::log(x_min);
  const double l1 = std::log(x_max);
  std::vector<double> nodes;
  nodes.reserve(kCells + 2);
  for (int k = 0; k <= kCells; ++k) nodes.push_back(l0 + (l1 - l0) * k / kCells);
  nodes.back() = l1;
  // d/dx (c1 - c2) vanishes once, where x^(b2 - b1) = a2 b2 / (a1 b1).
  if (c1.b != c2.b) {
    const double ratio = (c2.a * c2.b) / (c1.a * c1.b);
    if (ratio > 0.0 && std::isfinite(ratio)) {
      const double lc = std::log(ratio) / (c2.b - c1.b);
      if (lc > l0 && lc < l1) nodes.insert(std::upper_bound(nodes.begin(), nodes.end(), lc), lc);
    }
  }

  std::vector<double> g(nodes.size());
  double max_gap = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    g[k] = gap(c1, c2, nodes[k]);
    max_gap = std::max(max_gap, std::abs(g[k]));
  }
  if (max_gap < kCoincidentGap) {
    throw Error(ErrorCode::kCoincidentCurves, "curves agree to 1e-12 over the whole range");
  }

  std::vector<double> roots;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (g[k] == 0.0) {
      roots.push_back(k + 1 == nodes.size() ? x_max : (k == 0 ? x_min : std::exp(nodes[k])));
      continue;
    }
    if (k + 1 < nodes.size() && g[k + 1] != 0.0 && (g[k] < 0.0) != (g[k + 1] < 0.0)) {
      const double lo = k == 0 ? x_min : std::exp(nodes[k]);
      const double hi = k + 2 == nodes.size() ? x_max : std::exp(nodes[k + 1]);
      roots.push_back(bisect(c1, c2, lo, hi));
    }
  }
  if (roots.size() > 2) {
    throw Error(ErrorCode::kCoincidentCurves,
                "more than two sign changes; the curves are numerically coincident");
  }

  IntersectionSet out;
  out.count = static_cast<int>(roots.size());
  if (!roots.empty()) {
    out.first = Point{roots.front(), evaluate(c1, roots.front())};
    out.last = Point{roots.back(), evaluate(c1, roots.back())};
  }
  return out;
}

std::vector<EpsilonRecord> epsilon_sequence(const LearningTrace& trace,
                                            const EpsilonOptions& options) {
  std::vector<EpsilonRecord> out;
  const auto w = trace.wlevel();
  if (!w) return out;
  const auto bb = trace.backbone();

  if (options.require_decreasing && !trace.options().strategy.is_fixed()) {
    for (std::size_t k = 1; k < bb.size(); ++k) {
      if (bb[k].level <= *w + 1) continue;
      if (bb[k].alpha > bb[k - 1].alpha + options.decreasing_tol) {
        throw Error(ErrorCode::kNotDecreasing,
                    "asymptotic backbone increases at level " + std::to_string(bb[k].level) +
                        "; absolute thresholds need a decreasing backbone "
                        "(use fixed anchoring for absolute thresholds)");
      }
    }
  }

  const int start = std::max(4, *w + 2);
  const double x_min = trace.x_at(1);
  for (std::size_t k = 1; k < bb.size(); ++k) {
    const int level = bb[k].level;
    if (level < start) continue;
    const FitResult* cur = trace.trend(level);
    const FitResult* prev = trace.trend(bb[k - 1].level);

    EpsilonRecord rec;
    rec.level = level;
    bool usable = false;
    try {
      const IntersectionSet s = intersect(cur->curve, prev->curve, x_min, 1e3 * trace.x_at(level));
      rec.intersections = s.count;
      if (s.last) {
        rec.q = s.last;
        rec.epsilon = std::abs(s.last->y - cur->curve.c);
        usable = true;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kCoincidentCurves) throw;
      rec.intersections = 0;
    }
    if (!usable) {
      rec.epsilon = out.empty() ? std::abs(cur->curve.c - prev->curve.c) : out.back().epsilon;
      rec.is_rupture = true;
    }
    if (!out.empty() && out.back().intersections != rec.intersections) rec.is_rupture = true;
    if (trace.anchor_events().count(level)) rec.is_rupture = true;
    out.push_back(rec);
  }
  return out;
}

void validate(const ProximityCondition& condition) {
  if (!(condition.tau > 0.0) || !std::isfinite(condition.tau)) {
    throw Error(ErrorCode::kInvalidArgument, "tau must be positive");
  }
}

std::optional<int> AbsoluteRule::stop_level(const LearningTrace& trace) const {
  for (const auto& r : epsilon_sequence(trace, options_)) {
    if (!r.is_rupture && r.epsilon <= tau_) return r.level;
  }
  return std::nullopt;
}

std::optional<int> RelativeRule::stop_level(const LearningTrace& trace) const {
  const auto p = trace.plevel();
  if (!p) return std::nullopt;
  const auto bb = trace.backbone();
  const auto lambda = static_cast<std::size_t>(trace.options().params.lambda);
  for (std::size_t k = 1; k + lambda < bb.size(); ++k) {
    if (bb[k].level <= *p) continue;
    bool ok = true;
    for (std::size_t j = k; j <= k + lambda && ok; ++j) {
      ok = std::abs(bb[j].alpha - bb[j - 1].alpha) <= tau_;
    }
    if (ok) return bb[k].level;
  }
  return std::nullopt;
}

std::unique_ptr<ConvergenceRule> make_rule(const ProximityCondition& condition) {
  validate(condition);
  if (condition.kind == ConditionKind::kRelative) {
    return std::make_unique<RelativeRule>(condition.tau);
  }
  return std::make_unique<AbsoluteRule>(condition.tau);
}

std::optional<int> clevel(const LearningTrace& trace, const ProximityCondition& condition) {
  return make_rule(condition)->stop_level(trace);
}

double normalize_threshold(const LearningTrace& trace, double tau_r) {
  validate(ProximityCondition{ConditionKind::kRelative, tau_r});
  const auto stop = RelativeRule(tau_r).stop_level(trace);
  if (!stop) {
    throw Error(ErrorCode::kUnresolvedCLevel,
                "the relative condition has not converged; no threshold to normalize");
  }
  EpsilonOptions opts;
  opts.require_decreasing = false;
  for (const auto& r : epsilon_sequence(trace, opts)) {
    if (r.level >= *stop) return r.epsilon;
  }
  throw Error(ErrorCode::kUnresolvedCLevel,
              "no epsilon record at or after level " + std::to_string(*stop));
}

std::optional<double> put_distance(const std::vector<EpsilonRecord>& eps, int level) {
  std::optional<double> d;
  bool regular_seen = false;
  for (const auto& r : eps) {
    if (r.level > level) break;
    if (r.is_rupture && regular_seen) continue;
    regular_seen = regular_seen || !r.is_rupture;
    d = d ? std::min(*d, r.epsilon) : r.epsilon;
  }
  return d;
}

double put(const LearningTrace& trace, const std::vector<EpsilonRecord>& eps, double tau,
           int level) {
  const auto p = trace.plevel();
  if (!p) throw Error(ErrorCode::kMissingPLevel, "PUT needs a resolved prediction level");
  if (level <= *p + 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "PUT is defined for levels above PLevel + 1 = " + std::to_string(*p + 1));
  }
  const auto d = put_distance(eps, level);
  // If PLevel + 2 itself has no record (skipped fit), start from the first one.
  const auto d0 = put_distance(eps, eps.empty() ? *p + 2 : std::max(*p + 2, eps.front().level));
  if (!d || !d0) {
    throw Error(ErrorCode::kInvalidArgument,
                "no epsilon records up to level " + std::to_string(level));
  }
  const double num = *d - tau;
  if (num <= 0.0) return 0.0;
  const double den = *d0 - tau;
  if (den <= 0.0) return 100.0;
  return std::clamp(100.0 * num / den, 0.0, 100.0);
}

double put(const LearningTrace& trace, double tau, int level) {
  return put(trace, epsilon_sequence(trace), tau, level);
}

int minimal_look_ahead(const LearningTrace& trace, double tau, double zeta) {
  const auto p = trace.plevel();
  if (!p) throw Error(ErrorCode::kMissingPLevel, "look-ahead needs a resolved prediction level");
  const auto eps = epsilon_sequence(trace);
  for (int level = *p + 2; level <= trace.last_level(); ++level) {
    if (!put_distance(eps, level)) continue;
    if (put(trace, eps, tau, level) <= zeta) return level - *p;
  }
  throw Error(ErrorCode::kNotReached,
              "no level in the trace brings PUT down to " + std::to_string(zeta));
}

}  // namespace convergema
