#include "core/trace_engine.hpp"

#include <cmath>
#include <string>

#include "core/errors.hpp"

namespace convergema {

namespace {
constexpr double kAccuracyBound = 100.0;
}

void validate(const TraceParams& params) {
  if (!(params.nu > 0.0 && params.nu < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "nu must lie in (0, 1)");
  }
  if (params.slowdown < 1) throw Error(ErrorCode::kInvalidArgument, "slowdown must be >= 1");
  if (params.lambda < 0) throw Error(ErrorCode::kInvalidArgument, "lambda must be >= 0");
}

double verticality_threshold(double nu, int slowdown) {
  return std::pow(nu, 1.0 / slowdown) / (1.0 - nu);
}

double normalized_slope(double slope) {
  if (!(slope >= 0.0)) {
    throw Error(ErrorCode::kDomain, "normalized slope needs a non-negative slope");
  }
  return slope / (slope + 1.0);
}

std::optional<int> working_level(const std::vector<BackbonePoint>& backbone,
                                 const TraceParams& params) {
  validate(params);
  const double thr = verticality_threshold(params.nu, params.slowdown);
  const std::size_t n = backbone.size();
  const auto window = static_cast<std::size_t>(params.lambda);
  // bad[i]: slope from entry i to entry i+1 exceeds the threshold.
  std::size_t run = 0;  // consecutive good slopes ending at i
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dx = backbone[i + 1].x - backbone[i].x;
    const double slope = std::abs(backbone[i + 1].alpha - backbone[i].alpha) / dx;
    run = slope <= thr ? run + 1 : 0;
    if (run == window + 1) return backbone[i - window].level;
  }
  return std::nullopt;
}

std::optional<int> prediction_level(const std::vector<BackbonePoint>& backbone, int wlevel) {
  for (const auto& p : backbone) {
    if (p.level >= wlevel && p.alpha <= kAccuracyBound) return p.level;
  }
  return std::nullopt;
}

LearningTrace::LearningTrace(TraceOptions options) : options_(std::move(options)) {
  validate(options_.params);
  if (!(options_.anchor_weight > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "anchor weight must be positive");
  }
}

LearningTrace LearningTrace::build(const ObservationLog& log, TraceOptions options) {
  LearningTrace trace(std::move(options));
  for (const auto& obs : log.entries()) trace.extend(obs);
  return trace;
}

LearningTrace LearningTrace::with_strategy(const AnchoringStrategy& strategy) const {
  TraceOptions opts = options_;
  opts.strategy = strategy;
  LearningTrace out(opts);
  out.observations_ = observations_;
  out.reference_ = reference_;
  out.reference_skipped_ = reference_skipped_;
  out.wlevel_ = wlevel_;
  out.ref_plevel_ = ref_plevel_;
  if (out.wlevel_) out.fit_anchored_through(out.last_level());
  return out;
}

std::optional<int> LearningTrace::plevel() const noexcept {
  if (options_.plevel_source == PLevelSource::kAnchored &&
      options_.strategy.kind != AnchorKind::kNone) {
    return anchored_plevel_;
  }
  return ref_plevel_;
}

std::optional<double> LearningTrace::anchor(int level) const {
  const auto it = anchors_.find(level);
  if (it == anchors_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> LearningTrace::anchored_alpha(int level) const {
  const auto it = anchored_.find(level);
  if (it == anchored_.end()) return std::nullopt;
  return it->second.curve.c;
}

bool LearningTrace::anchored_at(int level) const {
  return options_.strategy.kind != AnchorKind::kNone && wlevel_ && level > *wlevel_;
}

const FitResult* LearningTrace::trend(int level) const {
  const auto& family = anchored_at(level) ? anchored_ : reference_;
  const auto it = family.find(level);
  return it == family.end() ? nullptr : &it->second;
}

std::vector<BackbonePoint> LearningTrace::reference_backbone() const {
  std::vector<BackbonePoint> out;
  out.reserve(reference_.size());
  for (const auto& [level, fr] : reference_) out.push_back({level, fr.curve.c, x_at(level)});
  return out;
}

std::vector<BackbonePoint> LearningTrace::backbone() const {
  std::vector<BackbonePoint> out;
  for (int level = 3; level <= last_level(); ++level) {
    if (const FitResult* t = trend(level)) out.push_back({level, t->curve.c, x_at(level)});
  }
  return out;
}

std::set<int> LearningTrace::skipped_levels() const {
  std::set<int> out;
  for (int level = 3; level <= last_level(); ++level) {
    if (!trend(level)) out.insert(level);
  }
  return out;
}

FitResult LearningTrace::fit_at(int level, std::optional<double> anchor) const {
  if (level < 3 || level > last_level()) {
    throw Error(ErrorCode::kInvalidArgument, "no observations for level " + std::to_string(level));
  }
  FitProblem problem;
  problem.points.reserve(static_cast<std::size_t>(level));
  for (int i = 0; i < level; ++i) {
    const auto& o = observations_[static_cast<std::size_t>(i)];
    problem.points.push_back({o.x, o.accuracy});
  }
  problem.anchor = anchor;
  problem.anchor_weight = options_.anchor_weight;
  return fit(problem, options_.fit);
}

std::optional<FitResult> LearningTrace::try_fit(int level, std::optional<double> anchor) const {
  try {
    FitResult r = fit_at(level, anchor);
    if (!r.converged) return std::nullopt;
    return r;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kDegenerateData || e.code() == ErrorCode::kFitDiverged) {
      return std::nullopt;
    }
    throw;
  }
}

void LearningTrace::fit_anchored_through(int level) {
  if (options_.strategy.kind == AnchorKind::kNone || !wlevel_) return;
  const int w = *wlevel_;
  for (int l = std::max(anchored_through_ + 1, w + 1); l <= level; ++l) {
    const std::optional<double> a = anchor_for_level(options_.strategy, l, *this);
    anchors_[l] = *a;
    if (l == w + 1) {
      anchor_events_.insert(l);
    } else if (options_.strategy.kind == AnchorKind::kFixedLookAhead) {
      const auto prev = anchors_.find(l - 1);
      if (prev != anchors_.end() && prev->second != *a) anchor_events_.insert(l);
    }
    if (auto r = try_fit(l, a)) {
      anchored_.emplace(l, std::move(*r));
    } else {
      anchored_skipped_.insert(l);
    }
    if (!anchored_plevel_) anchored_plevel_ = prediction_level(backbone(), w);
    anchored_through_ = l;
  }
}

void LearningTrace::extend(const Observation& obs) {
  const int expected = last_level() + 1;
  if (obs.level != expected) {
    throw Error(ErrorCode::kLevelGap, "expected level " + std::to_string(expected) + ", got " +
                                          std::to_string(obs.level));
  }
  if (!observations_.empty() && !(obs.x > observations_.back().x)) {
    throw Error(ErrorCode::kInvalidArgument,
                "sizes must be strictly increasing (level " + std::to_string(obs.level) + ")");
  }
  observations_.push_back(obs);
  const int level = obs.level;
  if (level < 3) return;

  try {
    if (auto r = try_fit(level, std::nullopt)) {
      reference_.emplace(level, std::move(*r));
    } else {
      reference_skipped_.insert(level);
    }
  } catch (...) {
    observations_.pop_back();
    throw;
  }

  if (!wlevel_) wlevel_ = working_level(reference_backbone(), options_.params);
  if (wlevel_ && !ref_plevel_) ref_plevel_ = prediction_level(reference_backbone(), *wlevel_);
  fit_anchored_through(level);
}

}  // namespace convergema
