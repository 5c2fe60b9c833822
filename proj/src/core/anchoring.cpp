#include "core/anchoring.hpp"

#include <charconv>
#include <cmath>

#include "core/errors.hpp"
#include "core/trace_engine.hpp"

namespace convergema {

namespace {

constexpr double kTol = 1e-9;

void check_beta(double beta) {
  if (!std::isfinite(beta) || beta < 100.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "fixed anchors need beta >= 100, got " + std::to_string(beta));
  }
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Asymptote of the last anchored trend at or below `level`.
std::optional<double> last_anchored_alpha(const LearningTrace& trace, int level) {
  const int w = *trace.wlevel();
  for (int l = level; l > w; --l) {
    if (auto a = trace.anchored_alpha(l)) return a;
  }
  return std::nullopt;
}

}  // namespace

AnchoringStrategy AnchoringStrategy::fixed(double beta) {
  check_beta(beta);
  return {AnchorKind::kFixed, beta, 0};
}

AnchoringStrategy AnchoringStrategy::fixed_look_ahead(double beta, int look_ahead) {
  check_beta(beta);
  if (look_ahead < 0) throw Error(ErrorCode::kInvalidArgument, "look-ahead must be >= 0");
  return {AnchorKind::kFixedLookAhead, beta, look_ahead};
}

std::string AnchoringStrategy::to_string() const {
  switch (kind) {
    case AnchorKind::kNone: return "none";
    case AnchorKind::kCanonical: return "canonical";
    case AnchorKind::kFixed: return "fixed:" + format_number(beta);
    case AnchorKind::kFixedLookAhead:
      return "fixed:" + format_number(beta) + "+" + std::to_string(look_ahead);
  }
  return "none";
}

AnchoringStrategy parse_strategy(std::string_view text) {
  if (text == "none") return AnchoringStrategy::none();
  if (text == "canonical") return AnchoringStrategy::canonical();
  constexpr std::string_view prefix = "fixed:";
  if (text.substr(0, prefix.size()) != prefix) {
    throw Error(ErrorCode::kParse, "unknown anchoring strategy '" + std::string(text) +
                                       "' (expected none, canonical, fixed:<beta> or "
                                       "fixed:<beta>+<lookahead>)");
  }
  std::string_view rest = text.substr(prefix.size());
  const auto plus = rest.find('+');
  const std::string_view beta_text = rest.substr(0, plus);

  double beta = 0.0;
  auto [p, ec] = std::from_chars(beta_text.data(), beta_text.data() + beta_text.size(), beta);
  if (ec != std::errc() || p != beta_text.data() + beta_text.size() || beta_text.empty()) {
    throw Error(ErrorCode::kParse, "bad beta in strategy '" + std::string(text) + "'");
  }
  if (plus == std::string_view::npos) return AnchoringStrategy::fixed(beta);

  const std::string_view la_text = rest.substr(plus + 1);
  int la = 0;
  auto [q, ec2] = std::from_chars(la_text.data(), la_text.data() + la_text.size(), la);
  if (ec2 != std::errc() || q != la_text.data() + la_text.size() || la_text.empty()) {
    throw Error(ErrorCode::kParse, "bad look-ahead in strategy '" + std::string(text) + "'");
  }
  return AnchoringStrategy::fixed_look_ahead(beta, la);
}

std::optional<double> anchor_for_level(const AnchoringStrategy& strategy, int level,
                                       const LearningTrace& trace) {
  if (strategy.kind == AnchorKind::kNone) return std::nullopt;
  const auto w = trace.wlevel();
  if (!w) {
    throw Error(ErrorCode::kMissingWLevel,
                "anchors need a resolved working level; the backbone is still too steep");
  }
  if (level <= *w) return std::nullopt;

  switch (strategy.kind) {
    case AnchorKind::kNone:
      return std::nullopt;
    case AnchorKind::kFixed:
      return strategy.beta;
    case AnchorKind::kCanonical: {
      if (level == *w + 1) return trace.reference_trends().at(*w).curve.c;
      if (auto prev = last_anchored_alpha(trace, level - 1)) return prev;
      return trace.reference_trends().at(*w).curve.c;
    }
    case AnchorKind::kFixedLookAhead: {
      const auto p = trace.plevel();
      if (!p) {
        if (level > trace.last_level() + 1) {
          throw Error(ErrorCode::kMissingPLevel,
                      "look-ahead anchoring past the trace end with no prediction level");
        }
        return strategy.beta;
      }
      const int freeze = std::max(*p + strategy.look_ahead, *w + 1);
      if (level <= freeze) return strategy.beta;
      if (auto frozen = last_anchored_alpha(trace, freeze)) return frozen;
      return strategy.beta;
    }
  }
  return std::nullopt;
}

SufficiencyReport verify_sufficiency(const LearningTrace& trace,
                                     const std::map<int, double>& anchors) {
  SufficiencyReport report;
  const auto p = trace.plevel();
  std::map<int, FitResult> fits;
  for (const auto& [level, anchor] : anchors) {
    const auto ref = trace.reference_trends().find(level);
    if (ref == trace.reference_trends().end()) continue;
    try {
      fits.emplace(level, trace.fit_at(level, anchor));
    } catch (const Error&) {
      continue;
    }
  }
  for (auto it = fits.begin(); it != fits.end(); ++it) {
    const int level = it->first;
    SufficiencyLevel row;
    row.level = level;
    row.anchor = anchors.at(level);
    row.reference_alpha = trace.reference_trends().at(level).curve.c;
    row.anchored_alpha = it->second.curve.c;
    row.gated = p && level > *p;
    row.bound_margin = row.anchor - row.reference_alpha;
    bool ok = !row.gated || row.bound_margin >= -kTol;

    auto next = std::next(it);
    if (next != fits.end() && next->first == level + 1) {
      const double rho_i = *it->second.residual_at_infinity;
      const double rho_n = *next->second.residual_at_infinity;
      row.step_margin = (row.anchor - anchors.at(level + 1)) - (rho_i - rho_n);
      ok = ok && *row.step_margin >= -kTol;
    }
    row.pass = ok;
    report.all_pass = report.all_pass && ok;
    report.levels.push_back(row);
  }
  return report;
}

}  // namespace convergema
