#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace convergema {

class LearningTrace;

enum class AnchorKind { kNone, kCanonical, kFixed, kFixedLookAhead };

struct AnchoringStrategy {
  AnchorKind kind = AnchorKind::kNone;
  double beta = 100.0;  // fixed kinds only
  int look_ahead = 0;   // kFixedLookAhead only

  static AnchoringStrategy none() { return {}; }
  static AnchoringStrategy canonical() { return {AnchorKind::kCanonical, 100.0, 0}; }
  static AnchoringStrategy fixed(double beta);
  static AnchoringStrategy fixed_look_ahead(double beta, int look_ahead);

  bool is_fixed() const noexcept {
    return kind == AnchorKind::kFixed || kind == AnchorKind::kFixedLookAhead;
  }
  /// Inverse of parse_strategy.
  std::string to_string() const;

  friend bool operator==(const AnchoringStrategy&, const AnchoringStrategy&) = default;
};

/// "none" | "canonical" | "fixed:<beta>" | "fixed:<beta>+<lookahead>".
/// Throws kParse on malformed text and kInvalidArgument for beta < 100 or a
/// negative look-ahead.
AnchoringStrategy parse_strategy(std::string_view text);

/// The anchor the strategy places at `level` given what the trace knows.
/// Absent for levels <= WLevel and for the none strategy.
///
/// fixed_look_ahead keeps beta through level max(PLevel + l, WLevel + 1) and
/// then repeats the anchored asymptote of that level. While PLevel is still
/// unresolved, beta is used.
///
/// Throws kMissingWLevel when an anchoring strategy is asked before WLevel
/// resolved, and kMissingPLevel when a look-ahead anchor is requested past
/// the end of a trace whose PLevel never resolved.
std::optional<double> anchor_for_level(const AnchoringStrategy& strategy, int level,
                                       const LearningTrace& trace);

struct SufficiencyLevel {
  int level = 0;
  double anchor = 0.0;
  double reference_alpha = 0.0;
  double anchored_alpha = 0.0;
  bool gated = false;         // level > PLevel, so the bound check counts
  double bound_margin = 0.0;  // anchor - reference_alpha
  // (A_i - A_{i+1}) - (rho_i - rho_{i+1}); absent at the last anchored level.
  std::optional<double> step_margin;
  bool pass = true;
};

struct SufficiencyReport {
  std::vector<SufficiencyLevel> levels;
  bool all_pass = true;
};

/// Checks, per anchored level, that the anchor is never below the plain
/// asymptote (only enforced past PLevel) and that anchors fall at least as
/// fast as the residuals at infinity. Both within 1e-9.
SufficiencyReport verify_sufficiency(const LearningTrace& trace,
                                     const std::map<int, double>& anchors);

}  // namespace convergema
