#include "core/tuning.hpp"

#include <map>

#include "core/convergence.hpp"
#include "core/errors.hpp"

namespace convergema {

std::optional<std::size_t> select_turning_point(const std::vector<double>& rc,
                                                const std::vector<int>& look_ahead) {
  if (rc.empty()) return std::nullopt;
  // window[k]: how many steps after k keep RC non-decreasing.
  std::vector<std::size_t> window(rc.size(), 0);
  for (std::size_t k = rc.size() - 1; k-- > 0;) {
    window[k] = rc[k + 1] >= rc[k] ? window[k + 1] + 1 : 0;
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < rc.size(); ++k) {
    if (window[k] > window[best] ||
        (window[k] == window[best] && look_ahead[k] < look_ahead[best])) {
      best = k;
    }
  }
  return best;
}

TuningResult find_optimal_look_ahead(const LearningTrace& reference, double beta, double tau,
                                     int baseline_clevel) {
  if (baseline_clevel <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "baseline CLevel must be positive");
  }
  const LearningTrace fixed = reference.with_strategy(AnchoringStrategy::fixed(beta));
  const auto eps = epsilon_sequence(fixed);
  const ProximityCondition absolute{ConditionKind::kAbsolute, tau};

  TuningResult result;
  std::map<int, std::optional<int>> clevel_by_look_ahead;
  std::vector<double> rcs;
  std::vector<int> las;
  std::vector<std::size_t> index;
  for (int step = 10; step >= 0; --step) {
    TuningCandidate cand;
    cand.zeta = 10.0 * step;
    try {
      const int la = minimal_look_ahead(fixed, tau, cand.zeta);
      cand.look_ahead = la;
      cand.put = put(fixed, eps, tau, *fixed.plevel() + la);
      auto it = clevel_by_look_ahead.find(la);
      if (it == clevel_by_look_ahead.end()) {
        const LearningTrace run =
            reference.with_strategy(AnchoringStrategy::fixed_look_ahead(beta, la));
        it = clevel_by_look_ahead.emplace(la, clevel(run, absolute)).first;
      }
      cand.clevel = it->second;
      if (cand.clevel) {
        cand.rc = static_cast<double>(*cand.clevel) / baseline_clevel;
        rcs.push_back(*cand.rc);
        las.push_back(la);
        index.push_back(result.candidates.size());
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNotReached) throw;
    }
    result.candidates.push_back(cand);
  }
  if (auto k = select_turning_point(rcs, las)) result.selected = index[*k];
  return result;
}

}  // namespace convergema
