#include "core/scheme.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace convergema {

LearningScheme::LearningScheme(std::int64_t kernel_size, StepFn step, std::string description)
    : kernel_(kernel_size), step_(std::move(step)), description_(std::move(description)) {
  if (kernel_ <= 0) throw Error(ErrorCode::kInvalidArgument, "kernel size must be positive");
  if (!step_) throw Error(ErrorCode::kInvalidArgument, "step function is empty");
}

LearningScheme LearningScheme::uniform(std::int64_t kernel_size, std::int64_t step) {
  if (step <= 0) throw Error(ErrorCode::kInvalidArgument, "step must be positive");
  return LearningScheme(
      kernel_size, [step](int) { return step; },
      "kernel " + std::to_string(kernel_size) + ", uniform step " + std::to_string(step));
}

std::int64_t LearningScheme::position(int level) const {
  if (level < 1) throw Error(ErrorCode::kInvalidArgument, "levels start at 1");
  std::int64_t x = kernel_;
  for (int i = 2; i <= level; ++i) {
    const std::int64_t s = step_(i);
    if (s <= 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "step function returned a non-positive size at level " + std::to_string(i));
    }
    x += s;
  }
  return x;
}

std::vector<std::int64_t> LearningScheme::positions(int levels) const {
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(std::max(levels, 0)));
  std::int64_t x = kernel_;
  for (int i = 1; i <= levels; ++i) {
    if (i > 1) x += step_(i);
    out.push_back(x);
  }
  return out;
}

void ObservationLog::append(const Observation& obs) {
  const int expected = static_cast<int>(entries_.size()) + 1;
  if (obs.level != expected) {
    throw Error(ErrorCode::kLevelGap, "expected level " + std::to_string(expected) + ", got " +
                                          std::to_string(obs.level));
  }
  if (!std::isfinite(obs.x) || obs.x <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "size must be positive at level " + std::to_string(obs.level));
  }
  if (!entries_.empty() && obs.x <= entries_.back().x) {
    throw Error(ErrorCode::kInvalidArgument,
                "sizes must be strictly increasing (level " + std::to_string(obs.level) + ")");
  }
  if (!std::isfinite(obs.accuracy) || obs.accuracy <= 0.0 || obs.accuracy > 100.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "accuracy must lie in (0, 100] at level " + std::to_string(obs.level));
  }
  if (scheme_) {
    const auto want = static_cast<double>(scheme_->position(obs.level));
    if (obs.x != want) {
      throw Error(ErrorCode::kInvalidArgument,
                  "size at level " + std::to_string(obs.level) + " is " + std::to_string(obs.x) +
                      " but the scheme (" + scheme_->description() + ") gives " +
                      std::to_string(want));
    }
  }
  entries_.push_back(obs);
}

ObservationLog ObservationLog::prefix(std::size_t n) const {
  ObservationLog out(scheme_);
  out.entries_.assign(entries_.begin(),
                      entries_.begin() + static_cast<std::ptrdiff_t>(std::min(n, entries_.size())));
  return out;
}

}  // namespace convergema
