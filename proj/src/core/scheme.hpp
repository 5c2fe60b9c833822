#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace convergema {

/// Kernel size plus a step function; x_1 = kernel, x_i = x_{i-1} + step(i).
class LearningScheme {
 public:
  using StepFn = std::function<std::int64_t(int level)>;

  LearningScheme(std::int64_t kernel_size, StepFn step, std::string description);

  static LearningScheme uniform(std::int64_t kernel_size, std::int64_t step);

  std::int64_t kernel_size() const noexcept { return kernel_; }
  const std::string& description() const noexcept { return description_; }

  /// Training-set size at a 1-based level.
  std::int64_t position(int level) const;
  std::vector<std::int64_t> positions(int levels) const;

 private:
  std::int64_t kernel_;
  StepFn step_;
  std::string description_;
};

struct Observation {
  int level = 0;
  double x = 0.0;
  double accuracy = 0.0;
};

/// Contiguous observations starting at level 1.
class ObservationLog {
 public:
  ObservationLog() = default;
  explicit ObservationLog(std::optional<LearningScheme> scheme) : scheme_(std::move(scheme)) {}

  /// Throws kLevelGap on non-contiguous levels and kInvalidArgument on a
  /// size that is not increasing, disagrees with the scheme, or an accuracy
  /// outside (0, 100].
  void append(const Observation& obs);

  const std::vector<Observation>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const Observation& operator[](std::size_t i) const { return entries_[i]; }
  const std::optional<LearningScheme>& scheme() const noexcept { return scheme_; }

  /// First n observations, same scheme.
  ObservationLog prefix(std::size_t n) const;

 private:
  std::optional<LearningScheme> scheme_;
  std::vector<Observation> entries_;
};

}  // namespace convergema
