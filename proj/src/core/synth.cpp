#include "core/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "core/errors.hpp"

namespace convergema {

namespace {
constexpr double kFloor = 1e-9;
}

ObservationLog generate(const GeneratorSpec& spec) {
  if (spec.levels < 1) throw Error(ErrorCode::kInvalidArgument, "levels must be >= 1");
  if (!(spec.noise_sd >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "noise_sd must be >= 0");
  if (!(spec.truth.a > 0.0) || !(spec.truth.b > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "truth curve needs a > 0 and b > 0");
  }
  for (const auto& s : spec.spikes) {
    if (s.level < 1 || s.level > spec.levels) {
      throw Error(ErrorCode::kInvalidArgument,
                  "spike level " + std::to_string(s.level) + " is outside 1.." +
                      std::to_string(spec.levels));
    }
  }

  const LearningScheme scheme = LearningScheme::uniform(spec.kernel, spec.step);
  const auto xs = scheme.positions(spec.levels);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.noise_sd > 0.0 ? spec.noise_sd : 1.0);

  ObservationLog log(scheme);
  for (int level = 1; level <= spec.levels; ++level) {
    const double x = static_cast<double>(xs[static_cast<std::size_t>(level - 1)]);
    double y = evaluate(spec.truth, x);
    for (const auto& t : spec.bias_terms) y += t.amplitude * std::pow(x, -t.exponent);
    if (spec.noise_sd > 0.0) y += noise(rng);
    for (const auto& s : spec.spikes) {
      if (s.level == level) y += s.delta;
    }
    log.append({level, x, std::clamp(y, kFloor, 100.0)});
  }
  return log;
}

}  // namespace convergema
