#pragma once

#include <cstdint>
#include <vector>

#include "core/curve_model.hpp"
#include "core/scheme.hpp"

namespace convergema {

struct Spike {
  int level = 0;
  double delta = 0.0;
};

/// Extra amplitude * x^(-exponent) on top of the truth curve. A positive
/// amplitude with exponent above the truth's b bends early accuracies up and
/// yields decreasing plain backbones; a negative one does the opposite.
struct BiasTerm {
  double amplitude = 0.0;
  double exponent = 1.0;
};

struct GeneratorSpec {
  PowerLawCurve truth{2.0, 0.5, 95.0};
  std::int64_t kernel = 5000;
  std::int64_t step = 5000;
  int levels = 20;
  double noise_sd = 0.0;
  std::vector<Spike> spikes;
  std::vector<BiasTerm> bias_terms;
  std::uint64_t seed = 0;
};

/// y_i = truth(x_i) + bias terms + N(0, noise_sd) + spikes at their levels,
/// clamped into (0, 100]. Deterministic for a given seed.
ObservationLog generate(const GeneratorSpec& spec);

}  // namespace convergema
