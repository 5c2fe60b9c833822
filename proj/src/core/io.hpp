#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "core/convergence.hpp"
#include "core/scheme.hpp"
#include "core/synth.hpp"

namespace convergema {

/// CSV with header `level,size,accuracy`. Blank lines and trailing CR are
/// ignored. Errors (kParse, or the log's own validation) carry "line N".
ObservationLog read_observations(std::istream& in,
                                 std::optional<LearningScheme> scheme = std::nullopt);
ObservationLog read_observations_file(const std::string& path,
                                      std::optional<LearningScheme> scheme = std::nullopt);

void write_observations(std::ostream& out, const ObservationLog& log);
std::string observations_to_csv(const ObservationLog& log);

/// Shortest text that reads back to the same double.
std::string format_double(double v);

nlohmann::json to_json(const PowerLawCurve& curve);
nlohmann::json to_json(const FitResult& fit);
nlohmann::json to_json(const EpsilonRecord& record);

GeneratorSpec generator_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GeneratorSpec& spec);

std::string read_text_file(const std::string& path);

}  // namespace convergema
