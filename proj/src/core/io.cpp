#include "core/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "core/errors.hpp"

namespace convergema {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + msg);
}

template <typename T>
T parse_field(std::string_view text, std::size_t line, const char* what) {
  T v{};
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || p != text.data() + text.size()) {
    parse_error(line, std::string("cannot read ") + what + " from '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

ObservationLog read_observations(std::istream& in, std::optional<LearningScheme> scheme) {
  ObservationLog log(std::move(scheme));
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const auto fields = split(line);
    if (!header_seen) {
      if (fields.size() != 3 || fields[0] != "level" || fields[1] != "size" ||
          fields[2] != "accuracy") {
        parse_error(line_no, "expected header 'level,size,accuracy'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) {
      parse_error(line_no, "expected 3 fields, found " + std::to_string(fields.size()));
    }
    Observation obs;
    obs.level = parse_field<int>(fields[0], line_no, "level");
    obs.x = parse_field<double>(fields[1], line_no, "size");
    obs.accuracy = parse_field<double>(fields[2], line_no, "accuracy");
    try {
      log.append(obs);
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!header_seen) parse_error(line_no, "empty input, expected header 'level,size,accuracy'");
  return log;
}

ObservationLog read_observations_file(const std::string& path,
                                      std::optional<LearningScheme> scheme) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  try {
    return read_observations(in, std::move(scheme));
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_observations(std::ostream& out, const ObservationLog& log) {
  out << "level,size,accuracy\n";
  for (const auto& o : log.entries()) {
    out << o.level << ',' << format_double(o.x) << ',' << format_double(o.accuracy) << '\n';
  }
}

std::string observations_to_csv(const ObservationLog& log) {
  std::ostringstream ss;
  write_observations(ss, log);
  return ss.str();
}

nlohmann::json to_json(const PowerLawCurve& curve) {
  return {{"a", curve.a}, {"b", curve.b}, {"c", curve.c}};
}

nlohmann::json to_json(const FitResult& fit) {
  nlohmann::json j = to_json(fit.curve);
  j["sse"] = fit.sse;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  if (fit.residual_at_infinity) j["residual_at_infinity"] = *fit.residual_at_infinity;
  return j;
}

nlohmann::json to_json(const EpsilonRecord& r) {
  nlohmann::json j{{"level", r.level},
                   {"epsilon", r.epsilon},
                   {"intersections", r.intersections},
                   {"rupture", r.is_rupture}};
  if (r.q) {
    j["q_x"] = r.q->x;
    j["q_y"] = r.q->y;
  } else {
    j["q_x"] = nullptr;
    j["q_y"] = nullptr;
  }
  return j;
}

GeneratorSpec generator_spec_from_json(const nlohmann::json& j) {
  GeneratorSpec spec;
  try {
    if (!j.is_object()) throw Error(ErrorCode::kParse, "generator spec must be a JSON object");
    if (j.contains("truth")) {
      const auto& t = j.at("truth");
      spec.truth = {t.at("a").get<double>(), t.at("b").get<double>(), t.at("c").get<double>()};
    }
    spec.kernel = j.value("kernel", spec.kernel);
    spec.step = j.value("step", spec.step);
    spec.levels = j.value("levels", spec.levels);
    spec.noise_sd = j.value("noise_sd", spec.noise_sd);
    spec.seed = j.value("seed", spec.seed);
    for (const auto& s : j.value("spikes", nlohmann::json::array())) {
      spec.spikes.push_back({s.at("level").get<int>(), s.at("delta").get<double>()});
    }
    for (const auto& b : j.value("bias_terms", nlohmann::json::array())) {
      spec.bias_terms.push_back({b.at("amplitude").get<double>(), b.at("exponent").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("generator spec: ") + e.what());
  }
  return spec;
}

nlohmann::json to_json(const GeneratorSpec& spec) {
  nlohmann::json spikes = nlohmann::json::array();
  for (const auto& s : spec.spikes) spikes.push_back({{"level", s.level}, {"delta", s.delta}});
  nlohmann::json bias = nlohmann::json::array();
  for (const auto& b : spec.bias_terms) {
    bias.push_back({{"amplitude", b.amplitude}, {"exponent", b.exponent}});
  }
  return {{"truth", to_json(spec.truth)}, {"kernel", spec.kernel},   {"step", spec.step},
          {"levels", spec.levels},        {"noise_sd", spec.noise_sd}, {"spikes", spikes},
          {"bias_terms", bias},           {"seed", spec.seed}};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace convergema
