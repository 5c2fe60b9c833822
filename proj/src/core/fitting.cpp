#include "core/fitting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "core/errors.hpp"

namespace convergema {

namespace {

constexpr double kMaxAccuracy = 100.0;
constexpr double kLogAMin = -60.0;
constexpr double kLogAMax = 120.0;
constexpr double kLogBMin = -30.0;
constexpr double kLogBMax = 5.0;

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

struct Params {
  double log_a;
  double log_b;
  double c;

  PowerLawCurve curve() const { return {std::exp(log_a), std::exp(log_b), c}; }
};

Params clamp(Params p) {
  p.log_a = std::clamp(p.log_a, kLogAMin, kLogAMax);
  p.log_b = std::clamp(p.log_b, kLogBMin, kLogBMax);
  return p;
}

double sse_of(const FitProblem& problem, const PowerLawCurve& curve) {
  double sse = 0.0;
  for (const auto& p : problem.points) {
    const double r = p.y - (-curve.a * std::pow(p.x, -curve.b) + curve.c);
    sse += r * r;
  }
  if (problem.anchor) {
    const double r = *problem.anchor - curve.c;
    sse += problem.anchor_weight * r * r;
  }
  return sse;
}

// Gaussian elimination with partial pivoting; false if singular.
bool solve3(Mat3 m, Vec3 rhs, Vec3& out) {
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int row = col + 1; row < 3; ++row) {
      if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
    }
    if (!(std::abs(m[pivot][col]) > 0.0)) return false;
    std::swap(m[col], m[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (int row = col + 1; row < 3; ++row) {
      const double f = m[row][col] / m[col][col];
      for (int k = col; k < 3; ++k) m[row][k] -= f * m[col][k];
      rhs[row] -= f * rhs[col];
    }
  }
  for (int row = 2; row >= 0; --row) {
    double s = rhs[row];
    for (int k = row + 1; k < 3; ++k) s -= m[row][k] * out[k];
    out[row] = s / m[row][row];
  }
  return std::isfinite(out[0]) && std::isfinite(out[1]) && std::isfinite(out[2]);
}

// Gradient g = J^T r and Gauss-Newton matrix H = J^T J of the residual
// vector r = y - model at the given parameters.
void linearize(const FitProblem& problem, const Params& p, Vec3& g, Mat3& h) {
  g = {0.0, 0.0, 0.0};
  h = {};
  const double a = std::exp(p.log_a);
  const double b = std::exp(p.log_b);
  for (const auto& pt : problem.points) {
    const double u = std::pow(pt.x, -b);
    const double r = pt.y - (-a * u + p.c);
    const Vec3 j = {a * u, -a * u * b * std::log(pt.x), -1.0};
    for (int i = 0; i < 3; ++i) {
      g[i] += j[i] * r;
      for (int k = 0; k < 3; ++k) h[i][k] += j[i] * j[k];
    }
  }
  if (problem.anchor) {
    const double sw = std::sqrt(problem.anchor_weight);
    const double r = sw * (*problem.anchor - p.c);
    g[2] += -sw * r;
    h[2][2] += sw * sw;
  }
}

struct LmOutcome {
  Params params;
  double sse;
  bool converged;
  int iterations;
};

LmOutcome levenberg_marquardt(const FitProblem& problem, Params start,
                              const FitConfig& config) {
  Params p = clamp(start);
  double sse = sse_of(problem, p.curve());
  Vec3 g;
  Mat3 h;
  linearize(problem, p, g, h);

  double max_diag = std::max({h[0][0], h[1][1], h[2][2]});
  double mu = 1e-3 * (max_diag > 0.0 ? max_diag : 1.0);
  double growth = 2.0;
  int iter = 0;

  while (iter < config.max_iterations) {
    ++iter;
    if (sse == 0.0) return {p, sse, true, iter};

    Mat3 damped = h;
    for (int i = 0; i < 3; ++i) {
      damped[i][i] += mu * std::max(h[i][i], 1e-12 * max_diag + 1e-300);
    }
    Vec3 step{};
    const Vec3 rhs = {-g[0], -g[1], -g[2]};
    if (!solve3(damped, rhs, step)) {
      mu *= growth;
      growth *= 2.0;
      continue;
    }

    const double step_norm =
        std::sqrt(step[0] * step[0] + step[1] * step[1] + step[2] * step[2]);
    const double param_norm =
        std::sqrt(p.log_a * p.log_a + p.log_b * p.log_b + p.c * p.c);
    const bool tiny_step = step_norm < config.step_tol * (param_norm + config.step_tol);

    const Params trial = clamp({p.log_a + step[0], p.log_b + step[1], p.c + step[2]});
    const double trial_sse = sse_of(problem, trial.curve());

    // Predicted decrease of 0.5*SSE under the local quadratic model.
    double hs = 0.0;
    double gs = 0.0;
    for (int i = 0; i < 3; ++i) {
      gs += g[i] * step[i];
      double row = 0.0;
      for (int k = 0; k < 3; ++k) row += h[i][k] * step[k];
      hs += step[i] * row;
    }
    const double predicted = -gs - 0.5 * hs;
    const double actual = 0.5 * (sse - trial_sse);

    if (std::isfinite(trial_sse) && trial_sse < sse) {
      const double rel_gain = (sse - trial_sse) / sse;
      p = trial;
      sse = trial_sse;
      linearize(problem, p, g, h);
      max_diag = std::max({h[0][0], h[1][1], h[2][2]});
      const double rho = predicted > 0.0 ? actual / predicted : 0.0;
      const double t = 2.0 * rho - 1.0;
      mu *= std::max(1.0 / 3.0, 1.0 - t * t * t);
      growth = 2.0;
      if (rel_gain < config.rel_sse_tol || tiny_step) return {p, sse, true, iter};
    } else {
      if (tiny_step) return {p, sse, true, iter};
      mu *= growth;
      growth *= 2.0;
      if (!std::isfinite(mu) || mu > 1e300) return {p, sse, true, iter};
    }
  }
  return {p, sse, false, iter};
}

double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    m = 0.5 * (m + lower);
  }
  return m;
}

Params heuristic_start(const FitProblem& problem) {
  std::vector<double> ys;
  ys.reserve(problem.points.size());
  for (const auto& p : problem.points) ys.push_back(p.y);
  const double ymax = *std::max_element(ys.begin(), ys.end());
  double c0 = ymax + 0.5 * (ymax - median_of(ys));
  if (problem.anchor) c0 = std::min(c0, *problem.anchor + 1e-6);
  const double b0 = 0.5;
  const auto& first = problem.points.front();
  double a0 = (c0 - first.y) * std::pow(first.x, b0);
  if (!(a0 > 0.0)) a0 = 1e-6 * (1.0 + std::abs(c0));
  return {std::log(a0), std::log(b0), c0};
}

// For fixed b the model is linear in (a, c); solve that 2x2 problem exactly.
Params projected_start(const FitProblem& problem, double b) {
  const double w = problem.anchor ? problem.anchor_weight : 0.0;
  const double anchor = problem.anchor.value_or(0.0);
  double suu = 0.0, su = 0.0, suy = 0.0, sy = 0.0;
  const double n = static_cast<double>(problem.points.size());
  for (const auto& p : problem.points) {
    const double u = std::pow(p.x, -b);
    suu += u * u;
    su += u;
    suy += u * p.y;
    sy += p.y;
  }
  // Unknowns (a, c) for the rows  -a*u + c = y  and  sqrt(w)*c = sqrt(w)*anchor.
  const double m11 = suu, m12 = -su, m22 = n + w;
  const double r1 = -suy, r2 = sy + w * anchor;
  const double det = m11 * m22 - m12 * m12;
  double a = 0.0, c = 0.0;
  if (std::abs(det) > 0.0) {
    a = (r1 * m22 - m12 * r2) / det;
    c = (m11 * r2 - m12 * r1) / det;
  }
  if (!(a > 0.0) || !std::isfinite(a)) {
    a = 1e-9 * (1.0 + std::abs(sy / n));
    c = (sy + a * su + w * anchor) / (n + w);
  }
  return {std::log(a), std::log(b), c};
}

}  // namespace

void validate(const FitProblem& problem) {
  if (problem.points.size() < 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "a learning trend needs at least 3 observations, got " +
                    std::to_string(problem.points.size()));
  }
  double prev_x = 0.0;
  for (std::size_t i = 0; i < problem.points.size(); ++i) {
    const auto& p = problem.points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite observation at index " + std::to_string(i));
    }
    if (!(p.x > prev_x)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "x must be positive and strictly increasing (index " + std::to_string(i) + ")");
    }
    if (!(p.y > 0.0) || p.y > kMaxAccuracy) {
      throw Error(ErrorCode::kInvalidArgument,
                  "accuracy must lie in (0, 100] (index " + std::to_string(i) + ")");
    }
    prev_x = p.x;
  }
  if (problem.anchor && !std::isfinite(*problem.anchor)) {
    throw Error(ErrorCode::kInvalidArgument, "anchor must be finite");
  }
  if (!(problem.anchor_weight > 0.0) || !std::isfinite(problem.anchor_weight)) {
    throw Error(ErrorCode::kInvalidArgument, "anchor weight must be positive");
  }
}

FitResult score(const FitProblem& problem, const PowerLawCurve& curve) {
  FitResult out;
  out.curve = curve;
  out.residuals.reserve(problem.points.size());
  double sse = 0.0;
  for (const auto& p : problem.points) {
    const double r = p.y - (-curve.a * std::pow(p.x, -curve.b) + curve.c);
    out.residuals.push_back(r);
    sse += r * r;
  }
  if (problem.anchor) {
    const double r = *problem.anchor - curve.c;
    out.residual_at_infinity = r;
    sse += problem.anchor_weight * r * r;
  }
  out.sse = sse;
  return out;
}

FitResult fit(const FitProblem& problem, const FitConfig& config) {
  validate(problem);
  const double y0 = problem.points.front().y;
  const bool flat = std::all_of(problem.points.begin(), problem.points.end(),
                                [y0](const DataPoint& p) { return p.y == y0; });
  if (flat) {
    throw Error(ErrorCode::kDegenerateData,
                "all accuracies are identical; a power-law trend cannot represent flat data");
  }

  // Variable-projection scan over a geometric grid of b.
  constexpr int kScan = 48;
  Params best_scan{};
  double best_scan_sse = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kScan; ++i) {
    const double b = 0.01 * std::pow(500.0, static_cast<double>(i) / (kScan - 1));
    const Params cand = clamp(projected_start(problem, b));
    const double s = sse_of(problem, cand.curve());
    if (s < best_scan_sse) {
      best_scan_sse = s;
      best_scan = cand;
    }
  }

  const LmOutcome from_heuristic = levenberg_marquardt(problem, heuristic_start(problem), config);
  const LmOutcome from_scan = levenberg_marquardt(problem, best_scan, config);
  const LmOutcome& best = (from_scan.sse < from_heuristic.sse) ? from_scan : from_heuristic;

  FitResult out = score(problem, best.params.curve());
  out.converged = best.converged;
  out.iterations = best.iterations;
  return out;
}

}  // namespace convergema
