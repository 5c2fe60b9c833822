// Brute-force reference fitter. Deliberately naive: a full (log a, log b, c)
// lattice followed by a one-dimensional golden-section search over log b in
// which a and c are eliminated in closed form.

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/fitting.hpp"

namespace convergema {

namespace {

struct Profile {
  double a;
  double c;
  double sse;
};

double lattice_sse(const FitProblem& problem, double a, double b, double c) {
  double s = 0.0;
  for (const auto& p : problem.points) {
    const double d = p.y + a * std::pow(p.x, -b) - c;
    s += d * d;
  }
  if (problem.anchor) s += problem.anchor_weight * (*problem.anchor - c) * (*problem.anchor - c);
  return s;
}

// Best (a, c) for fixed b, with a kept strictly positive.
Profile profile(const FitProblem& problem, double b) {
  const double w = problem.anchor ? problem.anchor_weight : 0.0;
  const double t = problem.anchor.value_or(0.0);
  std::vector<double> u(problem.points.size());
  double n = 0.0, su = 0.0, suu = 0.0, sy = 0.0, suy = 0.0;
  for (std::size_t i = 0; i < problem.points.size(); ++i) {
    u[i] = std::pow(problem.points[i].x, -b);
    n += 1.0;
    su += u[i];
    suu += u[i] * u[i];
    sy += problem.points[i].y;
    suy += u[i] * problem.points[i].y;
  }
  // Minimize sum (y + a u - c)^2 + w (t - c)^2.
  //   d/da:  suu a - su c = -suy
  //   d/dc: -su a + (n + w) c = sy + w t
  const double det = suu * (n + w) - su * su;
  double a = (-suy * (n + w) + su * (sy + w * t)) / det;
  double c = (suu * (sy + w * t) - su * suy) / det;
  const double a_floor = 1e-12;
  if (!(a > a_floor) || !std::isfinite(a)) {
    a = a_floor;
    c = (sy + a * su + w * t) / (n + w);
  }
  return {a, c, lattice_sse(problem, a, b, c)};
}

}  // namespace

FitResult oracle_fit(const FitProblem& problem, const GridSpec& grid) {
  validate(problem);

  double y_lo = problem.points.front().y;
  double y_hi = y_lo;
  for (const auto& p : problem.points) {
    y_lo = std::min(y_lo, p.y);
    y_hi = std::max(y_hi, p.y);
  }
  const double span = std::max(y_hi - y_lo, 1e-6);
  const double c_min = std::isnan(grid.c_min) ? y_hi - 0.01 * span : grid.c_min;
  double c_max = std::isnan(grid.c_max) ? y_hi + 10.0 * span : grid.c_max;
  if (problem.anchor) c_max = std::max(c_max, *problem.anchor);

  auto lerp = [](double lo, double hi, int i, int steps) {
    return steps <= 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (steps - 1);
  };

  double best_log_b = grid.log_b_min;
  double best_sse = INFINITY;
  for (int ib = 0; ib < grid.b_steps; ++ib) {
    const double lb = lerp(grid.log_b_min, grid.log_b_max, ib, grid.b_steps);
    const double b = std::exp(lb);
    for (int ia = 0; ia < grid.a_steps; ++ia) {
      const double a = std::exp(lerp(grid.log_a_min, grid.log_a_max, ia, grid.a_steps));
      for (int ic = 0; ic < grid.c_steps; ++ic) {
        const double s = lattice_sse(problem, a, b, lerp(c_min, c_max, ic, grid.c_steps));
        if (s < best_sse) {
          best_sse = s;
          best_log_b = lb;
        }
      }
    }
    // The profile at every lattice b as well, so the bracket below starts
    // from the best b under exact (a, c).
    const Profile pr = profile(problem, b);
    if (pr.sse < best_sse) {
      best_sse = pr.sse;
      best_log_b = lb;
    }
  }

  const double cell = (grid.log_b_max - grid.log_b_min) / std::max(grid.b_steps - 1, 1);
  double lo = best_log_b - cell;
  double hi = best_log_b + cell;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = profile(problem, std::exp(x1)).sse;
  double f2 = profile(problem, std::exp(x2)).sse;
  for (int it = 0; it < grid.refine_sweeps && (hi - lo) > 1e-13; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = profile(problem, std::exp(x1)).sse;
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = profile(problem, std::exp(x2)).sse;
    }
  }
  const double b = std::exp(0.5 * (lo + hi));
  const Profile pr = profile(problem, b);

  FitResult out = score(problem, PowerLawCurve{pr.a, b, pr.c});
  out.converged = true;
  out.iterations = 0;
  return out;
}

}  // namespace convergema
