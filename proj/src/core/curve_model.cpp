#include "core/curve_model.hpp"

#include <cmath>
#include <string>

#include "core/errors.hpp"

namespace convergema {

namespace {

void require_positive_x(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw Error(ErrorCode::kDomain,
                "power-law curve evaluated at non-positive x = " + std::to_string(x));
  }
}

}  // namespace

double evaluate(const PowerLawCurve& curve, double x) {
  require_positive_x(x);
  return -curve.a * std::pow(x, -curve.b) + curve.c;
}

double derivative(const PowerLawCurve& curve, double x) {
  require_positive_x(x);
  return curve.a * curve.b * std::pow(x, -(curve.b + 1.0));
}

bool is_valid_pattern(const PowerLawCurve& curve, double upper_bound,
                      double domain_start) {
  if (!(curve.a > 0.0) || !(curve.b > 0.0)) return false;
  if (!std::isfinite(curve.c) || curve.c > upper_bound) return false;
  if (!(domain_start > 0.0)) return false;
  return evaluate(curve, domain_start) > 0.0;
}

}  // namespace convergema
