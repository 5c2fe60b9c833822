#pragma once

namespace convergema {

/// Power-law accuracy pattern  y(x) = -a * x^(-b) + c.
///
/// With a > 0 and b > 0 the curve is strictly increasing and concave on
/// x > 0 and approaches its horizontal asymptote c from below.
struct PowerLawCurve {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  friend bool operator==(const PowerLawCurve&, const PowerLawCurve&) = default;
};

/// Throws Error(kDomain) for x <= 0.
double evaluate(const PowerLawCurve& curve, double x);

/// First derivative a*b*x^(-(b+1)). Throws Error(kDomain) for x <= 0.
double derivative(const PowerLawCurve& curve, double x);

inline double asymptote(const PowerLawCurve& curve) noexcept { return curve.c; }

/// True iff a > 0, b > 0, c <= upper_bound and the curve is positive at
/// domain_start. One positivity check suffices because the curve increases.
bool is_valid_pattern(const PowerLawCurve& curve, double upper_bound,
                      double domain_start);

}  // namespace convergema
