#pragma once

#include <functional>

#include "qee/constants.hpp"
#include "qee/errors.hpp"

namespace qee {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;  // |last doubling step|
  int subintervals = 0;
};

// Fixed-order composite rule: 16-point Gauss-Legendre on each of n equal
// subintervals of [a, b].
double composite_gauss(const std::function<double(double)>& f, double a, double b,
                       int subintervals);

// Doubles the subinterval count until two successive composites agree to
// max(rel_tol * |value|, abs_floor). Throws NumericalError with the achieved
// estimate and bound on exhaustion.
QuadratureResult integrate_to_convergence(const std::function<double(double)>& f, double a,
                                          double b, int initial_subintervals, double rel_tol,
                                          double abs_floor, int max_subintervals = 1 << 21);

// Starting subdivision for integrands carrying a sin/cos(omega t) factor over
// omega in [0, span]: at least one subinterval per half-period so the
// composite rule never straddles a full oscillation.
int oscillation_subintervals(double span, double t, int minimum = 8);

}  // namespace qee
