#include "qee/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <sstream>

namespace qee {

double composite_gauss(const std::function<double(double)>& f, double a, double b,
                       int subintervals) {
  if (!std::isfinite(a) || !std::isfinite(b) || b < a) {
    throw ValidationError("composite_gauss: invalid interval");
  }
  if (subintervals < 1) {
    throw ValidationError("composite_gauss: need at least one subinterval");
  }
  using rule = boost::math::quadrature::gauss<double, 16>;
  const double h = (b - a) / static_cast<double>(subintervals);
  double acc = 0.0;
  for (int k = 0; k < subintervals; ++k) {
    const double lo = a + h * static_cast<double>(k);
    acc += rule::integrate(f, lo, lo + h);
  }
  return acc;
}

QuadratureResult integrate_to_convergence(const std::function<double(double)>& f, double a,
                                          double b, int initial_subintervals, double rel_tol,
                                          double abs_floor, int max_subintervals) {
  if (!(rel_tol > 0.0) || !(abs_floor >= 0.0)) {
    throw ValidationError("integrate_to_convergence: bad tolerances");
  }
  int n = std::max(1, initial_subintervals);
  double prev = composite_gauss(f, a, b, n);
  while (n <= max_subintervals) {
    const int n2 = 2 * n;
    const double cur = composite_gauss(f, a, b, n2);
    const double step = std::abs(cur - prev);
    if (!std::isfinite(cur)) {
      throw NumericalError("integrate_to_convergence: non-finite integrand");
    }
    if (step <= std::max(rel_tol * std::abs(cur), abs_floor)) {
      return QuadratureResult{cur, step, n2};
    }
    prev = cur;
    n = n2;
  }
  std::ostringstream os;
  os << "integrate_to_convergence: no convergence with " << n
     << " subintervals; last estimate " << prev << ", last doubling step unresolved beyond "
     << rel_tol << " relative";
  throw NumericalError(os.str());
}

int oscillation_subintervals(double span, double t, int minimum) {
  if (!(span > 0.0) || !std::isfinite(span)) {
    throw ValidationError("oscillation_subintervals: span must be positive and finite");
  }
  const double half_periods = span * std::abs(t) / M_PI;
  if (half_periods > 1e7) {
    throw ValidationError("oscillation_subintervals: oscillation count out of supported range");
  }
  return std::max(minimum, static_cast<int>(std::ceil(half_periods)) + 1);
}

}  // namespace qee
