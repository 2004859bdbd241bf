#include "lrising/numerics/special.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_gamma.h>

#include <algorithm>
#include <cmath>

#include "lrising/errors.hpp"

namespace lrising::numerics {

double sphere_area(int d) {
  if (d < 1) throw DomainError("sphere_area: dimension must be >= 1");
  return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
}

double factorial(int n) {
  if (n < 0) throw DomainError("factorial: negative argument");
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

double double_factorial(int n) {
  if (n < -1) throw DomainError("double_factorial: argument < -1");
  double r = 1.0;
  for (int k = n; k > 1; k -= 2) r *= k;
  return r;
}

double incomplete_gamma_upper(double a, double x) {
  if (!(x > 0.0)) throw DomainError("incomplete_gamma_upper: x must be positive");
  gsl_sf_result res;
  gsl_error_handler_t* old = gsl_set_error_handler_off();
  const int status = gsl_sf_gamma_inc_e(a, x, &res);
  gsl_set_error_handler(old);
  if (status == GSL_EUNDRFLW) return 0.0;
  if (status != GSL_SUCCESS) throw DomainError("incomplete_gamma_upper: evaluation failed");
  return res.val;
}

bool is_even_positive_integer(double alpha, double tol) {
  if (alpha <= 0.0) return false;
  const double half = 0.5 * alpha;
  const double r = std::round(half);
  return r >= 1.0 && std::abs(half - r) <= tol * std::max(1.0, half);
}

}  // namespace lrising::numerics
