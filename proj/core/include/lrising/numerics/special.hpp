#pragma once

namespace lrising::numerics {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

double sphere_area(int d);            // surface area of the unit sphere in R^d
double factorial(int n);              // n! as a double, exact for n <= 22
double double_factorial(int n);       // n!!, with (-1)!! = 0!! = 1
double incomplete_gamma_upper(double a, double x);  // Gamma(a, x), any real a, x > 0

// Smallest even integer-valued alpha check with a relative tolerance.
bool is_even_positive_integer(double alpha, double tol = 1e-12);

}  // namespace lrising::numerics
