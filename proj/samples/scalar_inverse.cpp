// Checks whether the inverse of a decreasing convex scalar function is convex,
// using the closed-form second derivative and a finite-difference cross-check.

#include <cmath>
#include <cstdio>

#include "invex/convexity.hpp"
#include "invex/inverse.hpp"
#include "invex/numdiff.hpp"

int main() {
  using invex::Vector;
  const auto f = invex::scalar_map(1, [](const Vector& x) { return 1.0 / x(0); },
                                   [](const Vector& x) { return x(0) > 0.0; });

  const auto cert = invex::convexity::scalar_convexity_scan(f, {0.1, 10.0}, 50);
  std::printf("1/x on (0.1, 10): %s, min f'' = %.6g\n",
              std::string(invex::convexity::to_string(cert.status)).c_str(), cert.sigma_estimate);

  // 1/x is its own inverse.
  for (double x : {0.5, 1.0, 2.0, 4.0}) {
    const double y = 1.0 / x;
    const double formula = invex::inverse::scalar_inverse_second_derivative(-1.0 / (x * x), 2.0 / (x * x * x),
                                                                            -1.0 / (y * y));
    const double fd = invex::numdiff::hessian(f, Vector::Constant(1, y))(0, 0);
    std::printf("x = %-4g y = %-6g g''(y) formula %-12.8g fd %-12.8g\n", x, y, formula, fd);
  }
  return 0;
}
