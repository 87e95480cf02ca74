#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace psloc {

struct QuadratureResult {
  double value = 0.0;
  std::size_t subdivisions = 0;
  bool converged = true;
};

/// Adaptive Simpson rule on [a, b]. Non-finite integrand samples are read as 0,
/// which is the right-limit convention for intensities at the arrival instant.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol = 1e-9,
                                  std::size_t max_subdivisions = std::size_t{1} << 20);

/// Barycentric interpolant on Chebyshev points of the second kind.
class ChebyshevInterpolant {
 public:
  ChebyshevInterpolant() = default;
  ChebyshevInterpolant(const std::function<double(double)>& f, double lo, double hi,
                       std::size_t nodes);

  double operator()(double x) const;
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> values_;
};

}  // namespace psloc
