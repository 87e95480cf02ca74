#include "psloc/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "psloc/errors.hpp"

namespace psloc {
namespace {

struct Panel {
  double a, m, b;
  double fa, fm, fb;
  double whole;
  double tol;
};

double sample(const std::function<double(double)>& f, double x) {
  const double v = f(x);
  return std::isfinite(v) ? v : 0.0;
}

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, std::size_t max_subdivisions) {
  QuadratureResult result;
  if (!(b > a)) return result;

  const double m = 0.5 * (a + b);
  const double fa = sample(f, a), fm = sample(f, m), fb = sample(f, b);
  std::vector<Panel> stack{{a, m, b, fa, fm, fb, simpson(a, b, fa, fm, fb), abs_tol}};
  // Panels narrower than this relative to the interval are accepted as is.
  const double min_width = (b - a) * 1e-15;

  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    const double lm = 0.5 * (p.a + p.m), rm = 0.5 * (p.m + p.b);
    const double flm = sample(f, lm), frm = sample(f, rm);
    const double left = simpson(p.a, p.m, p.fa, flm, p.fm);
    const double right = simpson(p.m, p.b, p.fm, frm, p.fb);
    const double delta = left + right - p.whole;
    if (std::abs(delta) <= 15.0 * p.tol || (p.b - p.a) < min_width ||
        result.subdivisions >= max_subdivisions) {
      if (std::abs(delta) > 15.0 * p.tol) result.converged = false;
      result.value += left + right + delta / 15.0;
      continue;
    }
    ++result.subdivisions;
    stack.push_back({p.m, rm, p.b, p.fm, frm, p.fb, right, 0.5 * p.tol});
    stack.push_back({p.a, lm, p.m, p.fa, flm, p.fm, left, 0.5 * p.tol});
  }
  return result;
}

ChebyshevInterpolant::ChebyshevInterpolant(const std::function<double(double)>& f, double lo,
                                           double hi, std::size_t nodes)
    : lo_(lo), hi_(hi) {
  if (nodes < 2 || !(hi > lo)) {
    throw Error(ErrorCode::InvalidArgument, "Chebyshev interpolant needs hi > lo and 2+ nodes");
  }
  nodes_.resize(nodes);
  values_.resize(nodes);
  const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  for (std::size_t i = 0; i < nodes; ++i) {
    const double c = std::cos(std::numbers::pi * static_cast<double>(i) /
                              static_cast<double>(nodes - 1));
    nodes_[i] = mid + half * c;
    values_[i] = f(nodes_[i]);
  }
}

double ChebyshevInterpolant::operator()(double x) const {
  // Barycentric weights for second-kind points: (-1)^i, halved at the ends.
  double num = 0.0, den = 0.0;
  const std::size_t n = nodes_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = x - nodes_[i];
    if (diff == 0.0) return values_[i];
    double w = (i % 2 == 0) ? 1.0 : -1.0;
    if (i == 0 || i + 1 == n) w *= 0.5;
    w /= diff;
    num += w * values_[i];
    den += w;
  }
  return num / den;
}

}  // namespace psloc
