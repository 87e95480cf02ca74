#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "psloc/geometry.hpp"
#include "psloc/signal_model.hpp"

namespace psloc::test {

inline SensorNetwork reference_network() {
  SensorNetwork net;
  net.sensors = {{-1.0, -1.0}, {2.0, -1.0}, {2.0, 2.0}, {-1.0, 2.0}};
  net.nu = 1.0;
  net.T = 6.0;
  net.lambda0 = 1.0;
  net.theta_region = {0.0, 1.0, 0.0, 1.0};
  return net;
}

inline IntensityModel reference_model() { return IntensityModel(SignalShape(PowerLaw(3.0, 2.0))); }

inline const Point2 kTheta0{0.3, 0.4};

// Plain recursive adaptive Simpson, written independently of the library's
// iterative version.
inline double simpson_oracle(const std::function<double(double)>& f, double a, double b,
                             double tol = 1e-12, int depth = 60) {
  std::function<double(double, double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole, double eps,
          int d) {
        const double mid = 0.5 * (lo + hi);
        const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
        const double flm = f(lm), frm = f(rm);
        const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
        const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
        if (d <= 0 || std::abs(left + right - whole) <= 15.0 * eps) {
          return left + right + (left + right - whole) / 15.0;
        }
        return rec(lo, mid, flo, flm, fmid, left, 0.5 * eps, d - 1) +
               rec(mid, hi, fmid, frm, fhi, right, 0.5 * eps, d - 1);
      };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, depth);
}

// Direct log-likelihood of one detector: event loop with std::pow and the
// compensator by the Simpson oracle.
inline double reference_detector_loglik(double a, double kappa, double lambda0, double T,
                                        double n, double tau, std::span<const double> events) {
  auto lam = [&](double s) { return s > 0.0 ? a * std::pow(s, kappa) : 0.0; };
  double sum = 0.0;
  for (double t : events) {
    if (t > tau) sum += std::log(1.0 + lam(t - tau) / lambda0);
  }
  const double comp = tau < T ? simpson_oracle(lam, 0.0, T - tau) : 0.0;
  return sum - n * comp;
}

}  // namespace psloc::test

namespace psloc::test {

// Regularized upper incomplete gamma Q(a, x), series / continued fraction.
inline double gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 1000; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
  }
  double b = x + 1.0 - a, c = 1.0 / 1e-300, d = 1.0 / b, h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - gln) * h;
}

inline double chi2_survival(double stat, double dof) { return gamma_q(0.5 * dof, 0.5 * stat); }

}  // namespace psloc::test
