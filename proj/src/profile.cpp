#include "psloc/profile.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <unsupported/Eigen/FFT>

#include "psloc/errors.hpp"
#include "psloc/likelihood.hpp"

namespace psloc {
namespace {

std::size_t next_pow2(std::size_t v) {
  std::size_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

template <class F>
double golden_section_max(const F& f, double a, double b, double tol) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

}  // namespace

double DelayProfile::at(double tau) const {
  if (values.empty()) return 0.0;
  const double x = (tau - origin) / spacing;
  if (x <= 0.0) return values.front();
  const auto last = values.size() - 1;
  if (x >= static_cast<double>(last)) return values.back();
  const auto i = static_cast<std::size_t>(x);
  const double frac = x - static_cast<double>(i);
  return values[i] + frac * (values[i + 1] - values[i]);
}

std::size_t DelayProfile::argmax() const {
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

DelayProfile scan_delay_profile(const SignalShape& shape, double lambda0, double T, double scale,
                                std::span<const double> events, TimeWindow window,
                                double spacing) {
  if (!(spacing > 0.0) || !(window.beta >= window.alpha) || !(window.beta < T)) {
    throw Error(ErrorCode::InvalidArgument, "delay scan needs alpha <= beta < T and spacing > 0");
  }
  DelayProfile profile;
  profile.origin = window.alpha;
  profile.spacing = spacing;
  const auto steps = static_cast<std::size_t>(std::floor(window.width() / spacing + 1e-9));
  const auto bins = static_cast<std::size_t>(std::ceil((T - window.alpha) / spacing)) + 1;

  // counts[b]: events in [alpha + b h, alpha + (b+1) h); kernel[d]: log
  // intensity ratio at lag (d + 1/2) h.
  const std::size_t fft_size = next_pow2(2 * bins);
  std::vector<std::complex<double>> counts(fft_size), kernel(fft_size);
  for (double t : events) {
    if (t <= window.alpha) continue;
    const auto b = static_cast<std::size_t>((t - window.alpha) / spacing);
    counts[std::min(b, bins - 1)] += 1.0;
  }
  const double inv_noise = 1.0 / lambda0;
  for (std::size_t d = 0; d < bins; ++d) {
    kernel[d] = std::log1p(shape.value((static_cast<double>(d) + 0.5) * spacing) * inv_noise);
  }

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> counts_hat, kernel_hat, corr;
  fft.fwd(counts_hat, counts);
  fft.fwd(kernel_hat, kernel);
  for (std::size_t i = 0; i < fft_size; ++i) counts_hat[i] *= std::conj(kernel_hat[i]);
  fft.inv(corr, counts_hat);

  profile.values.resize(steps + 1);
  for (std::size_t s = 0; s <= steps; ++s) {
    const double tau = profile.tau(s);
    profile.values[s] = corr[s].real() - scale * shape.integral(T - tau);
  }
  return profile;
}

DelayMaximum maximize_delay_likelihood(const SignalShape& shape, double lambda0, double T,
                                       double scale, std::span<const double> events,
                                       TimeWindow window, std::size_t grid_points) {
  DelayMaximum best;
  const double width = window.width();
  if (!(width > 0.0)) {
    best.tau = window.alpha;
    return best;
  }
  const double h = width / static_cast<double>(std::max<std::size_t>(grid_points, 1));
  const DelayProfile profile = scan_delay_profile(shape, lambda0, T, scale, events, window, h / 4);

  const auto [lo_it, hi_it] = std::minmax_element(profile.values.begin(), profile.values.end());
  if (*hi_it - *lo_it <= 1e-12 * std::max(1.0, std::abs(*hi_it))) {
    best.tau = window.midpoint();
    best.flat = true;
    return best;
  }

  const double start = profile.tau(profile.argmax());
  double lo = std::max(window.alpha, start - 2 * h);
  double hi = std::min(window.beta, start + 2 * h);
  const double tol = 1e-8 * width;

  auto value = [&](double tau) {
    ++best.evaluations;
    return detector_log_likelihood(shape, lambda0, T, scale, tau, events);
  };

  if (shape.smooth()) {
    auto slope = [&](double tau) {
      ++best.evaluations;
      return detector_log_likelihood_derivative(shape, lambda0, T, scale, tau, events);
    };
    if (slope(lo) > 0.0 && slope(hi) < 0.0) {
      // Scoring on the exact derivative, kept inside the sign-change bracket.
      double x = std::clamp(start, lo, hi);
      for (int it = 0; it < 200; ++it) {
        const double g = slope(x);
        (g > 0.0 ? lo : hi) = x;
        const double curvature = scale * shape.information(T - x, lambda0);
        double next = (curvature > 0.0 && std::isfinite(curvature)) ? x + g / curvature
                                                                     : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const bool done = std::abs(next - x) < tol || hi - lo < tol;
        x = next;
        if (done) break;
      }
      best.tau = x;
      return best;
    }
  }
  best.tau = golden_section_max(value, lo, hi, tol);
  return best;
}

}  // namespace psloc
