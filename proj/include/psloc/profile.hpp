#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "psloc/geometry.hpp"
#include "psloc/signal_model.hpp"

namespace psloc {

/// Detector log-likelihood tabulated on the lattice tau_s = origin + s * spacing.
///
/// Events are binned at the lattice resolution and correlated against the
/// sampled log-intensity ratio with one FFT, so a full scan costs
/// O(B log B) instead of O(lattice size * events). Values carry the binning
/// error of O(spacing); use them to locate maxima, not as final likelihoods.
struct DelayProfile {
  double origin = 0.0;
  double spacing = 1.0;
  std::vector<double> values;

  double tau(std::size_t s) const { return origin + spacing * static_cast<double>(s); }
  /// Linear interpolation, clamped to the lattice.
  double at(double tau) const;
  std::size_t argmax() const;
};

DelayProfile scan_delay_profile(const SignalShape& shape, double lambda0, double T, double scale,
                                std::span<const double> events, TimeWindow window,
                                double spacing);

struct DelayMaximum {
  double tau = 0.0;
  bool flat = false;
  std::size_t evaluations = 0;
};

/// Maximizes the one-detector log-likelihood over `window`: lattice scan with
/// step width/grid_points, then refinement to 1e-8 * width inside the two
/// neighbouring grid cells. Smooth shapes refine with safeguarded scoring on
/// the exact derivative; others with golden-section on exact values. A
/// constant likelihood returns the window midpoint with `flat` set.
DelayMaximum maximize_delay_likelihood(const SignalShape& shape, double lambda0, double T,
                                       double scale, std::span<const double> events,
                                       TimeWindow window, std::size_t grid_points = 2000);

}  // namespace psloc
