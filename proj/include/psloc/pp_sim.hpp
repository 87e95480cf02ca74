#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "psloc/geometry.hpp"
#include "psloc/signal_model.hpp"

namespace psloc {

/// Event times of k detectors observed on [0, T] at intensity scale n.
///
/// `retention` is the fraction kept by thinning: a path thinned with
/// probability p has intensity n * p * (lambda + lambda0), so every
/// likelihood routine works with `scale() = n * retention`.
struct ObservationSet {
  double n = 1.0;
  double T = 1.0;
  double retention = 1.0;
  std::vector<std::vector<double>> events;

  double scale() const { return n * retention; }
  std::size_t detectors() const { return events.size(); }
  std::size_t total_events() const;
};

/// Throws InvalidArgument on unsorted or out-of-range event times.
void validate(const ObservationSet& obs);

struct ThinnedPair {
  ObservationSet y;        ///< kept with probability p
  ObservationSet x_tilde;  ///< the complement
  double p = 0.0;
};

/// Exact draw of one path with intensity n * (lambda(t - tau) + lambda0) on [0, T].
std::vector<double> sample_path(const SignalShape& shape, double lambda0, double T, double tau,
                                double n, std::uint64_t seed);
/// Exact draw of the k inhomogeneous Poisson paths with intensities
/// n * (lambda_j(t - tau_j(theta0)) + lambda0). Detector j uses the stream
/// derive_seed(seed, j, 0, Paths).
ObservationSet sample_paths(const SensorNetwork& net, const IntensityModel& model,
                            const Point2& theta0, double n, std::uint64_t seed);

/// Independent coin flips with success probability p, one per event.
ThinnedPair thin(const ObservationSet& obs, double p, std::uint64_t seed);

/// p_n = n^{-b} for b in (0, 1/2).
double thinning_probability(double n, double b);

}  // namespace psloc
