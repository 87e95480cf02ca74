#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Core>

#include "psloc/geometry.hpp"
#include "psloc/pp_sim.hpp"
#include "psloc/signal_model.hpp"

namespace psloc {

using Score = Eigen::Vector2d;

struct LanDecomposition {
  Eigen::Vector2d u = Eigen::Vector2d::Zero();
  double linear_term = 0.0;
  double quadratic_term = 0.0;
  double log_zn = 0.0;
  double remainder = 0.0;
};

/// Log-likelihood ratio (against noise only) of one detector path when the
/// signal arrives at `tau`. Events at or before `tau` contribute nothing.
double detector_log_likelihood(const SignalShape& shape, double lambda0, double T, double scale,
                               double tau, std::span<const double> events);

/// d/dtau of detector_log_likelihood, smooth shapes only.
double detector_log_likelihood_derivative(const SignalShape& shape, double lambda0, double T,
                                          double scale, double tau,
                                          std::span<const double> events);

/// ln L(theta, X^n). Accepts theta up to 1% of diam(Theta) outside Theta,
/// throws OutOfRegion beyond that.
double log_likelihood(const SensorNetwork& net, const IntensityModel& model, const Point2& theta,
                      const ObservationSet& obs);

/// Unnormalized gradient d ln L / d theta.
Eigen::Vector2d log_likelihood_gradient(const SensorNetwork& net, const IntensityModel& model,
                                        const Point2& theta, const ObservationSet& obs);

/// Delta_n = n^{-1/2} d ln L / d theta, with n the observation scale.
Score score(const SensorNetwork& net, const IntensityModel& model, const Point2& theta,
            const ObservationSet& obs);

/// ln Z_n(u) = ln L(theta0 + u / sqrt(n)) - ln L(theta0) split into the LAN
/// linear and quadratic terms plus remainder.
LanDecomposition lan_decompose(const SensorNetwork& net, const IntensityModel& model,
                               const Point2& theta0, const Eigen::Vector2d& u,
                               const ObservationSet& obs);

}  // namespace psloc
