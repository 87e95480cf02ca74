#include "psloc/likelihood.hpp"

#include <algorithm>
#include <cmath>

#include "psloc/errors.hpp"

namespace psloc {
namespace {

std::span<const double> after(std::span<const double> events, double tau) {
  const auto first = std::upper_bound(events.begin(), events.end(), tau);
  return events.subspan(static_cast<std::size_t>(first - events.begin()));
}

void check_region(const SensorNetwork& net, const Point2& theta) {
  const Region& region = net.theta_region;
  if (!theta.allFinite() || !region.contains(theta, 0.01 * region.diameter())) {
    throw Error(ErrorCode::OutOfRegion, "parameter outside the admissible region");
  }
}

}  // namespace

double detector_log_likelihood(const SignalShape& shape, double lambda0, double T, double scale,
                               double tau, std::span<const double> events) {
  if (tau >= T) return 0.0;
  const auto active = after(events, tau);
  const double inv_noise = 1.0 / lambda0;
  const double jumps = shape.visit([&](const auto& s) {
    double sum = 0.0;
    for (double t : active) sum += std::log1p(s.value(t - tau) * inv_noise);
    return sum;
  });
  return jumps - scale * shape.integral(T - tau);
}

double detector_log_likelihood_derivative(const SignalShape& shape, double lambda0, double T,
                                          double scale, double tau,
                                          std::span<const double> events) {
  if (tau >= T) return 0.0;
  if (!shape.smooth()) {
    throw Error(ErrorCode::NonSmoothModel, "likelihood derivative needs kappa > 1/2");
  }
  const auto active = after(events, tau);
  // d/dtau sum ln(1 + lambda(t - tau)/lambda0) = -sum lambda'/(lambda + lambda0);
  // d/dtau of the compensator term gives + scale * lambda(T - tau).
  const double jumps = shape.visit([&](const auto& s) {
    double sum = 0.0;
    for (double t : active) {
      const double u = t - tau;
      sum += s.derivative(u) / (s.value(u) + lambda0);
    }
    return sum;
  });
  return scale * shape.value(T - tau) - jumps;
}

double log_likelihood(const SensorNetwork& net, const IntensityModel& model, const Point2& theta,
                      const ObservationSet& obs) {
  check_region(net, theta);
  double total = 0.0;
  for (std::size_t j = 0; j < net.size(); ++j) {
    total += detector_log_likelihood(model.shape(j), net.lambda0, net.T, obs.scale(),
                                     travel_time(net, j, theta), obs.events[j]);
  }
  return total;
}

Eigen::Vector2d log_likelihood_gradient(const SensorNetwork& net, const IntensityModel& model,
                                        const Point2& theta, const ObservationSet& obs) {
  check_region(net, theta);
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
  for (std::size_t j = 0; j < net.size(); ++j) {
    const double tau = travel_time(net, j, theta);
    if (tau >= net.T) continue;
    const double dtau = detector_log_likelihood_derivative(model.shape(j), net.lambda0, net.T,
                                                           obs.scale(), tau, obs.events[j]);
    grad += dtau * travel_time_gradient(net, j, theta);
  }
  return grad;
}

Score score(const SensorNetwork& net, const IntensityModel& model, const Point2& theta,
            const ObservationSet& obs) {
  return log_likelihood_gradient(net, model, theta, obs) / std::sqrt(obs.scale());
}

LanDecomposition lan_decompose(const SensorNetwork& net, const IntensityModel& model,
                               const Point2& theta0, const Eigen::Vector2d& u,
                               const ObservationSet& obs) {
  const double root_n = std::sqrt(obs.scale());
  const Point2 shifted = theta0 + u / root_n;
  check_region(net, shifted);

  LanDecomposition lan;
  lan.u = u;
  lan.linear_term = u.dot(score(net, model, theta0, obs));
  lan.quadratic_term = 0.5 * u.dot(fisher_matrix(net, model, theta0).matrix * u);
  lan.log_zn = log_likelihood(net, model, shifted, obs) - log_likelihood(net, model, theta0, obs);
  lan.remainder = lan.log_zn - lan.linear_term + lan.quadratic_term;
  return lan;
}

}  // namespace psloc
