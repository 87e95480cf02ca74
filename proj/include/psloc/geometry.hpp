#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace psloc {

using Point2 = Eigen::Vector2d;

/// Axis-aligned rectangle standing in for the parameter set.
struct Region {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;

  bool valid() const { return x_min < x_max && y_min < y_max; }
  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double diameter() const;
  Point2 center() const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }
  bool contains(const Point2& p, double margin = 0.0) const;
  Point2 clamp(const Point2& p) const;
  Region expanded(double margin) const;
};

struct SensorNetwork {
  std::vector<Point2> sensors;
  double nu = 1.0;
  double T = 1.0;
  double lambda0 = 1.0;
  Region theta_region;

  std::size_t size() const { return sensors.size(); }
};

/// Closed interval of possible arrival times at one detector.
struct TimeWindow {
  double alpha = 0.0;
  double beta = 0.0;

  double width() const { return beta - alpha; }
  double midpoint() const { return 0.5 * (alpha + beta); }
};

/// Throws psloc::Error(InvalidArgument / DegenerateGeometry) when the network
/// violates k >= 3, positivity of nu/T/lambda0, beta_j < T, or has every
/// sensor on one line.
void validate(const SensorNetwork& net);

double travel_time(const SensorNetwork& net, std::size_t j, const Point2& theta);

/// d tau_j / d theta. Equals -m_j / nu with m_j the unit vector from theta
/// toward sensor j. Throws DegenerateGeometry when theta sits on the sensor.
Eigen::Vector2d travel_time_gradient(const SensorNetwork& net, std::size_t j, const Point2& theta);

TimeWindow domain_bounds(const SensorNetwork& net, std::size_t j);

/// Same extremal travel times, over an arbitrary rectangle.
TimeWindow domain_bounds(const Point2& sensor, double nu, const Region& region);

/// True iff some sensor triple spans a triangle of area above
/// 1e-9 * diameter^2, i.e. not all sensors are on one line.
bool collinearity_check(std::span<const Point2> sensors);

}  // namespace psloc
