#include "psloc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "psloc/errors.hpp"

namespace psloc {

double Region::diameter() const { return std::hypot(width(), height()); }

bool Region::contains(const Point2& p, double margin) const {
  return p.x() >= x_min - margin && p.x() <= x_max + margin && p.y() >= y_min - margin &&
         p.y() <= y_max + margin;
}

Point2 Region::clamp(const Point2& p) const {
  return {std::clamp(p.x(), x_min, x_max), std::clamp(p.y(), y_min, y_max)};
}

Region Region::expanded(double margin) const {
  return {x_min - margin, x_max + margin, y_min - margin, y_max + margin};
}

void validate(const SensorNetwork& net) {
  if (net.size() < 3) {
    throw Error(ErrorCode::InvalidArgument, "need at least three detectors");
  }
  if (!(net.nu > 0.0) || !(net.T > 0.0) || !(net.lambda0 > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "nu, T and lambda0 must be positive");
  }
  if (!net.theta_region.valid()) {
    throw Error(ErrorCode::InvalidArgument, "empty parameter region");
  }
  for (std::size_t j = 0; j < net.size(); ++j) {
    if (!net.sensors[j].allFinite()) {
      throw Error(ErrorCode::InvalidArgument, "non-finite sensor coordinate");
    }
    if (!(domain_bounds(net, j).beta < net.T)) {
      throw Error(ErrorCode::InvalidArgument,
                  "detector " + std::to_string(j) + " may receive the signal after T");
    }
  }
  if (!collinearity_check(net.sensors)) {
    throw Error(ErrorCode::DegenerateGeometry, "all detectors lie on one line");
  }
}

double travel_time(const SensorNetwork& net, std::size_t j, const Point2& theta) {
  return (net.sensors[j] - theta).norm() / net.nu;
}

Eigen::Vector2d travel_time_gradient(const SensorNetwork& net, std::size_t j,
                                     const Point2& theta) {
  const Eigen::Vector2d to_sensor = net.sensors[j] - theta;
  const double d = to_sensor.norm();
  if (d == 0.0) {
    throw Error(ErrorCode::DegenerateGeometry,
                "source coincides with detector " + std::to_string(j));
  }
  return -to_sensor / (net.nu * d);
}

TimeWindow domain_bounds(const Point2& sensor, double nu, const Region& region) {
  const double nearest = (sensor - region.clamp(sensor)).norm();
  double farthest = 0.0;
  for (double x : {region.x_min, region.x_max}) {
    for (double y : {region.y_min, region.y_max}) {
      farthest = std::max(farthest, (sensor - Point2(x, y)).norm());
    }
  }
  return {nearest / nu, farthest / nu};
}

TimeWindow domain_bounds(const SensorNetwork& net, std::size_t j) {
  return domain_bounds(net.sensors[j], net.nu, net.theta_region);
}

bool collinearity_check(std::span<const Point2> sensors) {
  const std::size_t k = sensors.size();
  double diameter2 = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      diameter2 = std::max(diameter2, (sensors[i] - sensors[j]).squaredNorm());
    }
  }
  const double eps_area = 1e-9 * diameter2;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const Eigen::Vector2d e1 = sensors[j] - sensors[i];
      for (std::size_t l = j + 1; l < k; ++l) {
        const Eigen::Vector2d e2 = sensors[l] - sensors[i];
        const double area = 0.5 * std::abs(e1.x() * e2.y() - e1.y() * e2.x());
        if (area > eps_area) return true;
      }
    }
  }
  return false;
}

}  // namespace psloc
