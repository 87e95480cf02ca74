#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "estimators_common.hpp"
#include "psloc/estimators.hpp"

namespace psloc {

std::vector<OneStepPoint> one_step_process(const SensorNetwork& net, const IntensityModel& model,
                                           const Point2& theta_pre, const ObservationSet& x_tilde,
                                           const std::vector<double>& t_grid) {
  detail::check_observation(net, x_tilde);
  if (!model.smooth()) {
    throw Error(ErrorCode::NonSmoothModel, "one-step correction needs kappa > 1/2");
  }
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) {
    throw Error(ErrorCode::InvalidArgument, "time grid must be sorted");
  }
  if (!t_grid.empty() && (!(t_grid.front() > 0.0) || !(t_grid.back() <= net.T))) {
    throw Error(ErrorCode::InvalidArgument, "time grid must lie in (0, T]");
  }
  const std::size_t k = net.size();
  const double scale = x_tilde.scale();
  std::vector<double> tau(k), sum(k, 0.0);
  std::vector<Eigen::Vector2d> grad(k);
  std::vector<std::size_t> cursor(k);
  for (std::size_t j = 0; j < k; ++j) {
    tau[j] = travel_time(net, j, theta_pre);
    grad[j] = travel_time_gradient(net, j, theta_pre);
    const auto& ev = x_tilde.events[j];
    cursor[j] = static_cast<std::size_t>(std::upper_bound(ev.begin(), ev.end(), tau[j]) -
                                         ev.begin());
  }
  const double first_arrival = *std::min_element(tau.begin(), tau.end());

  std::vector<OneStepPoint> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    // running sums of lambda'/(lambda + lambda0) over events in (tau_j, t]
    for (std::size_t j = 0; j < k; ++j) {
      const auto& ev = x_tilde.events[j];
      const SignalShape& shape = model.shape(j);
      std::size_t c = cursor[j];
      // accumulate in place so every grid reproduces the same rounding
      sum[j] = shape.visit([&](const auto& s) {
        double acc = sum[j];
        for (; c < ev.size() && ev[c] <= t; ++c) {
          const double u = ev[c] - tau[j];
          acc += s.derivative(u) / (s.value(u) + net.lambda0);
        }
        return acc;
      });
      cursor[j] = c;
    }

    OneStepPoint pt;
    pt.t = t;
    pt.estimate.label = EstimatorLabel::OneStepProcess;
    pt.estimate.t = t;
    pt.estimate.theta = theta_pre;
    pt.estimate.normalized_cov.setConstant(std::numeric_limits<double>::quiet_NaN());
    if (t <= first_arrival) {
      pt.status = OneStepStatus::PreArrival;
      out.push_back(std::move(pt));
      continue;
    }
    const Eigen::Matrix2d info = fisher_matrix(net, model, theta_pre, t).matrix;
    pt.info_det = info.determinant();
    const double trace = info.trace();
    if (!(trace > 0.0) || !(pt.info_det > 1e-10 * trace * trace)) {
      pt.status = OneStepStatus::Degenerate;
      out.push_back(std::move(pt));
      continue;
    }
    // The compensator integral of lambda' / (lambda + lambda0) against
    // scale * (lambda + lambda0) is scale * lambda(t - tau).
    Eigen::Vector2d u = Eigen::Vector2d::Zero();
    for (std::size_t j = 0; j < k; ++j) {
      if (t <= tau[j]) continue;
      u -= grad[j] * (sum[j] - scale * model.shape(j).value(t - tau[j]));
    }
    const Eigen::Matrix2d info_inv = info.inverse();
    pt.estimate.theta = theta_pre + info_inv * u / scale;
    pt.estimate.normalized_cov = info_inv;
    pt.estimate.diagnostics["info_det"] = pt.info_det;
    out.push_back(std::move(pt));
  }
  return out;
}

EstimationResult one_step(const SensorNetwork& net, const IntensityModel& model,
                          const Point2& theta_pre, const ObservationSet& x_tilde, double t) {
  auto points = one_step_process(net, model, theta_pre, x_tilde, {t});
  OneStepPoint& pt = points.front();
  if (pt.status == OneStepStatus::Degenerate) {
    throw Error(ErrorCode::DegenerateInformation,
                "fewer than two detectors carry information at t");
  }
  pt.estimate.label = EstimatorLabel::OneStep;
  return pt.estimate;
}

}  // namespace psloc
