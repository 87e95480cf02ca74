#include <cmath>
#include <limits>

#include "estimators_common.hpp"
#include "psloc/estimators.hpp"
#include "psloc/profile.hpp"

namespace psloc {

ArrivalEstimate arrival_mle(const SensorNetwork& net, const IntensityModel& model, std::size_t j,
                            const ObservationSet& obs) {
  detail::check_observation(net, obs);
  const SignalShape& shape = model.shape(j);
  ArrivalEstimate est;
  est.window = domain_bounds(net, j);
  const DelayMaximum max = maximize_delay_likelihood(shape, net.lambda0, net.T, obs.scale(),
                                                     obs.events[j], est.window);
  est.tau_hat = max.tau;
  est.flat = max.flat;
  if (max.flat) {
    est.sigma2 = std::numeric_limits<double>::infinity();
  } else if (shape.smooth()) {
    const double info = arrival_information(shape, net.lambda0, net.T, est.tau_hat);
    if (!(info > 0.0)) {
      throw Error(ErrorCode::ZeroInformation,
                  "no arrival information left after the estimate at detector " +
                      std::to_string(j));
    }
    est.sigma2 = 1.0 / info;
  } else {
    est.sigma2 = std::numeric_limits<double>::quiet_NaN();
  }
  return est;
}

ArrivalEstimates arrival_mles(const SensorNetwork& net, const IntensityModel& model,
                              const ObservationSet& obs) {
  detail::check_observation(net, obs);
  const auto k = static_cast<Eigen::Index>(net.size());
  ArrivalEstimates out;
  out.tau_hat.resize(k);
  out.sigma2.resize(k);
  out.scale = obs.scale();
  for (std::size_t j = 0; j < net.size(); ++j) {
    const ArrivalEstimate e = arrival_mle(net, model, j, obs);
    out.tau_hat[static_cast<Eigen::Index>(j)] = e.tau_hat;
    out.sigma2[static_cast<Eigen::Index>(j)] = e.sigma2;
    out.window.push_back(e.window);
    out.flat.push_back(e.flat);
  }
  return out;
}

double delay_sqrt_gamma2(double a, double lambda0, double T, double tau) {
  return a * a / (8.0 * (a * std::sqrt(T - tau) + lambda0));
}

DelaySqrtEstimate estimate_delay_sqrt_case(const PowerLaw& shape, double lambda0, double T,
                                           std::span<const double> events, double n,
                                           TimeWindow window) {
  if (shape.kappa() != 0.5) {
    throw Error(ErrorCode::InvalidArgument, "delay estimator for kappa = 1/2 got kappa = " +
                                                std::to_string(shape.kappa()));
  }
  if (!(n > 1.0)) throw Error(ErrorCode::InvalidArgument, "n must exceed 1");
  DelaySqrtEstimate est;
  est.tau_hat =
      maximize_delay_likelihood(SignalShape(shape), lambda0, T, n, events, window).tau;
  est.gamma2 = delay_sqrt_gamma2(shape.a(), lambda0, T, est.tau_hat);
  est.predicted_var = 1.0 / (est.gamma2 * n * std::log(n));
  return est;
}

}  // namespace psloc
