#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "psloc/errors.hpp"
#include "psloc/geometry.hpp"
#include "psloc/pp_sim.hpp"
#include "psloc/profile.hpp"
#include "psloc/signal_model.hpp"

namespace psloc::detail {

inline void check_observation(const SensorNetwork& net, const ObservationSet& obs) {
  if (obs.detectors() != net.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "observation has " + std::to_string(obs.detectors()) + " paths for " +
                    std::to_string(net.size()) + " detectors");
  }
}

// One lattice profile per detector over its arrival window, `divisions`
// lattice steps across the window.
inline std::vector<DelayProfile> lattice_profiles(const SensorNetwork& net,
                                                  const IntensityModel& model,
                                                  const ObservationSet& obs, double divisions) {
  std::vector<DelayProfile> out;
  out.reserve(net.size());
  for (std::size_t j = 0; j < net.size(); ++j) {
    const TimeWindow w = domain_bounds(net, j);
    const double spacing = std::max(w.width() / divisions, 1e-12 * net.T);
    out.push_back(scan_delay_profile(model.shape(j), net.lambda0, net.T, obs.scale(),
                                     obs.events[j], w, spacing));
  }
  return out;
}

inline double lattice_log_likelihood(const SensorNetwork& net,
                                     const std::vector<DelayProfile>& profiles,
                                     const Point2& theta) {
  double total = 0.0;
  for (std::size_t j = 0; j < net.size(); ++j) total += profiles[j].at(travel_time(net, j, theta));
  return total;
}

}  // namespace psloc::detail
