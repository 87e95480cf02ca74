#include "psloc/pp_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "psloc/errors.hpp"
#include "psloc/rng.hpp"

namespace psloc {
namespace {

// Expected number of candidate points per majorant piece.
constexpr double kCandidatesPerPiece = 32.0;
constexpr std::size_t kMaxPieces = std::size_t{1} << 24;

std::size_t piece_count(double expected) {
  const double p = std::ceil(expected / kCandidatesPerPiece);
  return static_cast<std::size_t>(std::clamp(p, 1.0, static_cast<double>(kMaxPieces)));
}

// Appends the events of a Poisson process on [lo, hi) with intensity
// rate(t) <= bound(a, b) on every piece [a, b). Candidates come from
// exponential gaps at the piece majorant, so the output is already sorted.
template <class Rate, class Bound>
void sample_segment(Stream& rng, double lo, double hi, std::size_t pieces, const Rate& rate,
                    const Bound& bound, std::vector<double>& out) {
  const double width = (hi - lo) / static_cast<double>(pieces);
  for (std::size_t i = 0; i < pieces; ++i) {
    const double a = lo + width * static_cast<double>(i);
    const double b = (i + 1 == pieces) ? hi : a + width;
    const double major = bound(a, b);
    if (!(major > 0.0)) continue;
    const double inv_major = 1.0 / major;
    double t = a;
    for (;;) {
      t -= std::log(1.0 - rng.uniform()) * inv_major;
      if (t >= b) break;
      if (rng.uniform() * major < rate(t)) out.push_back(t);
    }
  }
}

}  // namespace

std::size_t ObservationSet::total_events() const {
  std::size_t total = 0;
  for (const auto& e : events) total += e.size();
  return total;
}

void validate(const ObservationSet& obs) {
  if (!(obs.n > 0.0) || !(obs.T > 0.0) || !(obs.retention > 0.0 && obs.retention <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "observation scale, horizon or retention invalid");
  }
  for (std::size_t j = 0; j < obs.events.size(); ++j) {
    const auto& e = obs.events[j];
    if (!std::is_sorted(e.begin(), e.end())) {
      throw Error(ErrorCode::InvalidArgument,
                  "events of detector " + std::to_string(j) + " are not sorted");
    }
    if (!e.empty() && (!(e.front() >= 0.0) || !(e.back() <= obs.T))) {
      throw Error(ErrorCode::InvalidArgument,
                  "events of detector " + std::to_string(j) + " fall outside [0, T]");
    }
  }
}

std::vector<double> sample_path(const SignalShape& shape, double lambda0, double T, double tau,
                                double n, std::uint64_t seed) {
  if (!(n > 0.0) || !(lambda0 > 0.0) || !(T > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "scale, noise level and horizon must be positive");
  }
  tau = std::clamp(tau, 0.0, T);
  if (!std::isfinite(shape.supremum(0.0, T - tau))) {
    throw Error(ErrorCode::UnboundedIntensity, "onset intensity is unbounded");
  }
  Stream rng(seed);
  const double noise = n * lambda0;
  std::vector<double> out;
  const double expected = n * (lambda0 * T + shape.integral(T - tau));
  if (std::isfinite(expected)) {
    out.reserve(static_cast<std::size_t>(expected + 6.0 * std::sqrt(expected) + 16.0));
  }
  if (tau > 0.0) {
    sample_segment(
        rng, 0.0, tau, piece_count(noise * tau), [noise](double) { return noise; },
        [noise](double, double) { return noise; }, out);
  }
  if (tau < T) {
    const double peak = shape.supremum(0.0, T - tau);
    const auto pieces = piece_count(n * (peak + lambda0) * (T - tau));
    shape.visit([&](const auto& s) {
      sample_segment(
          rng, tau, T, pieces, [&](double t) { return n * (s.value(t - tau) + lambda0); },
          [&](double a, double b) { return n * (s.supremum(a - tau, b - tau) + lambda0); }, out);
    });
  }
  return out;
}

ObservationSet sample_paths(const SensorNetwork& net, const IntensityModel& model,
                            const Point2& theta0, double n, std::uint64_t seed) {
  if (!(n > 0.0)) throw Error(ErrorCode::InvalidArgument, "scale n must be positive");
  ObservationSet obs;
  obs.n = n;
  obs.T = net.T;
  obs.events.resize(net.size());
  for (std::size_t j = 0; j < net.size(); ++j) {
    const SignalShape& shape = model.shape(j);
    const double reach = net.T - domain_bounds(net, j).alpha;
    if (!std::isfinite(shape.supremum(0.0, reach))) {
      throw Error(ErrorCode::UnboundedIntensity,
                  "onset of detector " + std::to_string(j) + " is unbounded");
    }
    obs.events[j] = sample_path(shape, net.lambda0, net.T, travel_time(net, j, theta0), n,
                                derive_seed(seed, j, 0, StreamPurpose::Paths));
  }
  return obs;
}

ThinnedPair thin(const ObservationSet& obs, double p, std::uint64_t seed) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "thinning probability must lie in (0, 1)");
  }
  ThinnedPair pair;
  pair.p = p;
  pair.y = ObservationSet{obs.n, obs.T, obs.retention * p, {}};
  pair.x_tilde = ObservationSet{obs.n, obs.T, obs.retention * (1.0 - p), {}};
  pair.y.events.resize(obs.events.size());
  pair.x_tilde.events.resize(obs.events.size());
  for (std::size_t j = 0; j < obs.events.size(); ++j) {
    Stream rng(derive_seed(seed, j, 0, StreamPurpose::Thinning));
    const auto& src = obs.events[j];
    auto& y = pair.y.events[j];
    auto& x = pair.x_tilde.events[j];
    y.reserve(static_cast<std::size_t>(static_cast<double>(src.size()) * p * 1.2) + 16);
    x.reserve(src.size());
    for (double t : src) {
      (rng.uniform() < p ? y : x).push_back(t);
    }
  }
  return pair;
}

double thinning_probability(double n, double b) {
  if (!(n >= 2.0)) throw Error(ErrorCode::InvalidArgument, "thinning needs n >= 2");
  if (!(b > 0.0 && b < 0.5)) throw Error(ErrorCode::InvalidArgument, "b must lie in (0, 1/2)");
  return std::pow(n, -b);
}

}  // namespace psloc
