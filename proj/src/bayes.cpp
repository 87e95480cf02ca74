#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/LU>

#include "estimators_common.hpp"
#include "psloc/estimators.hpp"
#include "psloc/likelihood.hpp"
#include "psloc/quadrature.hpp"

namespace psloc {
namespace {

constexpr double kZoomDrop = 40.0;
constexpr double kEdgeDrop = 30.0;

struct GridPosterior {
  Region window;
  std::size_t points = 0;
  std::vector<double> log_w;  // row-major, index i * points + k
  double max_log_w = -std::numeric_limits<double>::infinity();

  Point2 node(std::size_t i, std::size_t k) const {
    const double d = static_cast<double>(points - 1);
    return {window.x_min + window.width() * static_cast<double>(i) / d,
            window.y_min + window.height() * static_cast<double>(k) / d};
  }
};

template <class LogLik>
GridPosterior evaluate(const Region& window, std::size_t points, const LogLik& log_lik,
                       const PriorDensity& prior) {
  GridPosterior g;
  g.window = window;
  g.points = points;
  g.log_w.resize(points * points);
  for (std::size_t i = 0; i < points; ++i) {
    for (std::size_t k = 0; k < points; ++k) {
      const Point2 p = g.node(i, k);
      double lw = log_lik(p);
      if (prior) {
        const double density = prior(p);
        if (!(density >= 0.0) || !std::isfinite(density)) {
          throw Error(ErrorCode::InvalidArgument, "prior density must be finite and >= 0");
        }
        lw += std::log(density);
      }
      g.log_w[i * points + k] = lw;
      if (lw > g.max_log_w) g.max_log_w = lw;
    }
  }
  if (!std::isfinite(g.max_log_w)) {
    throw Error(ErrorCode::Underflow, "posterior weights vanish on the whole grid");
  }
  return g;
}

// Bounding box of nodes within `drop` of the maximum, padded by one node and
// clipped to Theta.
Region mass_window(const GridPosterior& g, double drop, const Region& theta) {
  std::size_t i0 = g.points, i1 = 0, k0 = g.points, k1 = 0;
  for (std::size_t i = 0; i < g.points; ++i) {
    for (std::size_t k = 0; k < g.points; ++k) {
      if (g.log_w[i * g.points + k] >= g.max_log_w - drop) {
        i0 = std::min(i0, i);
        i1 = std::max(i1, i);
        k0 = std::min(k0, k);
        k1 = std::max(k1, k);
      }
    }
  }
  const Point2 lo = g.node(i0 > 0 ? i0 - 1 : 0, k0 > 0 ? k0 - 1 : 0);
  const Point2 hi = g.node(std::min(i1 + 1, g.points - 1), std::min(k1 + 1, g.points - 1));
  return {std::max(lo.x(), theta.x_min), std::min(hi.x(), theta.x_max),
          std::max(lo.y(), theta.y_min), std::min(hi.y(), theta.y_max)};
}

bool heavy_edge(const GridPosterior& g, const Region& theta) {
  const double cut = g.max_log_w - kEdgeDrop;
  const std::size_t last = g.points - 1;
  for (std::size_t m = 0; m < g.points; ++m) {
    if (g.window.x_min > theta.x_min && g.log_w[0 * g.points + m] > cut) return true;
    if (g.window.x_max < theta.x_max && g.log_w[last * g.points + m] > cut) return true;
    if (g.window.y_min > theta.y_min && g.log_w[m * g.points + 0] > cut) return true;
    if (g.window.y_max < theta.y_max && g.log_w[m * g.points + last] > cut) return true;
  }
  return false;
}

Region grow(const Region& w, const Region& theta) {
  const double hx = w.width(), hy = w.height();
  return {std::max(w.x_min - hx, theta.x_min), std::min(w.x_max + hx, theta.x_max),
          std::max(w.y_min - hy, theta.y_min), std::min(w.y_max + hy, theta.y_max)};
}

struct Moments {
  Point2 mean = Point2::Zero();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
};

// Trapezoid-weighted posterior moments in log-sum-exp form.
Moments moments(const GridPosterior& g) {
  double total = 0.0;
  Point2 first = Point2::Zero();
  Eigen::Matrix2d second = Eigen::Matrix2d::Zero();
  const std::size_t last = g.points - 1;
  for (std::size_t i = 0; i < g.points; ++i) {
    const double wi = (i == 0 || i == last) ? 0.5 : 1.0;
    for (std::size_t k = 0; k < g.points; ++k) {
      const double wk = (k == 0 || k == last) ? 0.5 : 1.0;
      const double w = wi * wk * std::exp(g.log_w[i * g.points + k] - g.max_log_w);
      const Point2 p = g.node(i, k);
      total += w;
      first += w * p;
      second += w * p * p.transpose();
    }
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw Error(ErrorCode::Underflow, "posterior normalizer underflowed");
  }
  Moments m;
  m.mean = first / total;
  m.cov = second / total - m.mean * m.mean.transpose();
  return m;
}

}  // namespace

EstimationResult bayes_estimate(const SensorNetwork& net, const IntensityModel& model,
                                const ObservationSet& obs, const PriorDensity& prior,
                                const BayesOptions& options) {
  validate(net);
  detail::check_observation(net, obs);
  if (options.grid_points < 3 || options.profile_nodes < 4) {
    throw Error(ErrorCode::InvalidArgument, "Bayes grid needs >= 3 points and >= 4 nodes");
  }
  const Region& theta = net.theta_region;
  const std::size_t g0 = options.grid_points;

  // Two zoom levels on lattice profiles locate the posterior mass.
  const auto profiles = detail::lattice_profiles(net, model, obs, 8000.0);
  auto lattice = [&](const Point2& p) { return detail::lattice_log_likelihood(net, profiles, p); };
  Region window = mass_window(evaluate(theta, g0, lattice, prior), kZoomDrop, theta);
  window = mass_window(evaluate(window, g0, lattice, prior), kZoomDrop, theta);

  // Final levels use exact per-detector likelihoods, interpolated in tau
  // over the travel-time range of the window.
  std::vector<ChebyshevInterpolant> exact(net.size());
  auto build = [&](const Region& w) {
    for (std::size_t j = 0; j < net.size(); ++j) {
      TimeWindow tw = domain_bounds(net.sensors[j], net.nu, w);
      const double pad = std::max(1e-9, 1e-6 * tw.width());
      const auto& events = obs.events[j];
      const SignalShape& shape = model.shape(j);
      exact[j] = ChebyshevInterpolant(
          [&](double tau) {
            return detector_log_likelihood(shape, net.lambda0, net.T, obs.scale(), tau, events);
          },
          tw.alpha - pad, std::min(tw.beta + pad, net.T), options.profile_nodes);
    }
  };
  auto interpolated = [&](const Point2& p) {
    double total = 0.0;
    for (std::size_t j = 0; j < net.size(); ++j) total += exact[j](travel_time(net, j, p));
    return total;
  };

  build(window);
  GridPosterior post = evaluate(window, g0, interpolated, prior);
  for (int grow_round = 0; grow_round < 8 && heavy_edge(post, theta); ++grow_round) {
    window = grow(window, theta);
    build(window);
    post = evaluate(window, g0, interpolated, prior);
  }
  Moments m = moments(post);
  std::size_t points = g0;
  std::size_t doublings = 0;
  const double tol = 1e-3 * theta.diameter();
  while (doublings < options.max_doublings) {
    points = 2 * points - 1;
    ++doublings;
    const Moments next = moments(evaluate(window, points, interpolated, prior));
    const double moved = (next.mean - m.mean).norm();
    m = next;
    if (moved < tol) break;
  }

  EstimationResult out;
  out.label = EstimatorLabel::BE;
  out.theta = m.mean;
  out.normalized_cov.setConstant(std::numeric_limits<double>::quiet_NaN());
  if (model.smooth()) {
    try {
      const Eigen::Matrix2d info = fisher_matrix(net, model, m.mean).matrix;
      if (info.determinant() > 0.0) out.normalized_cov = info.inverse();
    } catch (const Error&) {
    }
  }
  out.diagnostics["grid_points"] = static_cast<double>(points);
  out.diagnostics["doublings"] = static_cast<double>(doublings);
  out.diagnostics["posterior_var_x"] = m.cov(0, 0);
  out.diagnostics["posterior_var_y"] = m.cov(1, 1);
  out.diagnostics["posterior_cov_xy"] = m.cov(0, 1);
  out.diagnostics["window_width"] = window.width();
  out.diagnostics["window_height"] = window.height();
  return out;
}

}  // namespace psloc
