#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "estimators_common.hpp"
#include "psloc/estimators.hpp"
#include "psloc/likelihood.hpp"

namespace psloc {
namespace {

struct Candidate {
  Point2 theta;
  double log_lik = -std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  bool converged = false;
};

bool on_boundary(const Region& r, const Point2& p) {
  return p.x() <= r.x_min || p.x() >= r.x_max || p.y() <= r.y_min || p.y() >= r.y_max;
}

// Projected Fisher scoring on the exact gradient.
Candidate refine_scoring(const SensorNetwork& net, const IntensityModel& model,
                         const ObservationSet& obs, const Point2& start, std::size_t max_iter) {
  const Region& region = net.theta_region;
  const double tol = 1e-10 * region.diameter();
  Candidate c{start};
  Point2 theta = start;
  for (std::size_t it = 0; it < max_iter; ++it) {
    c.iterations = it + 1;
    Eigen::Vector2d grad;
    Eigen::Matrix2d info;
    try {
      grad = log_likelihood_gradient(net, model, theta, obs);
      info = obs.scale() * fisher_matrix(net, model, theta).matrix;
    } catch (const Error&) {
      return c;
    }
    Eigen::LDLT<Eigen::Matrix2d> ldlt(info);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.vectorD().minCoeff() <= 0.0) {
      return c;
    }
    const Point2 next = region.clamp(theta + ldlt.solve(grad));
    const double moved = (next - theta).norm();
    theta = next;
    if (!theta.allFinite()) return c;
    if (moved < tol) {
      c.converged = true;
      break;
    }
  }
  c.theta = theta;
  if (c.converged) c.log_lik = log_likelihood(net, model, theta, obs);
  return c;
}

// Nelder-Mead on -ln L; points outside Theta score -inf.
Candidate refine_simplex(const SensorNetwork& net, const IntensityModel& model,
                         const ObservationSet& obs, const Point2& start, std::size_t max_iter) {
  const Region& region = net.theta_region;
  auto f = [&](const Point2& p) {
    if (!region.contains(p)) return -std::numeric_limits<double>::infinity();
    return log_likelihood(net, model, p, obs);
  };
  const double step = 0.05 * region.diameter();
  std::array<Point2, 3> v{start, start, start};
  v[1].x() += (start.x() + step <= region.x_max) ? step : -step;
  v[2].y() += (start.y() + step <= region.y_max) ? step : -step;
  std::array<double, 3> fv{f(v[0]), f(v[1]), f(v[2])};
  const double tol = 1e-9 * region.diameter();

  Candidate c{start};
  for (std::size_t it = 0; it < max_iter; ++it) {
    c.iterations = it + 1;
    // order: v[0] best, v[2] worst
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] > fv[b]; });
    const std::array<Point2, 3> vs{v[idx[0]], v[idx[1]], v[idx[2]]};
    const std::array<double, 3> fs{fv[idx[0]], fv[idx[1]], fv[idx[2]]};
    v = vs;
    fv = fs;
    const double spread = std::max((v[1] - v[0]).norm(), (v[2] - v[0]).norm());
    if (spread < tol) {
      c.converged = true;
      break;
    }
    const Point2 centroid = 0.5 * (v[0] + v[1]);
    const Point2 xr = centroid + (centroid - v[2]);
    const double fr = f(xr);
    if (fr > fv[0]) {
      const Point2 xe = centroid + 2.0 * (centroid - v[2]);
      const double fe = f(xe);
      if (fe > fr) {
        v[2] = xe;
        fv[2] = fe;
      } else {
        v[2] = xr;
        fv[2] = fr;
      }
    } else if (fr > fv[1]) {
      v[2] = xr;
      fv[2] = fr;
    } else {
      const bool outside = fr > fv[2];
      const Point2 xc = outside ? Point2(centroid + 0.5 * (xr - centroid))
                                : Point2(centroid + 0.5 * (v[2] - centroid));
      const double fc = f(xc);
      if (fc > (outside ? fr : fv[2])) {
        v[2] = xc;
        fv[2] = fc;
      } else {
        for (int i = 1; i < 3; ++i) {
          v[i] = v[0] + 0.5 * (v[i] - v[0]);
          fv[i] = f(v[i]);
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i < 3; ++i) {
    if (fv[i] > fv[best]) best = i;
  }
  c.theta = v[best];
  c.log_lik = fv[best];
  return c;
}

}  // namespace

EstimationResult joint_mle(const SensorNetwork& net, const IntensityModel& model,
                           const ObservationSet& obs, std::optional<Point2> init,
                           const MleOptions& options) {
  validate(net);
  detail::check_observation(net, obs);
  const Region& region = net.theta_region;
  const std::size_t g = std::max<std::size_t>(options.grid_points, 2);

  // Grid screen on lattice profiles; the lattice only needs to resolve the
  // grid spacing.
  const auto profiles = detail::lattice_profiles(net, model, obs, 2000.0);
  Point2 grid_best = region.center();
  double grid_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t k = 0; k < g; ++k) {
      const Point2 p(region.x_min + region.width() * static_cast<double>(i) / (g - 1),
                     region.y_min + region.height() * static_cast<double>(k) / (g - 1));
      const double v = detail::lattice_log_likelihood(net, profiles, p);
      if (v > grid_value) {
        grid_value = v;
        grid_best = p;
      }
    }
  }
  const double grid_exact = log_likelihood(net, model, grid_best, obs);

  std::vector<Point2> starts{grid_best};
  if (init) starts.push_back(region.clamp(*init));

  const bool scoring = options.refinement == MleRefinement::Scoring && model.smooth();
  Candidate best{grid_best, grid_exact};
  bool used_simplex = false;
  std::size_t iterations = 0;
  for (const Point2& s : starts) {
    Candidate c;
    if (scoring) {
      c = refine_scoring(net, model, obs, s, options.max_iterations);
      const double start_value = log_likelihood(net, model, s, obs);
      if (!c.converged || c.log_lik < start_value || on_boundary(region, c.theta)) {
        const Candidate nm =
            refine_simplex(net, model, obs, c.converged ? c.theta : s, 10 * options.max_iterations);
        used_simplex = true;
        if (nm.log_lik > c.log_lik) c = nm;
      }
    } else {
      c = refine_simplex(net, model, obs, s, 10 * options.max_iterations);
      used_simplex = true;
    }
    iterations += c.iterations;
    if (c.log_lik > best.log_lik) best = c;
  }
  if (!(best.log_lik >= grid_exact)) {
    throw Error(ErrorCode::OptimizerFailure, "refinement did not improve on the grid");
  }

  EstimationResult out;
  out.label = EstimatorLabel::MLE;
  out.theta = best.theta;
  out.normalized_cov.setConstant(std::numeric_limits<double>::quiet_NaN());
  if (model.smooth()) {
    try {
      const Eigen::Matrix2d info = fisher_matrix(net, model, best.theta).matrix;
      if (info.determinant() > 0.0) out.normalized_cov = info.inverse();
    } catch (const Error&) {
    }
  }
  out.diagnostics["log_likelihood"] = best.log_lik;
  out.diagnostics["grid_log_likelihood"] = grid_exact;
  out.diagnostics["iterations"] = static_cast<double>(iterations);
  out.diagnostics["simplex"] = used_simplex ? 1.0 : 0.0;
  return out;
}

}  // namespace psloc
