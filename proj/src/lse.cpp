#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "psloc/errors.hpp"
#include "psloc/estimators.hpp"

namespace psloc {
namespace {

constexpr double kMaxCondition = 1e10;

template <class M>
double condition_number(const M& m) {
  const Eigen::MatrixXd dense = m;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense);
  const auto& s = svd.singularValues();
  const double smallest = s(s.size() - 1);
  return smallest > 0.0 ? s(0) / smallest : std::numeric_limits<double>::infinity();
}

}  // namespace

bool LseResult::sanity_passed() const {
  return s_n < std::pow(scale, -0.25);
}

EstimationResult LseResult::as_estimate() const {
  EstimationResult out;
  out.label = EstimatorLabel::LSE;
  out.theta = theta_star;
  out.normalized_cov = M;
  out.diagnostics["s_n"] = s_n;
  out.diagnostics["cond_A"] = cond_A;
  out.diagnostics["sanity_passed"] = sanity_passed() ? 1.0 : 0.0;
  return out;
}

LseResult lse_estimate(const SensorNetwork& net, const ArrivalEstimates& arrivals,
                       const std::vector<std::size_t>& detectors) {
  if (arrivals.size() != net.size()) {
    throw Error(ErrorCode::InvalidArgument, "arrival vector does not match the network");
  }
  std::vector<std::size_t> use = detectors;
  if (use.empty()) {
    use.resize(net.size());
    std::iota(use.begin(), use.end(), std::size_t{0});
  }
  if (use.size() < 3) throw Error(ErrorCode::InvalidArgument, "LSE needs three detectors");

  LseResult r;
  r.scale = arrivals.scale;
  const double nu2 = net.nu * net.nu;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  Eigen::Vector3d z = Eigen::Vector3d::Zero();
  r.C.resize(static_cast<Eigen::Index>(use.size()), 3);
  for (std::size_t m = 0; m < use.size(); ++m) {
    const std::size_t j = use[m];
    if (j >= net.size()) throw Error(ErrorCode::InvalidArgument, "detector index out of range");
    const double x = net.sensors[j].x(), y = net.sensors[j].y();
    const double tau = arrivals.tau_hat[static_cast<Eigen::Index>(j)];
    const double resid = nu2 * tau * tau - (x * x + y * y);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    z += resid * Eigen::Vector3d(1.0, x, y);
    const double c = 2.0 * nu2 * tau * std::sqrt(arrivals.sigma2[static_cast<Eigen::Index>(j)]);
    r.C.row(static_cast<Eigen::Index>(m)) << c, c * x, c * y;
  }
  const double k = static_cast<double>(use.size());
  r.A << -2 * sx, -2 * sy, k,
         -2 * sxx, -2 * sxy, sx,
         -2 * sxy, -2 * syy, sy;
  r.cond_A = condition_number(r.A);
  if (!(r.cond_A <= kMaxCondition)) {
    throw Error(ErrorCode::SingularDesign, "multilateration system is singular");
  }
  const Eigen::Matrix3d a_inv = r.A.inverse();
  r.gamma = a_inv * z;
  r.theta_star = r.gamma.head<2>();
  r.D = a_inv * r.C.transpose() * r.C * a_inv.transpose();
  r.M = r.D.topLeftCorner<2, 2>();
  r.s_n = std::abs(r.gamma(2) - r.gamma(0) * r.gamma(0) - r.gamma(1) * r.gamma(1));
  return r;
}

LseUnknownStartResult lse_estimate_unknown_start(const SensorNetwork& net,
                                                 const ArrivalEstimates& arrivals) {
  const auto k = static_cast<Eigen::Index>(net.size());
  if (k < 4) throw Error(ErrorCode::InvalidArgument, "unknown emission time needs four detectors");
  if (arrivals.size() != net.size()) {
    throw Error(ErrorCode::InvalidArgument, "arrival vector does not match the network");
  }
  // nu^2 (tau_j - t0)^2 = |s_j - theta|^2 is linear in
  // (theta_x, theta_y, t0, |theta|^2 - nu^2 t0^2).
  const double nu2 = net.nu * net.nu;
  Eigen::MatrixXd G(k, 4);
  Eigen::VectorXd b(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const Point2& s = net.sensors[static_cast<std::size_t>(j)];
    const double tau = arrivals.tau_hat[j];
    G.row(j) << -2 * s.x(), -2 * s.y(), 2 * nu2 * tau, 1.0;
    b[j] = nu2 * tau * tau - s.squaredNorm();
  }
  const Eigen::Matrix4d normal = G.transpose() * G;
  LseUnknownStartResult r;
  r.cond = condition_number(normal);
  if (!(r.cond <= 1e12)) {
    throw Error(ErrorCode::SingularDesign, "design with unknown emission time is singular");
  }
  r.gamma = normal.ldlt().solve(G.transpose() * b);
  r.theta = r.gamma.head<2>();
  r.emission_time = r.gamma(2);
  r.consistency_residual =
      std::abs(r.gamma(3) - r.theta.squaredNorm() + nu2 * r.emission_time * r.emission_time);
  return r;
}

}  // namespace psloc
