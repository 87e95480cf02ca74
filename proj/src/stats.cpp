#include "psloc/stats.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "psloc/errors.hpp"

namespace psloc {

SampleMoments sample_moments(const std::vector<Eigen::VectorXd>& samples) {
  if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "no samples");
  const Eigen::Index d = samples.front().size();
  SampleMoments m;
  m.count = samples.size();
  m.mean = Eigen::VectorXd::Zero(d);
  for (const auto& s : samples) {
    if (s.size() != d) throw Error(ErrorCode::InvalidArgument, "sample dimensions differ");
    m.mean += s;
  }
  m.mean /= static_cast<double>(m.count);
  m.cov = Eigen::MatrixXd::Zero(d, d);
  if (m.count < 2) return m;
  for (const auto& s : samples) {
    const Eigen::VectorXd c = s - m.mean;
    m.cov.noalias() += c * c.transpose();
  }
  m.cov /= static_cast<double>(m.count - 1);
  return m;
}

double relative_deviation(const Eigen::MatrixXd& empirical, const Eigen::MatrixXd& target) {
  return (empirical - target).norm() / target.norm();
}

double kolmogorov_p_value(double statistic, std::size_t samples) {
  const double rn = std::sqrt(static_cast<double>(samples));
  const double lambda = (rn + 0.12 + 0.11 / rn) * statistic;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0, sign = 1.0, previous = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = sign * 2.0 * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) <= 1e-3 * previous || std::abs(term) <= 1e-8 * sum) {
      return std::clamp(sum, 0.0, 1.0);
    }
    sign = -sign;
    previous = std::abs(term);
  }
  return 1.0;  // series did not settle, which only happens for tiny lambda
}

NormalityDiagnostics normality_diagnostics(const std::vector<Eigen::Vector2d>& samples,
                                           const Eigen::Matrix2d& target) {
  if (samples.size() < 100) {
    throw Error(ErrorCode::InvalidArgument, "normality diagnostics need >= 100 samples");
  }
  Eigen::LLT<Eigen::Matrix2d> llt(target);
  if (llt.info() != Eigen::Success || !target.allFinite()) {
    throw Error(ErrorCode::SingularTarget, "target covariance is not positive definite");
  }
  std::vector<double> d2;
  d2.reserve(samples.size());
  std::size_t inside = 0;
  for (const auto& s : samples) {
    const double v = llt.matrixL().solve(s).squaredNorm();
    d2.push_back(v);
    if (v <= kChi2Quantile95Dof2) ++inside;
  }
  std::sort(d2.begin(), d2.end());
  const double m = static_cast<double>(d2.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < d2.size(); ++i) {
    const double cdf = -std::expm1(-0.5 * d2[i]);
    ks = std::max({ks, static_cast<double>(i + 1) / m - cdf, cdf - static_cast<double>(i) / m});
  }
  NormalityDiagnostics out;
  out.samples = samples.size();
  out.ks_statistic = ks;
  out.ks_p_value = kolmogorov_p_value(ks, samples.size());
  out.coverage = static_cast<double>(inside) / m;
  return out;
}

RateFit rate_regression(const std::vector<double>& n, const std::vector<double>& mse) {
  if (n.size() != mse.size()) throw Error(ErrorCode::InvalidArgument, "length mismatch");
  if (n.size() < 3) throw Error(ErrorCode::InsufficientScales, "rate fit needs >= 3 scales");
  const auto k = static_cast<Eigen::Index>(n.size());
  Eigen::MatrixXd X(k, 2);
  Eigen::VectorXd y(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!(n[i] > 0.0) || !(mse[i] > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "rate fit needs positive n and mse");
    }
    X(i, 0) = 1.0;
    X(i, 1) = std::log(n[i]);
    y(i) = std::log(mse[i]);
  }
  const Eigen::Matrix2d xtx = X.transpose() * X;
  Eigen::LDLT<Eigen::Matrix2d> ldlt(xtx);
  if (!(std::abs(xtx.determinant()) > 0.0)) {
    throw Error(ErrorCode::InsufficientScales, "rate fit needs distinct scales");
  }
  const Eigen::Vector2d beta = ldlt.solve(X.transpose() * y);
  const double rss = (y - X * beta).squaredNorm();
  const double s2 = rss / static_cast<double>(k - 2);
  const Eigen::Matrix2d cov = s2 * ldlt.solve(Eigen::Matrix2d::Identity());
  RateFit fit;
  fit.intercept = beta(0);
  fit.slope = beta(1);
  fit.slope_se = std::sqrt(std::max(cov(1, 1), 0.0));
  return fit;
}

}  // namespace psloc
