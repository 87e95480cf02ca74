#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace psloc {

struct SampleMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;  ///< divisor M - 1; zero for a single sample
  std::size_t count = 0;
};

/// Two-pass mean and covariance of equally sized vectors.
SampleMoments sample_moments(const std::vector<Eigen::VectorXd>& samples);

/// ||empirical - target||_F / ||target||_F
double relative_deviation(const Eigen::MatrixXd& empirical, const Eigen::MatrixXd& target);

struct NormalityDiagnostics {
  double ks_statistic = 0.0;
  double ks_p_value = 0.0;
  double coverage = 0.0;  ///< fraction inside the 95% ellipse
  std::size_t samples = 0;
};

/// Squared Mahalanobis distances of 2-D samples under N(0, target) against
/// chi-square(2). Needs at least 100 samples; throws SingularTarget when the
/// target is not positive definite.
NormalityDiagnostics normality_diagnostics(const std::vector<Eigen::Vector2d>& samples,
                                           const Eigen::Matrix2d& target);

/// Asymptotic Kolmogorov p-value with the Stephens small-sample correction.
double kolmogorov_p_value(double statistic, std::size_t samples);

inline constexpr double kChi2Quantile95Dof2 = 5.991464547107979;

struct RateFit {
  double slope = 0.0;
  double slope_se = 0.0;
  double intercept = 0.0;
};

/// OLS fit of log(mse) on log(n). Throws InsufficientScales below 3 scales.
RateFit rate_regression(const std::vector<double>& n, const std::vector<double>& mse);

}  // namespace psloc
