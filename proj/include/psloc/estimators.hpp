#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "psloc/geometry.hpp"
#include "psloc/pp_sim.hpp"
#include "psloc/signal_model.hpp"

namespace psloc {

enum class EstimatorLabel { MLE, BE, LSE, OneStepProcess, OneStep };

const char* to_string(EstimatorLabel label) noexcept;

struct EstimationResult {
  EstimatorLabel label = EstimatorLabel::MLE;
  Point2 theta = Point2::Zero();
  Eigen::Matrix2d normalized_cov = Eigen::Matrix2d::Zero();
  std::map<std::string, double> diagnostics;
  std::optional<double> t;  ///< set for the estimator-process
};

struct ArrivalEstimate {
  double tau_hat = 0.0;
  double sigma2 = 0.0;  ///< NaN for non-smooth shapes, +inf when flat
  TimeWindow window;
  bool flat = false;
};

struct ArrivalEstimates {
  Eigen::VectorXd tau_hat;
  Eigen::VectorXd sigma2;
  std::vector<TimeWindow> window;
  std::vector<bool> flat;
  double scale = 1.0;  ///< observation scale the arrivals were estimated at

  std::size_t size() const { return static_cast<std::size_t>(tau_hat.size()); }
};

struct LseResult {
  Eigen::Vector3d gamma = Eigen::Vector3d::Zero();
  Point2 theta_star = Point2::Zero();
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  Eigen::MatrixXd C;
  Eigen::Matrix3d D = Eigen::Matrix3d::Zero();
  Eigen::Matrix2d M = Eigen::Matrix2d::Zero();
  double s_n = 0.0;
  double cond_A = 0.0;
  double scale = 1.0;

  /// S_n < n^{-1/4}
  bool sanity_passed() const;
  EstimationResult as_estimate() const;
};

struct LseUnknownStartResult {
  Eigen::Vector4d gamma = Eigen::Vector4d::Zero();
  Point2 theta = Point2::Zero();
  double emission_time = 0.0;
  double consistency_residual = 0.0;
  double cond = 0.0;
};

enum class OneStepStatus { Ok, PreArrival, Degenerate };

const char* to_string(OneStepStatus status) noexcept;

struct OneStepPoint {
  double t = 0.0;
  OneStepStatus status = OneStepStatus::Ok;
  EstimationResult estimate;
  double info_det = 0.0;
};

struct DelaySqrtEstimate {
  double tau_hat = 0.0;
  double gamma2 = 0.0;
  double predicted_var = 0.0;
};

enum class MleRefinement { Scoring, Simplex };

struct MleOptions {
  std::size_t grid_points = 25;
  MleRefinement refinement = MleRefinement::Scoring;
  std::size_t max_iterations = 200;
};

struct BayesOptions {
  std::size_t grid_points = 101;
  std::size_t profile_nodes = 24;
  std::size_t max_doublings = 3;
};

/// Prior density on Theta; empty means uniform.
using PriorDensity = std::function<double(const Point2&)>;

ArrivalEstimate arrival_mle(const SensorNetwork& net, const IntensityModel& model, std::size_t j,
                            const ObservationSet& obs);
ArrivalEstimates arrival_mles(const SensorNetwork& net, const IntensityModel& model,
                              const ObservationSet& obs);

EstimationResult joint_mle(const SensorNetwork& net, const IntensityModel& model,
                           const ObservationSet& obs, std::optional<Point2> init = std::nullopt,
                           const MleOptions& options = {});

EstimationResult bayes_estimate(const SensorNetwork& net, const IntensityModel& model,
                                const ObservationSet& obs, const PriorDensity& prior = {},
                                const BayesOptions& options = {});

/// Multilateration from squared arrival times; only the listed detectors
/// (all when empty) enter the linear system.
LseResult lse_estimate(const SensorNetwork& net, const ArrivalEstimates& arrivals,
                       const std::vector<std::size_t>& detectors = {});

LseUnknownStartResult lse_estimate_unknown_start(const SensorNetwork& net,
                                                 const ArrivalEstimates& arrivals);

/// One scoring step from `theta_pre` using the paths `x_tilde` observed up to
/// time t. `theta_pre` must not depend on `x_tilde`. Returns theta_pre before
/// the first arrival, throws DegenerateInformation while fewer than two
/// detectors carry information.
EstimationResult one_step(const SensorNetwork& net, const IntensityModel& model,
                          const Point2& theta_pre, const ObservationSet& x_tilde, double t);

/// one_step along a sorted time grid in a single pass over the events.
std::vector<OneStepPoint> one_step_process(const SensorNetwork& net, const IntensityModel& model,
                                           const Point2& theta_pre, const ObservationSet& x_tilde,
                                           const std::vector<double>& t_grid);

/// Single-detector delay estimate for the kappa = 1/2 onset, with the
/// predicted variance 1 / (gamma^2 n ln n).
DelaySqrtEstimate estimate_delay_sqrt_case(const PowerLaw& shape, double lambda0, double T,
                                           std::span<const double> events, double n,
                                           TimeWindow window);

/// gamma^2 = a^2 / (8 (a sqrt(T - tau) + lambda0))
double delay_sqrt_gamma2(double a, double lambda0, double T, double tau);

}  // namespace psloc
