#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "psloc/estimators.hpp"
#include "psloc/geometry.hpp"
#include "psloc/signal_model.hpp"
#include "psloc/stats.hpp"

namespace psloc {

/// What one Monte Carlo replication computes.
///   mle, be     joint MLE / posterior mean of theta
///   lse         gamma* from arrival MLEs (position block reported separately)
///   onestep     LSE on the thinned part, one scoring step on the rest
///   arrival     vector of arrival MLEs
///   lse4        four-parameter LSE with unknown emission time
///   score       normalized score at the true theta
enum class Method { Mle, Bayes, Lse, OneStep, Arrival, Lse4, Score };

const char* to_string(Method m) noexcept;
Method method_from_string(const std::string& s);
/// True for methods whose estimate starts with a source position.
bool reports_position(Method m) noexcept;

struct IntensitySpec {
  std::string kind = "power_law";
  double a = 1.0;
  double kappa = 2.0;
};

IntensityModel make_model(const IntensitySpec& spec);

struct ExperimentConfig {
  SensorNetwork network;
  IntensitySpec intensity;
  Point2 theta0 = Point2::Zero();
  std::vector<double> scales;
  std::size_t replications = 1;
  std::uint64_t seed = 0;
  std::vector<Method> methods;
  double thinning_b = 0.4;
  std::vector<double> t_grid;
  /// Detectors feeding the preliminary LSE of the one-step method; empty
  /// means all of them.
  std::vector<std::size_t> preliminary_detectors;
};

/// Throws Config on any violated invariant.
void validate(const ExperimentConfig& config);

/// Seed of replication `rep` at scale index `scale_index`.
std::uint64_t replication_seed(const ExperimentConfig& config, std::size_t scale_index,
                               std::size_t rep);

struct MethodOutcome {
  bool ok = false;
  std::string status = "ok";
  Eigen::VectorXd estimate;
  double s_n = 0.0;                   ///< lse only
  std::vector<OneStepPoint> process;  ///< onestep along t_grid
};

struct ReplicationRecord {
  std::size_t rep = 0;
  double n = 0.0;
  std::uint64_t seed = 0;
  std::map<Method, MethodOutcome> outcomes;
  std::map<Method, double> seconds;
};

ReplicationRecord run_replication(const ExperimentConfig& config, const IntensityModel& model,
                                  std::size_t scale_index, std::size_t rep);

struct ProcessSummary {
  double t = 0.0;
  std::size_t ok = 0;
  std::size_t pre_arrival = 0;
  std::size_t degenerate = 0;
  Point2 mean = Point2::Constant(std::numeric_limits<double>::quiet_NaN());
  double mean_info_det = 0.0;
};

struct MethodSummary {
  Method method = Method::Mle;
  double n = 0.0;
  std::size_t successes = 0;
  std::size_t failures = 0;
  Eigen::VectorXd truth;
  Eigen::VectorXd mean;
  Eigen::VectorXd bias;
  Eigen::MatrixXd scaled_cov;  ///< n * Cov, or Cov of the already normalized score
  std::optional<Eigen::MatrixXd> target;
  double relative_deviation = std::numeric_limits<double>::quiet_NaN();
  double mse = std::numeric_limits<double>::quiet_NaN();  ///< mean squared error, unscaled
  /// Position block (lse: M against the gamma block), with normality checks.
  std::optional<Eigen::Matrix2d> position_cov;
  std::optional<Eigen::Matrix2d> position_target;
  double position_relative_deviation = std::numeric_limits<double>::quiet_NaN();
  std::optional<NormalityDiagnostics> normality;
  std::optional<double> sanity_failure_rate;  ///< lse: share with S_n >= n^{-1/4}
  std::vector<ProcessSummary> process;
  double seconds_total = 0.0;
  bool budget_exceeded() const;
};

struct ExperimentReport {
  std::vector<MethodSummary> summaries;
  std::vector<ReplicationRecord> records;  ///< ordered by (scale, rep)
  double wall_seconds = 0.0;
  std::size_t threads = 1;
  const MethodSummary* find(Method m, double n) const;
  bool budget_exceeded() const;
};

inline constexpr double kFailureBudget = 0.05;

/// Target n-scaled covariance of a method at the true theta, if the theory
/// gives one.
std::optional<Eigen::MatrixXd> target_covariance(const ExperimentConfig& config,
                                                 const IntensityModel& model, Method m);

/// Runs every (scale, replication) pair on `threads` workers. The result
/// does not depend on the thread count.
ExperimentReport run_experiment(const ExperimentConfig& config, std::size_t threads = 1);

/// Aggregates records of one scale; exposed for offline recomputation.
MethodSummary summarize(const ExperimentConfig& config, const IntensityModel& model, Method m,
                        double n, const std::vector<const ReplicationRecord*>& records);

/// Slope of log MSE against log n for one method across the report scales.
RateFit rate_regression(const ExperimentReport& report, Method m);

}  // namespace psloc
