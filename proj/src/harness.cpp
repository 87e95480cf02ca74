#include "psloc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <Eigen/LU>

#include "psloc/errors.hpp"
#include "psloc/likelihood.hpp"
#include "psloc/pp_sim.hpp"
#include "psloc/rng.hpp"

namespace psloc {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string status_slug(ErrorCode code) {
  std::string s = to_string(code);
  std::replace(s.begin(), s.end(), ' ', '_');
  return s;
}

Eigen::VectorXd truth_of(const ExperimentConfig& c, Method m) {
  const Point2& t = c.theta0;
  switch (m) {
    case Method::Mle:
    case Method::Bayes:
    case Method::OneStep: return t;
    case Method::Score: return Eigen::Vector2d::Zero();
    case Method::Lse: return Eigen::Vector3d(t.x(), t.y(), t.squaredNorm());
    case Method::Lse4: return Eigen::Vector4d(t.x(), t.y(), 0.0, t.squaredNorm());
    case Method::Arrival: {
      Eigen::VectorXd tau(static_cast<Eigen::Index>(c.network.size()));
      for (std::size_t j = 0; j < c.network.size(); ++j) {
        tau[static_cast<Eigen::Index>(j)] = travel_time(c.network, j, t);
      }
      return tau;
    }
  }
  return {};
}

}  // namespace

const char* to_string(Method m) noexcept {
  switch (m) {
    case Method::Mle: return "mle";
    case Method::Bayes: return "be";
    case Method::Lse: return "lse";
    case Method::OneStep: return "onestep";
    case Method::Arrival: return "arrival";
    case Method::Lse4: return "lse4";
    case Method::Score: return "score";
  }
  return "unknown";
}

bool reports_position(Method m) noexcept {
  return m == Method::Mle || m == Method::Bayes || m == Method::OneStep || m == Method::Lse ||
         m == Method::Lse4;
}

Method method_from_string(const std::string& s) {
  for (Method m : {Method::Mle, Method::Bayes, Method::Lse, Method::OneStep, Method::Arrival,
                   Method::Lse4, Method::Score}) {
    if (s == to_string(m)) return m;
  }
  throw Error(ErrorCode::Config, "unknown method '" + s + "'");
}

IntensityModel make_model(const IntensitySpec& spec) {
  if (spec.kind != "power_law") {
    throw Error(ErrorCode::Config, "unknown intensity kind '" + spec.kind + "'");
  }
  return IntensityModel(SignalShape(PowerLaw(spec.a, spec.kappa)));
}

void validate(const ExperimentConfig& c) {
  try {
    validate(c.network);
    make_model(c.intensity);
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, e.what());
  }
  if (!c.network.theta_region.contains(c.theta0)) {
    throw Error(ErrorCode::Config, "theta0 lies outside the parameter region");
  }
  if (c.replications < 1) throw Error(ErrorCode::Config, "replications must be >= 1");
  if (c.scales.empty()) throw Error(ErrorCode::Config, "no scales given");
  for (double n : c.scales) {
    if (!(n >= 2.0) || !std::isfinite(n)) throw Error(ErrorCode::Config, "scales must be >= 2");
  }
  if (c.methods.empty()) throw Error(ErrorCode::Config, "no methods given");
  if (!(c.thinning_b > 0.0 && c.thinning_b < 0.5)) {
    throw Error(ErrorCode::Config, "thinning_b must lie in (0, 1/2)");
  }
  if (!std::is_sorted(c.t_grid.begin(), c.t_grid.end()) ||
      (!c.t_grid.empty() && (!(c.t_grid.front() > 0.0) || c.t_grid.back() > c.network.T))) {
    throw Error(ErrorCode::Config, "t_grid must be sorted inside (0, T]");
  }
  if (!c.preliminary_detectors.empty()) {
    std::vector<Point2> pts;
    for (std::size_t j : c.preliminary_detectors) {
      if (j >= c.network.size()) throw Error(ErrorCode::Config, "preliminary detector index");
      pts.push_back(c.network.sensors[j]);
    }
    if (pts.size() < 3 || !collinearity_check(pts)) {
      throw Error(ErrorCode::Config, "preliminary detectors must be three non-collinear sensors");
    }
  }
}

std::uint64_t replication_seed(const ExperimentConfig& config, std::size_t scale_index,
                               std::size_t rep) {
  return derive_seed(config.seed, scale_index, rep, StreamPurpose::Replication);
}

ReplicationRecord run_replication(const ExperimentConfig& config, const IntensityModel& model,
                                  std::size_t scale_index, std::size_t rep) {
  const SensorNetwork& net = config.network;
  ReplicationRecord rec;
  rec.rep = rep;
  rec.n = config.scales.at(scale_index);
  rec.seed = replication_seed(config, scale_index, rep);

  const ObservationSet obs = sample_paths(net, model, config.theta0, rec.n, rec.seed);
  std::optional<ArrivalEstimates> arrivals;
  auto get_arrivals = [&]() -> const ArrivalEstimates& {
    if (!arrivals) arrivals = arrival_mles(net, model, obs);
    return *arrivals;
  };

  for (Method m : config.methods) {
    const auto start = Clock::now();
    MethodOutcome out;
    try {
      switch (m) {
        case Method::Mle: out.estimate = joint_mle(net, model, obs).theta; break;
        case Method::Bayes: out.estimate = bayes_estimate(net, model, obs).theta; break;
        case Method::Lse: {
          const LseResult r = lse_estimate(net, get_arrivals());
          out.estimate = r.gamma;
          out.s_n = r.s_n;
          break;
        }
        case Method::Arrival: out.estimate = get_arrivals().tau_hat; break;
        case Method::Lse4: out.estimate = lse_estimate_unknown_start(net, get_arrivals()).gamma; break;
        case Method::Score: out.estimate = score(net, model, config.theta0, obs); break;
        case Method::OneStep: {
          const ThinnedPair pair = thin(obs, thinning_probability(rec.n, config.thinning_b), rec.seed);
          const LseResult pre =
              lse_estimate(net, arrival_mles(net, model, pair.y), config.preliminary_detectors);
          std::vector<double> grid = config.t_grid;
          if (grid.empty() || grid.back() < net.T) grid.push_back(net.T);
          auto points = one_step_process(net, model, pre.theta_star, pair.x_tilde, grid);
          const OneStepPoint& last = points.back();
          if (last.status == OneStepStatus::Degenerate) {
            throw Error(ErrorCode::DegenerateInformation, "no information at T");
          }
          out.estimate = last.estimate.theta;
          if (config.t_grid.empty() || config.t_grid.back() < net.T) points.pop_back();
          out.process = std::move(points);
          break;
        }
      }
      out.ok = out.estimate.allFinite();
      if (!out.ok) out.status = "non_finite";
    } catch (const Error& e) {
      out.ok = false;
      out.status = status_slug(e.code());
    }
    rec.seconds[m] = seconds_since(start);
    rec.outcomes[m] = std::move(out);
  }
  return rec;
}

std::optional<Eigen::MatrixXd> target_covariance(const ExperimentConfig& config,
                                                 const IntensityModel& model, Method m) {
  const SensorNetwork& net = config.network;
  try {
    switch (m) {
      case Method::Mle:
      case Method::Bayes:
      case Method::OneStep:
        return Eigen::MatrixXd(fisher_matrix(net, model, config.theta0).matrix.inverse());
      case Method::Score: return Eigen::MatrixXd(fisher_matrix(net, model, config.theta0).matrix);
      case Method::Arrival:
        return Eigen::MatrixXd(arrival_fisher(net, model, config.theta0).sigma2().asDiagonal());
      case Method::Lse: {
        ArrivalEstimates exact;
        exact.tau_hat = truth_of(config, Method::Arrival);
        exact.sigma2 = arrival_fisher(net, model, config.theta0).sigma2();
        exact.window.resize(net.size());
        exact.flat.assign(net.size(), false);
        return Eigen::MatrixXd(lse_estimate(net, exact).D);
      }
      case Method::Lse4: return std::nullopt;
    }
  } catch (const Error&) {
  }
  return std::nullopt;
}

bool MethodSummary::budget_exceeded() const {
  const double total = static_cast<double>(successes + failures);
  return total > 0.0 && static_cast<double>(failures) > kFailureBudget * total;
}

const MethodSummary* ExperimentReport::find(Method m, double n) const {
  for (const auto& s : summaries) {
    if (s.method == m && s.n == n) return &s;
  }
  return nullptr;
}

bool ExperimentReport::budget_exceeded() const {
  return std::any_of(summaries.begin(), summaries.end(),
                     [](const MethodSummary& s) { return s.budget_exceeded(); });
}

MethodSummary summarize(const ExperimentConfig& config, const IntensityModel& model, Method m,
                        double n, const std::vector<const ReplicationRecord*>& records) {
  MethodSummary s;
  s.method = m;
  s.n = n;
  s.truth = truth_of(config, m);
  const double scale = (m == Method::Score) ? 1.0 : std::sqrt(n);

  std::vector<Eigen::VectorXd> estimates;
  std::vector<Eigen::Vector2d> scaled_positions;
  double sq_error = 0.0;
  std::size_t sanity_failures = 0;
  for (const ReplicationRecord* r : records) {
    if (auto it = r->seconds.find(m); it != r->seconds.end()) s.seconds_total += it->second;
    const auto it = r->outcomes.find(m);
    if (it == r->outcomes.end()) continue;
    const MethodOutcome& o = it->second;
    if (!o.ok) {
      ++s.failures;
      continue;
    }
    ++s.successes;
    estimates.push_back(o.estimate);
    sq_error += (o.estimate - s.truth).squaredNorm();
    if (m != Method::Arrival) {
      scaled_positions.push_back(scale * (o.estimate - s.truth).head<2>());
    }
    if (m == Method::Lse && !(o.s_n < std::pow(n, -0.25))) ++sanity_failures;
  }
  if (estimates.empty()) return s;

  const SampleMoments mom = sample_moments(estimates);
  s.mean = mom.mean;
  s.bias = mom.mean - s.truth;
  s.scaled_cov = scale * scale * mom.cov;
  s.mse = sq_error / static_cast<double>(estimates.size());
  s.target = target_covariance(config, model, m);
  if (s.target) s.relative_deviation = relative_deviation(s.scaled_cov, *s.target);

  if (m != Method::Arrival) {
    s.position_cov = s.scaled_cov.topLeftCorner<2, 2>();
    if (s.target) {
      s.position_target = s.target->topLeftCorner<2, 2>();
      s.position_relative_deviation = relative_deviation(*s.position_cov, *s.position_target);
      if (scaled_positions.size() >= 100) {
        try {
          s.normality = normality_diagnostics(scaled_positions, *s.position_target);
        } catch (const Error&) {
        }
      }
    }
  }
  if (m == Method::Lse) {
    s.sanity_failure_rate =
        static_cast<double>(sanity_failures) / static_cast<double>(estimates.size());
  }

  if (m == Method::OneStep) {
    const std::size_t points = config.t_grid.size();
    s.process.resize(points);
    std::vector<Point2> sums(points, Point2::Zero());
    for (std::size_t i = 0; i < points; ++i) s.process[i].t = config.t_grid[i];
    for (const ReplicationRecord* r : records) {
      const MethodOutcome& o = r->outcomes.at(m);
      if (!o.ok) continue;
      for (std::size_t i = 0; i < points && i < o.process.size(); ++i) {
        const OneStepPoint& pt = o.process[i];
        ProcessSummary& ps = s.process[i];
        switch (pt.status) {
          case OneStepStatus::Ok:
            ++ps.ok;
            sums[i] += pt.estimate.theta;
            ps.mean_info_det += pt.info_det;
            break;
          case OneStepStatus::PreArrival: ++ps.pre_arrival; break;
          case OneStepStatus::Degenerate: ++ps.degenerate; break;
        }
      }
    }
    for (std::size_t i = 0; i < points; ++i) {
      ProcessSummary& ps = s.process[i];
      if (ps.ok > 0) {
        ps.mean = sums[i] / static_cast<double>(ps.ok);
        ps.mean_info_det /= static_cast<double>(ps.ok);
      }
    }
  }
  return s;
}

ExperimentReport run_experiment(const ExperimentConfig& config, std::size_t threads) {
  validate(config);
  const IntensityModel model = make_model(config.intensity);
  const auto start = Clock::now();
  const std::size_t reps = config.replications;
  const std::size_t jobs = config.scales.size() * reps;

  ExperimentReport report;
  report.threads = std::max<std::size_t>(threads, 1);
  report.records.resize(jobs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= jobs) return;
      try {
        report.records[job] = run_replication(config, model, job / reps, job % reps);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(jobs);
      }
    }
  };
  if (report.threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < report.threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t si = 0; si < config.scales.size(); ++si) {
    std::vector<const ReplicationRecord*> slice;
    for (std::size_t r = 0; r < reps; ++r) slice.push_back(&report.records[si * reps + r]);
    for (Method m : config.methods) {
      report.summaries.push_back(summarize(config, model, m, config.scales[si], slice));
    }
  }
  report.wall_seconds = seconds_since(start);
  return report;
}

RateFit rate_regression(const ExperimentReport& report, Method m) {
  std::vector<std::pair<double, double>> points;
  for (const auto& s : report.summaries) {
    if (s.method == m && std::isfinite(s.mse)) points.emplace_back(s.n, s.mse);
  }
  std::sort(points.begin(), points.end());
  std::vector<double> n, mse;
  for (const auto& [a, b] : points) {
    n.push_back(a);
    mse.push_back(b);
  }
  return rate_regression(n, mse);
}

}  // namespace psloc
