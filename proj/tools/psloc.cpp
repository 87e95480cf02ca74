#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "psloc/config.hpp"
#include "psloc/errors.hpp"
#include "psloc/estimators.hpp"
#include "psloc/harness.hpp"
#include "psloc/io.hpp"
#include "psloc/likelihood.hpp"
#include "psloc/pp_sim.hpp"
#include "psloc/rng.hpp"

namespace {

using nlohmann::json;
using namespace psloc;

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Point2 parse_point(const std::string& text) {
  std::stringstream ss(text);
  double x = 0, y = 0;
  char comma = 0;
  if (!(ss >> x >> comma >> y) || comma != ',') {
    throw Error(ErrorCode::InvalidArgument, "expected x,y but got '" + text + "'");
  }
  return {x, y};
}

void emit(const json& doc, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out << doc.dump(2) << '\n';
}

int run_simulate(const std::string& config_path, const std::string& out_path,
                 std::optional<std::uint64_t> seed, std::optional<double> n) {
  const ExperimentConfig c = load_config(config_path);
  const ObservationSet obs = sample_paths(c.network, make_model(c.intensity), c.theta0,
                                          n.value_or(c.scales.front()), seed.value_or(c.seed));
  write_observation(out_path, obs);
  return 0;
}

int run_estimate(const std::string& config_path, const std::string& obs_path,
                 const std::string& method, std::optional<double> t, const std::string& out_path) {
  const ExperimentConfig c = load_config(config_path);
  const IntensityModel model = make_model(c.intensity);
  const ObservationSet obs = read_observation(obs_path);
  const SensorNetwork& net = c.network;
  const bool all = method == "all";
  json doc = json::object();
  if (all || method == "mle") doc["mle"] = estimate_to_json(joint_mle(net, model, obs));
  if (all || method == "be") doc["be"] = estimate_to_json(bayes_estimate(net, model, obs));
  if (all || method == "lse") {
    const LseResult r = lse_estimate(net, arrival_mles(net, model, obs));
    json j = estimate_to_json(r.as_estimate());
    j["gamma"] = {r.gamma(0), r.gamma(1), r.gamma(2)};
    j["D"] = matrix_json(r.D);
    doc["lse"] = j;
  }
  if (all || method == "onestep") {
    const double p = thinning_probability(obs.n, c.thinning_b);
    const ThinnedPair pair = thin(obs, p, c.seed);
    const LseResult pre =
        lse_estimate(net, arrival_mles(net, model, pair.y), c.preliminary_detectors);
    const double at = t.value_or(net.T);
    std::vector<double> grid = c.t_grid;
    grid.erase(std::remove_if(grid.begin(), grid.end(), [&](double s) { return s >= at; }),
               grid.end());
    grid.push_back(at);
    const auto points = one_step_process(net, model, pre.theta_star, pair.x_tilde, grid);
    json process = json::array();
    for (const OneStepPoint& pt : points) {
      json e = estimate_to_json(pt.estimate);
      e["status"] = to_string(pt.status);
      process.push_back(e);
    }
    doc["onestep"] = {{"thinning_p", p},
                      {"preliminary", {pre.theta_star.x(), pre.theta_star.y()}},
                      {"process", process}};
  }
  if (doc.empty()) throw Error(ErrorCode::InvalidArgument, "unknown method '" + method + "'");
  emit(doc, out_path);
  return 0;
}

int run_experiment_cmd(const std::string& config_path, const std::string& out_path,
                       const std::string& csv_path, std::size_t threads, bool timing) {
  const ExperimentConfig c = load_config(config_path);
  const ExperimentReport report = run_experiment(c, threads);
  emit(report_to_json(report, c, timing), out_path);
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    if (!csv) throw Error(ErrorCode::InvalidArgument, "cannot write " + csv_path);
    write_runs_csv(csv, report);
  }
  if (report.budget_exceeded()) {
    std::cerr << "replication failures exceeded the " << kFailureBudget * 100
              << "% budget\n";
    return 3;
  }
  return 0;
}

int run_fisher(const std::string& config_path, const std::string& theta_text,
               std::optional<double> t, const std::string& obs_path) {
  const ExperimentConfig c = load_config(config_path);
  const IntensityModel model = make_model(c.intensity);
  const SensorNetwork& net = c.network;
  const Point2 theta = theta_text.empty() ? c.theta0 : parse_point(theta_text);
  const FisherInfo full = fisher_matrix(net, model, theta);
  json doc = {{"theta", {theta.x(), theta.y()}},
              {"I", matrix_json(full.matrix)},
              {"I_inverse", matrix_json(full.matrix.inverse())},
              {"min_eigenvalue", full.min_eigenvalue()}};
  if (t) {
    const FisherInfo trunc = fisher_matrix(net, model, theta, *t);
    doc["t"] = *t;
    doc["I_t"] = matrix_json(trunc.matrix);
    doc["I_t_det"] = trunc.determinant();
  }
  const ArrivalFisher af = arrival_fisher(net, model, theta);
  doc["arrival_information"] = std::vector<double>(af.diag.data(), af.diag.data() + af.diag.size());
  const Eigen::VectorXd s2 = af.sigma2();
  doc["arrival_sigma2"] = std::vector<double>(s2.data(), s2.data() + s2.size());
  if (!obs_path.empty()) {
    const ObservationSet obs = read_observation(obs_path);
    const Score sc = score(net, model, theta, obs);
    doc["score"] = {sc.x(), sc.y()};
    doc["score_mahalanobis2"] = sc.dot(full.matrix.ldlt().solve(sc));
    doc["log_likelihood"] = log_likelihood(net, model, theta, obs);
  }
  emit(doc, "");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson source localization from detector event times"};
  app.require_subcommand(1);

  std::string config, out, obs, csv, method = "all", theta;
  std::optional<std::uint64_t> seed;
  std::optional<double> n, t;
  std::size_t threads = 1;
  bool no_timing = false;

  auto* sim = app.add_subcommand("simulate", "draw detector paths at the configured truth");
  sim->add_option("--config", config, "experiment config (TOML or JSON)")->required();
  sim->add_option("--out", out, "observation JSON")->required();
  sim->add_option("--seed", seed, "seed (default: config seed)");
  sim->add_option("--n", n, "intensity scale (default: first configured scale)");

  auto* est = app.add_subcommand("estimate", "estimate the source position from a path file");
  est->add_option("--config", config)->required();
  est->add_option("--obs", obs, "observation JSON")->required();
  est->add_option("--method", method)
      ->check(CLI::IsMember({"mle", "be", "lse", "onestep", "all"}));
  est->add_option("--t", t, "observation time for the one-step process (default T)");
  est->add_option("--out", out, "output JSON (default stdout)");

  auto* exp = app.add_subcommand("experiment", "Monte Carlo experiment");
  exp->add_option("--config", config)->required();
  exp->add_option("--out", out, "report JSON")->required();
  exp->add_option("--csv", csv, "per-replication estimates");
  exp->add_option("--threads", threads)->check(CLI::PositiveNumber);
  exp->add_flag("--no-timing", no_timing, "omit wall-clock numbers from the report");

  auto* fis = app.add_subcommand("fisher", "Fisher information at a parameter value");
  fis->add_option("--config", config)->required();
  fis->add_option("--theta", theta, "x,y (default: configured theta0)");
  fis->add_option("--t", t, "truncation time for I_t");
  fis->add_option("--obs", obs, "observation JSON for score diagnostics");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*sim) return run_simulate(config, out, seed, n);
    if (*est) return run_estimate(config, obs, method, t, out);
    if (*exp) return run_experiment_cmd(config, out, csv, threads, !no_timing);
    if (*fis) return run_fisher(config, theta, t, obs);
  } catch (const std::exception& e) {
    std::cerr << "psloc: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
