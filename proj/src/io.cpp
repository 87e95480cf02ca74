#include "psloc/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "psloc/config.hpp"
#include "psloc/errors.hpp"

namespace psloc {
namespace {

using nlohmann::json;

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

json observation_to_json(const ObservationSet& obs) {
  json doc;
  if (obs.n == std::floor(obs.n) && std::abs(obs.n) < 9e15) {
    doc["n"] = static_cast<long long>(obs.n);
  } else {
    doc["n"] = obs.n;
  }
  doc["T"] = obs.T;
  if (obs.retention != 1.0) doc["retention"] = obs.retention;
  doc["events"] = obs.events;
  return doc;
}

ObservationSet observation_from_json(const json& doc) {
  ObservationSet obs;
  try {
    obs.n = doc.at("n").get<double>();
    obs.T = doc.at("T").get<double>();
    if (doc.contains("retention")) obs.retention = doc["retention"].get<double>();
    obs.events = doc.at("events").get<std::vector<std::vector<double>>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("observation file: ") + e.what());
  }
  validate(obs);
  return obs;
}

ObservationSet read_observation(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("observation file: ") + e.what());
  }
  return observation_from_json(doc);
}

void write_observation(const std::filesystem::path& path, const ObservationSet& obs) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << observation_to_json(obs).dump() << '\n';
}

json estimate_to_json(const EstimationResult& r) {
  json doc = {{"label", to_string(r.label)},
              {"theta", {r.theta.x(), r.theta.y()}},
              {"normalized_cov", to_json(Eigen::MatrixXd(r.normalized_cov))}};
  if (r.t) doc["t"] = *r.t;
  json diag = json::object();
  for (const auto& [k, v] : r.diagnostics) diag[k] = finite_or_null(v);
  doc["diagnostics"] = diag;
  return doc;
}

json report_to_json(const ExperimentReport& report, const ExperimentConfig& config,
                    bool include_timing) {
  json results = json::array();
  for (const MethodSummary& s : report.summaries) {
    json r = {{"method", to_string(s.method)},
              {"n", s.n},
              {"replications", s.successes},
              {"failures", s.failures},
              {"budget_exceeded", s.budget_exceeded()},
              {"truth", to_json(s.truth)}};
    if (s.successes > 0) {
      r["mean"] = to_json(s.mean);
      r["bias"] = to_json(s.bias);
      r["scaled_cov"] = to_json(s.scaled_cov);
      r["mse"] = finite_or_null(s.mse);
    }
    r["target"] = s.target ? to_json(*s.target) : json(nullptr);
    r["relative_deviation"] = finite_or_null(s.relative_deviation);
    if (s.position_cov) {
      json pos = {{"cov", to_json(Eigen::MatrixXd(*s.position_cov))}};
      pos["target"] =
          s.position_target ? to_json(Eigen::MatrixXd(*s.position_target)) : json(nullptr);
      pos["relative_deviation"] = finite_or_null(s.position_relative_deviation);
      r["position"] = pos;
    }
    if (s.normality) {
      r["normality"] = {{"ks_statistic", s.normality->ks_statistic},
                        {"ks_p_value", s.normality->ks_p_value},
                        {"coverage", s.normality->coverage},
                        {"samples", s.normality->samples}};
    }
    if (s.sanity_failure_rate) r["sanity_failure_rate"] = *s.sanity_failure_rate;
    if (!s.process.empty()) {
      json proc = json::array();
      for (const ProcessSummary& p : s.process) {
        proc.push_back({{"t", p.t},
                        {"ok", p.ok},
                        {"pre_arrival", p.pre_arrival},
                        {"degenerate", p.degenerate},
                        {"mean", {finite_or_null(p.mean.x()), finite_or_null(p.mean.y())}},
                        {"mean_info_det", p.mean_info_det}});
      }
      r["process"] = proc;
    }
    results.push_back(r);
  }

  json doc = {{"schema", 1}, {"config", config_to_json(config)}, {"results", results}};
  if (config.scales.size() >= 3) {
    json rates = json::object();
    for (Method m : config.methods) {
      try {
        const RateFit fit = rate_regression(report, m);
        rates[to_string(m)] = {
            {"slope", fit.slope}, {"slope_se", fit.slope_se}, {"intercept", fit.intercept}};
      } catch (const Error&) {
      }
    }
    doc["rates"] = rates;
  }
  if (include_timing) {
    json per_method = json::object();
    for (const MethodSummary& s : report.summaries) {
      per_method[std::string(to_string(s.method)) + "@" + fmt(s.n)] = s.seconds_total;
    }
    doc["timing"] = {{"wall_seconds", report.wall_seconds},
                     {"threads", report.threads},
                     {"method_seconds", per_method}};
  }
  return doc;
}

void write_runs_csv(std::ostream& out, const ExperimentReport& report) {
  out << "rep,method,n,x,y,status,seed\n";
  for (const ReplicationRecord& r : report.records) {
    for (const auto& [m, o] : r.outcomes) {
      if (!reports_position(m)) continue;
      out << r.rep << ',' << to_string(m) << ',' << fmt(r.n) << ',';
      if (o.ok) {
        out << fmt(o.estimate[0]) << ',' << fmt(o.estimate[1]);
      } else {
        out << ',';
      }
      out << ',' << (o.ok ? "ok" : o.status) << ',' << r.seed << '\n';
    }
  }
}

}  // namespace psloc
