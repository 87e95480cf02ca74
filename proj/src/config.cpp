#include "psloc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "psloc/errors.hpp"

namespace psloc {
namespace {

using nlohmann::json;

json node_to_json(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    json out = json::object();
    for (const auto& [key, value] : *t) out[std::string(key.str())] = node_to_json(value);
    return out;
  }
  if (const auto* a = node.as_array()) {
    json out = json::array();
    for (const auto& value : *a) out.push_back(node_to_json(value));
    return out;
  }
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  if (const auto* v = node.as_string()) return v->get();
  throw Error(ErrorCode::Config, "unsupported TOML value (dates are not accepted)");
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(ErrorCode::Config, "missing key '" + where + "." + key + "'");
  }
  return obj.at(key);
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known,
                    const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorCode::Config, "'" + where + "' must be a table");
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw Error(ErrorCode::Config, "unknown key '" + where + "." + key + "'");
    }
  }
}

double number(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number()) throw Error(ErrorCode::Config, "'" + where + "." + key + "' must be a number");
  return v.get<double>();
}

Point2 point(const json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw Error(ErrorCode::Config, "'" + what + "' must be a pair of numbers");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<double> numbers(const json& v, const std::string& what) {
  if (!v.is_array()) throw Error(ErrorCode::Config, "'" + what + "' must be an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw Error(ErrorCode::Config, "'" + what + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

// First sensor triple that is not collinear.
std::vector<std::size_t> first_triangle(const SensorNetwork& net) {
  const std::size_t k = net.size();
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      for (std::size_t c = b + 1; c < k; ++c) {
        const std::vector<Point2> tri{net.sensors[a], net.sensors[b], net.sensors[c]};
        if (collinearity_check(tri)) return {a, b, c};
      }
    }
  }
  throw Error(ErrorCode::Config, "no three non-collinear detectors");
}

}  // namespace

nlohmann::json toml_to_json(const std::string& text) {
  try {
    return node_to_json(toml::parse(text));
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "TOML parse error: " << e.description() << " at line " << e.source().begin.line;
    throw Error(ErrorCode::Config, msg.str());
  }
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  reject_unknown(doc, {"network", "intensity", "experiment"}, "config");
  ExperimentConfig c;
  try {
    const json& net = require(doc, "network", "config");
    reject_unknown(net, {"sensors", "nu", "T", "lambda0", "region"}, "network");
    const json& sensors = require(net, "sensors", "network");
    if (!sensors.is_array()) throw Error(ErrorCode::Config, "'network.sensors' must be an array");
    for (const auto& s : sensors) c.network.sensors.push_back(point(s, "network.sensors[]"));
    c.network.nu = number(net, "nu", "network");
    c.network.T = number(net, "T", "network");
    c.network.lambda0 = number(net, "lambda0", "network");
    const json& region = require(net, "region", "network");
    reject_unknown(region, {"x_min", "x_max", "y_min", "y_max"}, "network.region");
    c.network.theta_region = {number(region, "x_min", "network.region"),
                              number(region, "x_max", "network.region"),
                              number(region, "y_min", "network.region"),
                              number(region, "y_max", "network.region")};

    const json& in = require(doc, "intensity", "config");
    reject_unknown(in, {"kind", "a", "kappa"}, "intensity");
    if (in.contains("kind")) {
      if (!in["kind"].is_string()) throw Error(ErrorCode::Config, "'intensity.kind' must be text");
      c.intensity.kind = in["kind"].get<std::string>();
    }
    c.intensity.a = number(in, "a", "intensity");
    c.intensity.kappa = number(in, "kappa", "intensity");

    const json& ex = require(doc, "experiment", "config");
    reject_unknown(ex,
                   {"theta0", "scales", "replications", "seed", "methods", "thinning_b", "t_grid",
                    "preliminary_detectors"},
                   "experiment");
    c.theta0 = point(require(ex, "theta0", "experiment"), "experiment.theta0");
    c.scales = numbers(require(ex, "scales", "experiment"), "experiment.scales");
    const json& reps = require(ex, "replications", "experiment");
    if (!reps.is_number_integer() || reps.get<long long>() < 1) {
      throw Error(ErrorCode::Config, "'experiment.replications' must be a positive integer");
    }
    c.replications = reps.get<std::size_t>();
    if (ex.contains("seed")) {
      if (!ex["seed"].is_number_integer()) {
        throw Error(ErrorCode::Config, "'experiment.seed' must be an integer");
      }
      c.seed = ex["seed"].get<std::uint64_t>();
    }
    const json& methods = require(ex, "methods", "experiment");
    if (!methods.is_array()) throw Error(ErrorCode::Config, "'experiment.methods' must be an array");
    for (const auto& m : methods) {
      if (!m.is_string()) throw Error(ErrorCode::Config, "method names must be text");
      if (m.get<std::string>() == "all") {
        c.methods = {Method::Mle, Method::Bayes, Method::Lse, Method::OneStep};
        break;
      }
      c.methods.push_back(method_from_string(m.get<std::string>()));
    }
    if (ex.contains("thinning_b")) c.thinning_b = number(ex, "thinning_b", "experiment");
    if (ex.contains("t_grid")) c.t_grid = numbers(ex["t_grid"], "experiment.t_grid");
    if (ex.contains("preliminary_detectors")) {
      const json& p = ex["preliminary_detectors"];
      if (p.is_string() && p.get<std::string>() == "all") {
        c.preliminary_detectors.clear();
      } else if (p.is_number_integer() && p.get<long long>() == 3) {
        c.preliminary_detectors = first_triangle(c.network);
      } else if (p.is_array()) {
        for (const auto& j : p) {
          if (!j.is_number_integer() || j.get<long long>() < 0) {
            throw Error(ErrorCode::Config, "preliminary detector indices must be integers >= 0");
          }
          c.preliminary_detectors.push_back(j.get<std::size_t>());
        }
      } else {
        throw Error(ErrorCode::Config,
                    "'experiment.preliminary_detectors' must be \"all\", 3 or a list of indices");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Config, e.what());
  }
  validate(c);
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  json sensors = json::array();
  for (const auto& s : c.network.sensors) sensors.push_back({s.x(), s.y()});
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(to_string(m));
  const Region& r = c.network.theta_region;
  json ex = {{"theta0", {c.theta0.x(), c.theta0.y()}},
             {"scales", c.scales},
             {"replications", c.replications},
             {"seed", c.seed},
             {"methods", methods},
             {"thinning_b", c.thinning_b},
             {"t_grid", c.t_grid}};
  if (c.preliminary_detectors.empty()) {
    ex["preliminary_detectors"] = "all";
  } else {
    ex["preliminary_detectors"] = c.preliminary_detectors;
  }
  return {{"network",
           {{"sensors", sensors},
            {"nu", c.network.nu},
            {"T", c.network.T},
            {"lambda0", c.network.lambda0},
            {"region", {{"x_min", r.x_min}, {"x_max", r.x_max}, {"y_min", r.y_min}, {"y_max", r.y_max}}}}},
          {"intensity", {{"kind", c.intensity.kind}, {"a", c.intensity.a}, {"kappa", c.intensity.kappa}}},
          {"experiment", ex}};
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Config, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const std::string ext = path.extension().string();
  bool is_json = ext == ".json";
  if (ext != ".json" && ext != ".toml") {
    const auto first = text.find_first_not_of(" \t\r\n");
    is_json = first != std::string::npos && text[first] == '{';
  }
  if (is_json) {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::Config, std::string("JSON parse error: ") + e.what());
    }
    return config_from_json(doc);
  }
  return config_from_json(toml_to_json(text));
}

}  // namespace psloc
