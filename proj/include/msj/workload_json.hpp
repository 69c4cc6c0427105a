#pragma once

// JSON form of a workload:
//   {"k": 64, "lambda": 2.5, "require_stable": true,
//    "classes": [{"need": 2, "share": 0.5,
//                 "dist": {"kind": "exponential", "params": {"mean": 1.0}}}]}
// Deterministic laws use params.value, empirical laws params.samples.

#include <fstream>
#include <string>

#include "json.hpp"
#include "msj/workload.hpp"

namespace msj {

inline nlohmann::json to_json(const ServiceDistribution& dist) {
  nlohmann::json params;
  std::visit(
      [&](const auto& law) {
        using Law = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<Law, Exponential>) {
          params["mean"] = law.mean;
        } else if constexpr (std::is_same_v<Law, Deterministic>) {
          params["value"] = law.value;
        } else {
          params["samples"] = *law.samples;
        }
      },
      dist.law());
  return {{"kind", dist.kind()}, {"params", params}};
}

inline ServiceDistribution service_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const auto& params = j.at("params");
  if (kind == "exponential") return ServiceDistribution::exponential(params.at("mean").get<double>());
  if (kind == "deterministic") {
    return ServiceDistribution::deterministic(params.at("value").get<double>());
  }
  if (kind == "empirical") {
    return ServiceDistribution::empirical(params.at("samples").get<std::vector<double>>());
  }
  throw std::invalid_argument("unknown distribution kind '" + kind + "'");
}

inline nlohmann::json to_json(const SystemConfig& config) {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& c : config.classes) {
    classes.push_back({{"need", c.need}, {"share", c.share}, {"dist", to_json(c.service)}});
  }
  return {{"k", config.k},
          {"lambda", config.lambda},
          {"require_stable", config.require_stable},
          {"classes", classes}};
}

inline std::vector<JobClass> classes_from_json(const nlohmann::json& arr) {
  std::vector<JobClass> classes;
  int index = 0;
  for (const auto& c : arr) {
    classes.push_back(JobClass{index++, c.at("need").get<std::int64_t>(), c.at("share").get<double>(),
                               service_from_json(c.at("dist"))});
  }
  return classes;
}

/// Parses (and by default validates). A missing "lambda" is allowed when "rho" is given,
/// in which case lambda = rho * k / demand.
inline SystemConfig config_from_json(const nlohmann::json& j, bool validate = true) {
  SystemConfig config;
  config.k = j.at("k").get<std::int64_t>();
  config.classes = classes_from_json(j.at("classes"));
  config.require_stable = j.value("require_stable", true);
  if (j.contains("lambda")) {
    config.lambda = j.at("lambda").get<double>();
  } else if (j.contains("rho")) {
    config.lambda = j.at("rho").get<double>() * static_cast<double>(config.k) /
                    total_relative_demand(config.classes);
  } else {
    throw std::invalid_argument("workload needs either 'lambda' or 'rho'");
  }
  if (validate) config.validate();
  return config;
}

inline SystemConfig load_config(const std::string& path, bool validate = true) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open workload file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("workload file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j, validate);
}

}  // namespace msj
