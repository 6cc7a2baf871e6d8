#pragma once

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "zdsec/causal_rd.hpp"
#include "zdsec/errors.hpp"
#include "zdsec/source_model.hpp"

namespace zdsec {

// JSON model files:
//   source:     {"pmf": [..]}
//   joint:      {"pmf": [..], "py_given_x": [[..],..], "pw_given_y": [[..],..]}
//               (pw_given_y optional; omitted means no public side variable)
//   distortion: {"matrix": [[..],..]}  or a bare [[..],..]
// Every malformed input maps to ConfigError so callers get one failure mode.

namespace detail {

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return j;
}

inline std::vector<double> parse_prob_vector(const nlohmann::json& j,
                                             const std::string& what) {
  if (!j.is_array() || j.empty())
    throw ConfigError(what + ": expected a non-empty array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(what + ": non-numeric entry");
    out.push_back(v.get<double>());
  }
  return out;
}

inline std::vector<std::vector<double>> parse_matrix(const nlohmann::json& j,
                                                     const std::string& what) {
  if (!j.is_array() || j.empty())
    throw ConfigError(what + ": expected a non-empty array of rows");
  std::vector<std::vector<double>> out;
  out.reserve(j.size());
  for (const auto& row : j) out.push_back(parse_prob_vector(row, what));
  for (const auto& row : out)
    if (row.size() != out[0].size())
      throw ConfigError(what + ": ragged rows");
  return out;
}

}  // namespace detail

inline SourceModel load_source_model(const std::string& path) {
  nlohmann::json j = detail::load_json_file(path);
  if (!j.is_object() || !j.contains("pmf"))
    throw ConfigError(path + ": expected an object with a \"pmf\" field");
  try {
    return SourceModel(detail::parse_prob_vector(j["pmf"], path + ":pmf"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline JointSourceModel load_joint_model(const std::string& path) {
  nlohmann::json j = detail::load_json_file(path);
  if (!j.is_object() || !j.contains("pmf") || !j.contains("py_given_x"))
    throw ConfigError(path +
                      ": expected an object with \"pmf\" and \"py_given_x\"");
  ProbMatrix pw;
  if (j.contains("pw_given_y"))
    pw = detail::parse_matrix(j["pw_given_y"], path + ":pw_given_y");
  try {
    return JointSourceModel(
        SourceModel(detail::parse_prob_vector(j["pmf"], path + ":pmf")),
        detail::parse_matrix(j["py_given_x"], path + ":py_given_x"), pw);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline DistortionMatrix load_distortion(const std::string& path) {
  nlohmann::json j = detail::load_json_file(path);
  const nlohmann::json* m = &j;
  if (j.is_object()) {
    if (!j.contains("matrix"))
      throw ConfigError(path + ": expected a \"matrix\" field or a bare array");
    m = &j["matrix"];
  }
  DistortionMatrix d = detail::parse_matrix(*m, path + ":matrix");
  for (const auto& row : d)
    for (double v : row)
      if (!(v >= 0.0) || !std::isfinite(v))
        throw ConfigError(path + ": distortion entries must be finite and >= 0");
  return d;
}

}  // namespace zdsec
