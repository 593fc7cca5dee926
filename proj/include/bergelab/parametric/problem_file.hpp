#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "bergelab/core/expr_json.hpp"
#include "bergelab/parametric/problem.hpp"

namespace bergelab {

/** @brief Scalar literal: integer, float (float mode only unless integral), or exact string. */
inline ExactScalar scalar_from_json(const Json& j, const std::string& ptr, Mode mode) {
  if (j.is_number_integer()) return ExactScalar(static_cast<long long>(j.get<long long>()));
  if (j.is_number_unsigned()) return ExactScalar(static_cast<long long>(j.get<unsigned long long>()));
  if (j.is_number_float()) {
    double v = j.get<double>();
    if (!std::isfinite(v)) throw SchemaFailure(ptr, "scalar must be finite");
    if (mode == Mode::Exact && v != std::floor(v))
      throw SchemaFailure(ptr, "float literal in exact mode; write it as a rational string such as \"1/2\"");
    return ExactScalar(Rational(v));
  }
  if (j.is_string()) {
    try {
      return parse_exact(j.get<std::string>());
    } catch (const Error& e) {
      throw SchemaFailure(ptr, e.detail());
    }
  }
  throw SchemaFailure(ptr, "expected a number or a numeric string");
}

inline void reject_unknown_keys(const Json& j, const std::string& ptr, std::initializer_list<const char*> keys) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : keys) ok = ok || it.key() == k;
    if (!ok) throw SchemaFailure(ptr + "/" + it.key(), "unknown field '" + it.key() + "'");
  }
}

inline const Json& require_key(const Json& j, const std::string& ptr, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw SchemaFailure(ptr, std::string("missing required field '") + key + "'");
  return j[key];
}

inline bool bool_field(const Json& j, const std::string& ptr, const char* key, bool def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_boolean()) throw SchemaFailure(ptr + "/" + key, std::string("'") + key + "' must be a boolean");
  return j[key].get<bool>();
}

/** @brief Builds a ProblemSpec from a parsed problem document rooted at ptr. */
inline ProblemSpec problem_spec_from_json(const Json& j, const std::string& ptr = "") {
  if (!j.is_object()) throw SchemaFailure(ptr, "problem must be an object");
  reject_unknown_keys(j, ptr, {"name", "mode", "space_x", "space_y", "discrete", "objective", "phi", "augment", "grid", "note"});
  ProblemSpec s;
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw SchemaFailure(ptr + "/name", "'name' must be a string");
    s.name = j["name"].get<std::string>();
  }
  if (j.contains("mode")) {
    if (!j["mode"].is_string()) throw SchemaFailure(ptr + "/mode", "'mode' must be \"float\" or \"exact\"");
    try {
      s.mode = parse_mode(j["mode"].get<std::string>());
    } catch (const Error& e) {
      throw SchemaFailure(ptr + "/mode", e.detail());
    }
  }
  const Json& sx = require_key(j, ptr, "space_x");
  reject_unknown_keys(sx, ptr + "/space_x", {"lo", "hi"});
  s.x_lo = scalar_from_json(require_key(sx, ptr + "/space_x", "lo"), ptr + "/space_x/lo", s.mode);
  s.x_hi = scalar_from_json(require_key(sx, ptr + "/space_x", "hi"), ptr + "/space_x/hi", s.mode);
  const Json& sy = require_key(j, ptr, "space_y");
  reject_unknown_keys(sy, ptr + "/space_y", {"lo", "hi", "truncated_above", "truncated_below"});
  s.y_lo = scalar_from_json(require_key(sy, ptr + "/space_y", "lo"), ptr + "/space_y/lo", s.mode);
  s.y_hi = scalar_from_json(require_key(sy, ptr + "/space_y", "hi"), ptr + "/space_y/hi", s.mode);
  s.y_truncated_above = bool_field(sy, ptr + "/space_y", "truncated_above", false);
  s.y_truncated_below = bool_field(sy, ptr + "/space_y", "truncated_below", false);
  if (s.x_hi < s.x_lo) throw SchemaFailure(ptr + "/space_x", "lo exceeds hi");
  if (s.y_hi < s.y_lo) throw SchemaFailure(ptr + "/space_y", "lo exceeds hi");
  s.discrete = bool_field(j, ptr, "discrete", false);
  s.objective = expr_from_json(require_key(j, ptr, "objective"), ptr + "/objective");
  if (j.contains("phi")) {
    s.phi = multifunction_from_json(j["phi"], ptr + "/phi");
  } else {
    s.phi = MultifunctionSpec::constant(ex::c(s.y_lo), ex::c(s.y_hi));
  }
  if (j.contains("augment")) {
    const Json& a = j["augment"];
    if (!a.is_array()) throw SchemaFailure(ptr + "/augment", "'augment' must be an array of expressions");
    for (std::size_t i = 0; i < a.size(); ++i) s.augment.push_back(expr_from_json(a[i], ptr + "/augment/" + std::to_string(i)));
  }
  if (j.contains("grid")) {
    const Json& g = j["grid"];
    reject_unknown_keys(g, ptr + "/grid", {"x_step", "y_step"});
    if (g.contains("x_step")) s.x_step = scalar_from_json(g["x_step"], ptr + "/grid/x_step", s.mode);
    if (g.contains("y_step")) s.y_step = scalar_from_json(g["y_step"], ptr + "/grid/y_step", s.mode);
    if (!(ExactScalar(0) < s.x_step)) throw SchemaFailure(ptr + "/grid/x_step", "step must be positive");
    if (!(ExactScalar(0) < s.y_step)) throw SchemaFailure(ptr + "/grid/y_step", "step must be positive");
  }
  // mode-dependent checks, re-anchored at the offending subtree
  try {
    validate_expr(s.objective, s.mode, {Var::x, Var::y});
  } catch (const Error& e) {
    throw SchemaFailure(ptr + "/objective", e.detail());
  }
  try {
    validate_multifunction(s.phi, s.mode, {Var::x});
  } catch (const Error& e) {
    throw SchemaFailure(ptr + "/phi", e.detail());
  }
  for (std::size_t i = 0; i < s.augment.size(); ++i) {
    try {
      validate_expr(s.augment[i], s.mode, {Var::x});
    } catch (const Error& e) {
      throw SchemaFailure(ptr + "/augment/" + std::to_string(i), e.detail());
    }
  }
  return s;
}

inline Json problem_spec_to_json(const ProblemSpec& s) {
  Json j;
  j["name"] = s.name;
  j["mode"] = mode_name(s.mode);
  j["space_x"] = Json{{"lo", s.x_lo.str()}, {"hi", s.x_hi.str()}};
  j["space_y"] = Json{{"lo", s.y_lo.str()},
                      {"hi", s.y_hi.str()},
                      {"truncated_above", s.y_truncated_above},
                      {"truncated_below", s.y_truncated_below}};
  j["discrete"] = s.discrete;
  j["objective"] = expr_to_json(s.objective);
  j["phi"] = multifunction_to_json(s.phi);
  Json aug = Json::array();
  for (const auto& e : s.augment) aug.push_back(expr_to_json(e));
  j["augment"] = aug;
  j["grid"] = Json{{"x_step", s.x_step.str()}, {"y_step", s.y_step.str()}};
  return j;
}

inline std::string read_text_file(const std::string& path, const std::string& module, const std::string& op) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(module, op, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/** @brief Parses and validates problem-file text; errors are anchored to origin:line:col. */
inline ProblemSpec load_problem_text(const std::string& text, const std::string& origin) {
  Json j = parse_json_text(text, origin, "parametric", "load_problem");
  try {
    return problem_spec_from_json(j);
  } catch (const SchemaFailure& f) {
    throw ConfigError("parametric", "load_problem", anchor_message(origin, text, f));
  }
}

inline ProblemSpec load_problem_file(const std::string& path) {
  return load_problem_text(read_text_file(path, "parametric", "load_problem"), path);
}

}  // namespace bergelab
