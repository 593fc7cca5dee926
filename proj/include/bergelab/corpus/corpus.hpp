#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bergelab/checkers/problem_checks.hpp"
#include "bergelab/corpus_data.hpp"
#include "bergelab/parametric/problem_file.hpp"
#include "bergelab/parametric/transforms.hpp"

namespace bergelab {

inline const std::vector<std::string>& corpus_properties() {
  static const std::vector<std::string> names{"fptusc", "lisc", "lmsc", "kn_inf_compact", "solutions_usc"};
  return names;
}

struct FixtureLabel {
  std::string property;
  ExactScalar at;
  bool holds = true;
  /** Set when the label refers to the modified problem (Phi_{lambda,x0}, u_{lambda,x0}). */
  std::optional<ExactScalar> lambda;
  std::optional<ExactScalar> x0;
  std::vector<Expr> seeds;
};

struct MinResolution {
  ExactScalar x_step{Rational(1, 100)};
  ExactScalar y_step{Rational(1, 100)};
  int depth = 12;
  ExactScalar delta0{Rational(1, 2)};
  int harmonic = 0;
};

struct FixtureCase {
  std::string name;
  ProblemSpec problem;
  Expr closed_form_value;
  std::string closed_form_solutions;
  ExactScalar value_tolerance;
  MinResolution resolution;
  std::vector<FixtureLabel> labels;
};

struct Fixture {
  std::string name;
  std::string summary;
  std::vector<FixtureCase> cases;
};

namespace detail {

inline int int_field(const Json& j, const std::string& ptr, const char* key, int def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_number_integer() || j[key].get<long long>() < 0)
    throw SchemaFailure(ptr + "/" + key, std::string("'") + key + "' must be a nonnegative integer");
  return j[key].get<int>();
}

inline std::string string_field(const Json& j, const std::string& ptr, const char* key, bool required) {
  if (!j.contains(key)) {
    if (required) throw SchemaFailure(ptr, std::string("missing required field '") + key + "'");
    return {};
  }
  if (!j[key].is_string()) throw SchemaFailure(ptr + "/" + key, std::string("'") + key + "' must be a string");
  return j[key].get<std::string>();
}

inline FixtureLabel label_from_json(const Json& j, const std::string& ptr, Mode mode) {
  if (!j.is_object()) throw SchemaFailure(ptr, "label must be an object");
  reject_unknown_keys(j, ptr, {"property", "at", "expect", "modified", "seeds"});
  FixtureLabel l;
  l.property = string_field(j, ptr, "property", true);
  const auto& props = corpus_properties();
  if (std::find(props.begin(), props.end(), l.property) == props.end())
    throw SchemaFailure(ptr + "/property", "unknown property '" + l.property + "'");
  l.at = scalar_from_json(require_key(j, ptr, "at"), ptr + "/at", mode);
  std::string e = string_field(j, ptr, "expect", true);
  if (e != "holds" && e != "fails") throw SchemaFailure(ptr + "/expect", "'expect' must be \"holds\" or \"fails\"");
  l.holds = e == "holds";
  if (j.contains("modified")) {
    const Json& m = j["modified"];
    const std::string mp = ptr + "/modified";
    if (!m.is_object()) throw SchemaFailure(mp, "'modified' must be an object");
    reject_unknown_keys(m, mp, {"lambda", "x0"});
    l.lambda = scalar_from_json(require_key(m, mp, "lambda"), mp + "/lambda", mode);
    l.x0 = scalar_from_json(require_key(m, mp, "x0"), mp + "/x0", mode);
  }
  if (j.contains("seeds")) {
    const Json& s = j["seeds"];
    if (!s.is_array()) throw SchemaFailure(ptr + "/seeds", "'seeds' must be an array of expressions");
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::string sp = ptr + "/seeds/" + std::to_string(i);
      Expr e2 = expr_from_json(s[i], sp);
      try {
        validate_expr(e2, mode, {Var::x});
      } catch (const Error& err) {
        throw SchemaFailure(sp, err.detail());
      }
      l.seeds.push_back(std::move(e2));
    }
  }
  return l;
}

inline MinResolution resolution_from_json(const Json& j, const std::string& ptr, Mode mode) {
  if (!j.is_object()) throw SchemaFailure(ptr, "'min_resolution' must be an object");
  reject_unknown_keys(j, ptr, {"x_step", "y_step", "depth", "delta0", "harmonic"});
  MinResolution r;
  if (j.contains("x_step")) r.x_step = scalar_from_json(j["x_step"], ptr + "/x_step", mode);
  if (j.contains("y_step")) r.y_step = scalar_from_json(j["y_step"], ptr + "/y_step", mode);
  if (j.contains("delta0")) r.delta0 = scalar_from_json(j["delta0"], ptr + "/delta0", mode);
  r.depth = int_field(j, ptr, "depth", r.depth);
  r.harmonic = int_field(j, ptr, "harmonic", r.harmonic);
  for (const auto* v : {&r.x_step, &r.y_step, &r.delta0})
    if (!(ExactScalar(0) < *v)) throw SchemaFailure(ptr, "steps and delta0 must be positive");
  return r;
}

inline FixtureCase case_from_json(const Json& j, const std::string& ptr) {
  if (!j.is_object()) throw SchemaFailure(ptr, "case must be an object");
  reject_unknown_keys(j, ptr,
                      {"case", "problem", "closed_form_value", "closed_form_solutions", "value_tolerance", "min_resolution",
                       "labels"});
  FixtureCase c;
  c.name = string_field(j, ptr, "case", true);
  c.problem = problem_spec_from_json(require_key(j, ptr, "problem"), ptr + "/problem");
  const Mode mode = c.problem.mode;
  c.closed_form_value = expr_from_json(require_key(j, ptr, "closed_form_value"), ptr + "/closed_form_value");
  try {
    validate_expr(c.closed_form_value, mode, {Var::x});
  } catch (const Error& e) {
    throw SchemaFailure(ptr + "/closed_form_value", e.detail());
  }
  c.closed_form_solutions = string_field(j, ptr, "closed_form_solutions", false);
  c.value_tolerance = j.contains("value_tolerance")
                          ? scalar_from_json(j["value_tolerance"], ptr + "/value_tolerance", mode)
                          : ExactScalar(0);
  if (c.value_tolerance < ExactScalar(0)) throw SchemaFailure(ptr + "/value_tolerance", "tolerance must be nonnegative");
  if (j.contains("min_resolution")) c.resolution = resolution_from_json(j["min_resolution"], ptr + "/min_resolution", mode);
  const Json& ls = require_key(j, ptr, "labels");
  if (!ls.is_array()) throw SchemaFailure(ptr + "/labels", "'labels' must be an array");
  for (std::size_t i = 0; i < ls.size(); ++i) c.labels.push_back(label_from_json(ls[i], ptr + "/labels/" + std::to_string(i), mode));
  return c;
}

}  // namespace detail

/** @brief Builds a fixture from a parsed fixture document. */
inline Fixture fixture_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaFailure("", "fixture must be an object");
  reject_unknown_keys(j, "", {"name", "summary", "cases"});
  Fixture f;
  f.name = detail::string_field(j, "", "name", true);
  f.summary = detail::string_field(j, "", "summary", false);
  const Json& cs = require_key(j, "", "cases");
  if (!cs.is_array() || cs.empty()) throw SchemaFailure("/cases", "'cases' must be a nonempty array");
  for (std::size_t i = 0; i < cs.size(); ++i) f.cases.push_back(detail::case_from_json(cs[i], "/cases/" + std::to_string(i)));
  return f;
}

inline Fixture load_fixture_text(const std::string& text, const std::string& origin) {
  Json j = parse_json_text(text, origin, "corpus", "corpus_instantiate");
  try {
    return fixture_from_json(j);
  } catch (const SchemaFailure& f) {
    throw ConfigError("corpus", "corpus_instantiate", anchor_message(origin, text, f));
  }
}

/** @brief Fixture names in registry order (the numeric prefix of the data file). */
inline std::vector<std::string> corpus_list() {
  std::vector<std::string> out;
  for (const auto& e : corpus_data()) out.push_back(e.name);
  return out;
}

/** @brief Raw fixture document as shipped. */
inline std::string corpus_source(const std::string& name) {
  for (const auto& e : corpus_data())
    if (name == e.name) return e.text;
  throw UnknownFixture("corpus", "corpus_instantiate", "no fixture named '" + name + "'");
}

inline Fixture corpus_instantiate(const std::string& name) {
  for (const auto& e : corpus_data())
    if (name == e.name) return load_fixture_text(e.text, std::string("corpus/") + e.file);
  throw UnknownFixture("corpus", "corpus_instantiate", "no fixture named '" + name + "'");
}

/** @brief Checker parameters derived from a case's min_resolution. */
template <class T>
CheckParams<T> fixture_params(const FixtureCase& c, unsigned workers = worker_count()) {
  const auto& s = c.problem;
  CheckParams<T> params = make_params(Grid1D<T>(ScalarTraits<T>::from_exact(s.y_lo), ScalarTraits<T>::from_exact(s.y_hi),
                                                ScalarTraits<T>::from_exact(c.resolution.y_step)));
  params.depth = c.resolution.depth;
  params.delta0 = ScalarTraits<T>::from_exact(c.resolution.delta0);
  params.harmonic_n = c.resolution.harmonic;
  T tol = ScalarTraits<T>::from_exact(c.value_tolerance);
  if (params.min_gap < tol) params.min_gap = tol;
  params.workers = workers;
  return params;
}

template <class T>
Grid1D<T> fixture_x_grid(const FixtureCase& c) {
  const auto& s = c.problem;
  return Grid1D<T>(ScalarTraits<T>::from_exact(s.x_lo), ScalarTraits<T>::from_exact(s.x_hi),
                   ScalarTraits<T>::from_exact(c.resolution.x_step));
}

struct ValueCheck {
  std::size_t points = 0;
  /** Largest |computed - closed form| over the x grid; "inf" when an infinity is mismatched. */
  std::string max_error;
  double max_error_double = 0;
  std::string worst_x;
  std::string tolerance;
  bool ok = true;
};

struct LabelOutcome {
  FixtureLabel label;
  Status status = Status::NotApplicable;
  bool agree = false;
  /** Whether a Violated witness replayed (always true when there is no witness). */
  bool replayed = true;
  Json verdict;
  std::string error;
};

struct CaseReport {
  std::string name;
  Mode mode = Mode::Float;
  std::optional<ValueCheck> values;
  std::vector<LabelOutcome> labels;

  bool agree() const {
    if (values && !values->ok) return false;
    for (const auto& l : labels)
      if (!l.agree || !l.replayed) return false;
    return true;
  }
};

struct CorpusReport {
  std::string fixture;
  std::vector<CaseReport> cases;

  bool agree() const {
    for (const auto& c : cases)
      if (!c.agree()) return false;
    return true;
  }
};

struct CorpusVerifyOptions {
  bool values = true;
  bool labels = true;
  unsigned workers = worker_count();
};

namespace detail {

template <class T>
ValueCheck verify_values(const FixtureCase& c, const Problem<T>& p, const CheckParams<T>& params, unsigned workers) {
  Grid1D<T> xg = fixture_x_grid<T>(c);
  ValueProfile<T> prof = compute_profile(p, xg, params.y_grid, default_eps_sol<T>(), workers);
  const T tol = ScalarTraits<T>::from_exact(c.value_tolerance);
  ValueCheck vc;
  vc.points = prof.xs.size();
  vc.tolerance = ScalarTraits<T>::str(tol);
  ExtReal<T> worst(T(0));
  for (std::size_t i = 0; i < prof.xs.size(); ++i) {
    ExtReal<T> ref = eval(c.closed_form_value, Env<T>::of_x(prof.xs[i]));
    ExtReal<T> err;
    if (ref.is_finite() && prof.values[i].is_finite()) {
      err = ExtReal<T>(ScalarTraits<T>::abs(prof.values[i].value() - ref.value()));
    } else {
      err = ref == prof.values[i] ? ExtReal<T>(T(0)) : ExtReal<T>::pos_inf();
    }
    if (i == 0 || worst < err) {
      worst = err;
      vc.worst_x = ScalarTraits<T>::str(prof.xs[i]);
    }
  }
  vc.max_error = worst.is_finite() ? ScalarTraits<T>::str(worst.value()) : worst.str();
  vc.max_error_double = worst.is_finite() ? ScalarTraits<T>::to_double(worst.value()) : HUGE_VAL;
  vc.ok = worst <= ExtReal<T>(tol);
  return vc;
}

template <class T>
Verdict<T> run_property(const std::string& property, const Problem<T>& p, const ProbeSet<T>& ps,
                        const CheckParams<T>& params) {
  if (property == "fptusc") return fptusc_from(ps, params);
  if (property == "lisc") return lisc_from(ps, params);
  if (property == "lmsc") return lmsc_from(p, ps, params, lisc_from(ps, params));
  if (property == "solutions_usc") return solutions_usc_from(ps, params);
  return kn_from(p, ps, params);
}

template <class T>
CaseReport verify_case(const FixtureCase& c, const CorpusVerifyOptions& opt) {
  CaseReport rep;
  rep.name = c.name;
  rep.mode = c.problem.mode;
  Problem<T> p = compile_problem<T>(c.problem);
  CheckParams<T> base = fixture_params<T>(c, opt.workers);
  if (opt.values) rep.values = verify_values(c, p, base, opt.workers);
  if (!opt.labels) return rep;
  // one probe set per base point, shared by every unmodified label there
  std::map<std::string, ProbeSet<T>> probes;
  for (const auto& l : c.labels) {
    LabelOutcome out;
    out.label = l;
    try {
      const T x = ScalarTraits<T>::from_exact(l.at);
      CheckParams<T> params = base;
      for (const auto& s : l.seeds) params.seeds.push_back(s);
      ExtReal<T> cert = eval(c.closed_form_value, Env<T>::of_x(x));
      if (cert.is_finite()) params.certified_value = cert.value();
      Verdict<T> v;
      const Problem<T>* target = &p;
      std::optional<ModifiedProblem<T>> mp;
      if (l.lambda) {
        mp = modified_problem(p, ScalarTraits<T>::from_exact(*l.lambda), ScalarTraits<T>::from_exact(*l.x0), params.y_grid);
        target = &mp->problem;
        ProbeSet<T> ps = build_probes(*target, x, params, "corpus_verify");
        v = run_property(l.property, *target, ps, params);
        v.note = (v.note.empty() ? "" : v.note + "; ") + "modified problem lambda = " + ScalarTraits<T>::str(mp->lambda) +
                 ", x0 = " + ScalarTraits<T>::str(mp->x0) + ", sublevel tests at y step " +
                 ScalarTraits<T>::str(mp->resolution.step());
      } else {
        const std::string key = ScalarTraits<T>::str(x);
        auto it = probes.find(key);
        if (it == probes.end()) it = probes.emplace(key, build_probes(p, x, params, "corpus_verify")).first;
        v = run_property(l.property, p, it->second, params);
      }
      out.status = v.status;
      out.agree = l.holds ? v.status == Status::NoViolationFound : v.status == Status::Violated;
      if (v.witness) out.replayed = replay_witness(*target, *v.witness);
      out.verdict = verdict_json(v);
    } catch (const Error& e) {
      out.error = e.what();
      out.agree = false;
    }
    rep.labels.push_back(std::move(out));
  }
  return rep;
}

}  // namespace detail

/**
 * @brief Recomputes each case's value profile against its closed form and runs every labeled check
 * at the case's min_resolution.
 */
inline CorpusReport corpus_verify(const std::string& name, const CorpusVerifyOptions& opt = {}) {
  Fixture f = corpus_instantiate(name);
  CorpusReport rep;
  rep.fixture = f.name;
  for (const auto& c : f.cases) {
    if (c.problem.mode == Mode::Exact) {
      rep.cases.push_back(detail::verify_case<ExactScalar>(c, opt));
    } else {
      rep.cases.push_back(detail::verify_case<double>(c, opt));
    }
  }
  return rep;
}

/** @brief Unmodified labels must respect kn_inf_compact => lmsc => lisc at every base point. */
inline std::vector<std::string> label_lattice_violations(const Fixture& f) {
  std::vector<std::string> out;
  for (const auto& c : f.cases) {
    std::map<std::string, std::map<std::string, bool>> at;
    for (const auto& l : c.labels)
      if (!l.lambda) at[l.at.str()][l.property] = l.holds;
    for (const auto& [x, props] : at) {
      auto holds = [&](const char* k) {
        auto it = props.find(k);
        return it != props.end() && it->second;
      };
      auto labeled = [&](const char* k) { return props.count(k) > 0; };
      for (const char* k : {"fptusc", "lisc", "lmsc", "kn_inf_compact"})
        if (!labeled(k)) out.push_back(f.name + "/" + c.name + " at " + x + ": no label for " + k);
      if (holds("kn_inf_compact") && !holds("lmsc"))
        out.push_back(f.name + "/" + c.name + " at " + x + ": kn_inf_compact holds but lmsc fails");
      if (holds("lmsc") && !holds("lisc"))
        out.push_back(f.name + "/" + c.name + " at " + x + ": lmsc holds but lisc fails");
    }
  }
  return out;
}

inline Json fixture_label_json(const FixtureLabel& l) {
  Json j{{"property", l.property}, {"at", l.at.str()}, {"expect", l.holds ? "holds" : "fails"}};
  if (l.lambda) j["modified"] = Json{{"lambda", l.lambda->str()}, {"x0", l.x0->str()}};
  if (!l.seeds.empty()) {
    Json s = Json::array();
    for (const auto& e : l.seeds) s.push_back(expr_to_json(e));
    j["seeds"] = s;
  }
  return j;
}

inline Json corpus_report_json(const CorpusReport& r) {
  Json j;
  j["fixture"] = r.fixture;
  j["agree"] = r.agree();
  Json cases = Json::array();
  for (const auto& c : r.cases) {
    Json cj{{"case", c.name}, {"mode", mode_name(c.mode)}, {"agree", c.agree()}};
    if (c.values) {
      cj["value_check"] = Json{{"points", c.values->points},
                               {"max_error", c.values->max_error},
                               {"worst_x", c.values->worst_x},
                               {"tolerance", c.values->tolerance},
                               {"ok", c.values->ok}};
    }
    Json ls = Json::array();
    for (const auto& l : c.labels) {
      Json lj = fixture_label_json(l.label);
      lj["status"] = status_name(l.status);
      lj["agree"] = l.agree;
      lj["witness_replays"] = l.replayed;
      if (!l.error.empty()) lj["error"] = l.error;
      if (!l.verdict.is_null()) lj["verdict"] = l.verdict;
      ls.push_back(std::move(lj));
    }
    cj["labels"] = std::move(ls);
    cases.push_back(std::move(cj));
  }
  j["cases"] = std::move(cases);
  return j;
}

}  // namespace bergelab
