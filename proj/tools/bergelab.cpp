#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bergelab/corpus/corpus.hpp"
#include "bergelab/inventory/solver.hpp"
#include "bergelab/minimax/minimax.hpp"
#include "bergelab/parametric/transforms.hpp"
#include "bergelab/report/report.hpp"

namespace bl = bergelab;
using bl::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitViolated = 2;

struct Options {
  std::string problem;
  std::string config;
  std::string property;
  std::vector<std::string> at;
  std::string grid;
  std::string mode;
  std::string eps;
  int depth = -1;
  std::string out = "bergelab-out";
  std::string format = "both";
  bool strict = false;
  bool oracle = false;
  bool all = false;
  std::string fixture;
  std::string variants;
  std::string x_range;
};

bool want_csv(const Options& o) { return o.format == "csv" || o.format == "both"; }
bool want_json(const Options& o) { return o.format == "json" || o.format == "both"; }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

bl::ExactScalar parse_scalar(const std::string& text, const char* flag) {
  try {
    return bl::parse_exact(text);
  } catch (const bl::Error& e) {
    throw bl::ConfigError("cli", "parse_args", std::string(flag) + ": " + e.detail());
  }
}

Json run_info(const std::string& command, const Options& o) {
  Json j{{"command", command}, {"format", o.format}, {"workers", bl::worker_count()}};
  if (!o.problem.empty()) j["problem"] = o.problem;
  if (!o.config.empty()) j["config"] = o.config;
  if (!o.property.empty()) j["property"] = o.property;
  if (!o.at.empty()) j["at"] = o.at;
  if (!o.grid.empty()) j["grid"] = o.grid;
  if (!o.mode.empty()) j["mode"] = o.mode;
  if (!o.eps.empty()) j["eps"] = o.eps;
  if (o.depth >= 0) j["depth"] = o.depth;
  return j;
}

/** Problem named on the command line: a corpus fixture ("name" or "name:case") or a problem file. */
struct LoadedProblem {
  bl::ProblemSpec spec;
  std::optional<bl::FixtureCase> fixture_case;
  std::string origin;
};

LoadedProblem load_problem_arg(const Options& o) {
  if (o.problem.empty()) throw bl::ConfigError("cli", "load_problem", "--problem is required");
  LoadedProblem lp;
  lp.origin = o.problem;
  std::string name = o.problem, case_name;
  if (auto colon = name.find(':'); colon != std::string::npos) {
    case_name = name.substr(colon + 1);
    name = name.substr(0, colon);
  }
  const auto names = bl::corpus_list();
  if (std::find(names.begin(), names.end(), name) != names.end() && !std::filesystem::exists(o.problem)) {
    bl::Fixture f = bl::corpus_instantiate(name);
    for (const auto& c : f.cases) {
      if (case_name.empty() || c.name == case_name) {
        lp.fixture_case = c;
        break;
      }
    }
    if (!lp.fixture_case) throw bl::UnknownFixture("cli", "load_problem", "fixture '" + name + "' has no case '" + case_name + "'");
    lp.spec = lp.fixture_case->problem;
  } else if (std::filesystem::exists(o.problem)) {
    lp.spec = bl::load_problem_file(o.problem);
  } else {
    throw bl::ConfigError("cli", "load_problem", "'" + o.problem + "' is neither a corpus fixture nor a readable file");
  }
  if (!o.mode.empty()) {
    bl::Mode m = bl::parse_mode(o.mode);
    if (m != lp.spec.mode) {
      lp.spec.mode = m;
      bl::validate_problem_spec(lp.spec);
    }
  }
  if (!o.grid.empty()) {
    auto parts = split(o.grid, ',');
    if (parts.empty() || parts.size() > 2) throw bl::ConfigError("cli", "parse_args", "--grid expects x_step[,y_step]");
    lp.spec.x_step = parse_scalar(parts[0], "--grid");
    if (parts.size() == 2) lp.spec.y_step = parse_scalar(parts[1], "--grid");
    if (lp.fixture_case) {
      lp.fixture_case->resolution.x_step = lp.spec.x_step;
      if (parts.size() == 2) lp.fixture_case->resolution.y_step = lp.spec.y_step;
    }
  }
  if (lp.fixture_case) lp.fixture_case->problem = lp.spec;
  return lp;
}

template <class T>
bl::Grid1D<T> x_grid_of(const LoadedProblem& lp) {
  if (lp.fixture_case && lp.spec.x_step == lp.fixture_case->resolution.x_step) return bl::fixture_x_grid<T>(*lp.fixture_case);
  const auto& s = lp.spec;
  return bl::Grid1D<T>(bl::ScalarTraits<T>::from_exact(s.x_lo), bl::ScalarTraits<T>::from_exact(s.x_hi),
                       bl::ScalarTraits<T>::from_exact(s.x_step));
}

template <class T>
bl::CheckParams<T> params_of(const LoadedProblem& lp, const Options& o) {
  bl::CheckParams<T> p;
  if (lp.fixture_case) {
    p = bl::fixture_params<T>(*lp.fixture_case);
  } else {
    const auto& s = lp.spec;
    p = bl::make_params(bl::Grid1D<T>(bl::ScalarTraits<T>::from_exact(s.y_lo), bl::ScalarTraits<T>::from_exact(s.y_hi),
                                      bl::ScalarTraits<T>::from_exact(s.y_step)));
  }
  if (o.depth >= 0) {
    p.depth = o.depth;
    p.harmonic_n = 0;
  }
  if (!o.eps.empty()) p.eps_sol = bl::ScalarTraits<T>::from_exact(parse_scalar(o.eps, "--eps"));
  return p;
}

template <class T>
bl::CheckParams<T> params_at(const LoadedProblem& lp, bl::CheckParams<T> p, const T& x) {
  if (!lp.fixture_case) return p;
  bl::ExtReal<T> cert = bl::eval(lp.fixture_case->closed_form_value, bl::Env<T>::of_x(x));
  if (cert.is_finite()) p.certified_value = cert.value();
  for (const auto& l : lp.fixture_case->labels)
    if (!l.lambda && bl::ScalarTraits<T>::from_exact(l.at) == x)
      for (const auto& s : l.seeds) p.seeds.push_back(s);
  return p;
}

// ---- solve ----

template <class T>
int run_solve(const LoadedProblem& lp, const Options& o) {
  bl::Problem<T> p = bl::compile_problem<T>(lp.spec);
  bl::Grid1D<T> xg = x_grid_of<T>(lp);
  bl::CheckParams<T> params = params_of<T>(lp, o);
  bl::ValueProfile<T> prof = bl::compute_profile(p, xg, params.y_grid, params.eps_sol);
  bl::ValueProfile<T> bar = bl::compute_profile(bl::bar_transform(p), xg, params.y_grid, params.eps_sol);
  bl::ValueProfile<T> hat = bl::compute_profile(bl::hat_transform(bl::bar_transform(p)), xg, params.y_grid, params.eps_sol);
  std::size_t mismatches = 0;
  Json first_mismatch;
  for (std::size_t i = 0; i < prof.xs.size(); ++i) {
    if (prof.values[i] == bar.values[i] && prof.values[i] == hat.values[i]) continue;
    if (mismatches++ == 0)
      first_mismatch = Json{{"x", bl::scalar_json(prof.xs[i])},
                            {"value", bl::ext_json(prof.values[i])},
                            {"bar", bl::ext_json(bar.values[i])},
                            {"hat", bl::ext_json(hat.values[i])}};
  }
  Json summary{{"problem", lp.spec.name},
               {"mode", bl::mode_name(lp.spec.mode)},
               {"x_grid", bl::grid_json(xg)},
               {"y_grid", bl::grid_json(params.y_grid)},
               {"eps_sol", bl::scalar_json(params.eps_sol)},
               {"points", prof.xs.size()},
               {"transform_equality", Json{{"equal", mismatches == 0}, {"mismatches", mismatches}}}};
  if (mismatches) summary["transform_equality"]["first_mismatch"] = first_mismatch;
  bl::OutputDir out(o.out);
  if (want_csv(o)) out.write("profile.csv", bl::profile_csv(prof));
  if (want_json(o)) out.write("summary.json", bl::json_text(summary));
  out.commit(run_info("solve", o));
  std::cout << "solved " << lp.spec.name << " on " << prof.xs.size() << " points; transform equality "
            << (mismatches ? "FAILED" : "holds") << "; wrote " << o.out << "\n";
  return mismatches ? kExitError : kExitOk;
}

// ---- check ----

const std::vector<std::string>& check_properties() {
  static const std::vector<std::string> v{"fptusc", "lisc", "lmsc", "kn_inf_compact", "solutions_usc", "continuity", "all"};
  return v;
}

template <class T>
int run_check(const LoadedProblem& lp, const Options& o) {
  if (o.at.empty()) throw bl::ConfigError("cli", "check", "--at is required");
  bl::Problem<T> p = bl::compile_problem<T>(lp.spec);
  bl::CheckParams<T> base = params_of<T>(lp, o);
  std::vector<std::string> props;
  if (o.property == "all") {
    props = bl::corpus_properties();
  } else {
    props = split(o.property, ',');
  }
  for (const auto& pr : props)
    if (std::find(check_properties().begin(), check_properties().end(), pr) == check_properties().end())
      throw bl::ConfigError("cli", "check", "unknown property '" + pr + "'");
  std::vector<bl::Verdict<T>> verdicts;
  Json reports = Json::array();
  bool violated = false;
  for (const auto& at_text : o.at) {
    const T x = bl::ScalarTraits<T>::from_exact(parse_scalar(at_text, "--at"));
    bl::CheckParams<T> params = params_at(lp, base, x);
    for (const auto& pr : props) {
      if (pr == "continuity") {
        auto rep = bl::characterize_continuity(p, x, params);
        Json j{{"property", "continuity"},
               {"point", bl::scalar_json(x)},
               {"consistent", rep.consistent},
               {"fptusc", bl::verdict_json(rep.fptusc)},
               {"lisc", bl::verdict_json(rep.lisc)},
               {"lmsc", bl::verdict_json(rep.lmsc)},
               {"direct_lsc", bl::verdict_json(rep.direct_lsc)},
               {"direct_usc", bl::verdict_json(rep.direct_usc)}};
        reports.push_back(j);
        for (const auto* v : {&rep.fptusc, &rep.lisc, &rep.lmsc, &rep.direct_lsc, &rep.direct_usc}) {
          verdicts.push_back(*v);
          violated = violated || v->violated();
        }
        continue;
      }
      bl::Verdict<T> v;
      if (pr == "fptusc") v = bl::check_fptusc(p, x, params);
      if (pr == "lisc") v = bl::check_lisc(p, x, params);
      if (pr == "lmsc") v = bl::check_lmsc(p, x, params);
      if (pr == "kn_inf_compact") v = bl::check_kn_inf_compact(p, x, params);
      if (pr == "solutions_usc") v = bl::check_solutions_usc(p, x, params);
      Json j = bl::verdict_json(v);
      if (v.witness) j["witness_replays"] = bl::replay_witness(p, *v.witness);
      reports.push_back(j);
      violated = violated || v.violated();
      verdicts.push_back(std::move(v));
    }
  }
  bl::OutputDir out(o.out);
  if (want_json(o)) out.write("verdicts.json", bl::json_text(reports));
  if (want_csv(o)) out.write("summary.csv", bl::verdict_summary_csv(verdicts));
  out.commit(run_info("check", o));
  std::cout << (reports.size() == 1 ? reports[0].dump(2) : reports.dump(2)) << "\n";
  return violated && o.strict ? kExitViolated : kExitOk;
}

template <class Fn>
int dispatch_mode(bl::Mode m, Fn&& fn) {
  if (m == bl::Mode::Exact) return fn(bl::ExactScalar{});
  return fn(double{});
}

// ---- corpus ----

int run_corpus_list() {
  for (const auto& e : bl::corpus_data()) {
    bl::Fixture f = bl::load_fixture_text(e.text, std::string("corpus/") + e.file);
    std::cout << e.name << "\t" << f.cases.size() << " case" << (f.cases.size() == 1 ? "" : "s") << "\t" << f.summary << "\n";
  }
  return kExitOk;
}

int run_corpus_show(const Options& o) {
  if (o.fixture.empty()) throw bl::ConfigError("cli", "corpus_show", "fixture name is required");
  std::cout << bl::corpus_source(o.fixture);
  return kExitOk;
}

int run_corpus_verify(const Options& o) {
  std::vector<std::string> names;
  if (o.all) {
    names = bl::corpus_list();
  } else if (!o.fixture.empty()) {
    names.push_back(o.fixture);
  } else {
    throw bl::ConfigError("cli", "corpus_verify", "give a fixture name or --all");
  }
  Json reports = Json::array();
  bl::CsvWriter table({"fixture", "case", "mode", "value_check", "labels", "agreeing", "agree"});
  bool all_agree = true;
  std::vector<std::string> lattice;
  for (const auto& n : names) {
    bl::CorpusReport r = bl::corpus_verify(n);
    for (auto& v : bl::label_lattice_violations(bl::corpus_instantiate(n))) lattice.push_back(v);
    reports.push_back(bl::corpus_report_json(r));
    for (const auto& c : r.cases) {
      std::size_t ok = 0;
      for (const auto& l : c.labels) ok += l.agree && l.replayed;
      std::string vc = c.values ? (c.values->ok ? "ok" : "FAIL") + std::string(" (max error ") + c.values->max_error + ")" : "skipped";
      table.row({r.fixture, c.name, bl::mode_name(c.mode), vc, std::to_string(c.labels.size()), std::to_string(ok),
                 c.agree() ? "yes" : "no"});
      std::cout << r.fixture << "/" << c.name << ": " << (c.agree() ? "agree" : "DISAGREE") << " (" << ok << "/" << c.labels.size()
                << " labels, values " << vc << ")\n";
    }
    all_agree = all_agree && r.agree();
  }
  for (const auto& l : lattice) std::cout << "label lattice: " << l << "\n";
  bl::OutputDir out(o.out);
  if (want_json(o)) out.write("corpus.json", bl::json_text(Json{{"fixtures", reports}, {"lattice_violations", lattice}}));
  if (want_csv(o)) out.write("agreement.csv", table.str());
  out.commit(run_info("corpus verify", o));
  return all_agree && lattice.empty() ? kExitOk : kExitError;
}

// ---- inventory ----

bl::InventoryConfig load_config(const Options& o) {
  if (o.config.empty()) throw bl::ConfigError("cli", "inventory", "--config is required");
  bl::InventoryConfig c = bl::load_inventory_file(o.config);
  if (!o.grid.empty()) {
    auto parts = split(o.grid, ',');
    c.grid = bl::Grid1D<double>(c.grid.lo(), c.grid.hi(), parse_scalar(parts[0], "--grid").to_double());
    if (parts.size() > 1) c.action_step = parse_scalar(parts[1], "--grid").to_double();
  }
  bl::validate_holding_cost(c.model, c.grid);
  return c;
}

Json diagnostics_json(const bl::InventoryDiagnostics& d) {
  Json j{{"continuity_moduli", d.moduli},
         {"starts_at_zero", d.starts_at_zero},
         {"monotone_in_horizon", d.monotone},
         {"max_excess_over_never_order_bound", d.max_bound_excess},
         {"never_order_bound_ok", d.bound_ok},
         {"sigma_path",
          Json{{"checked", d.sigma.checked}, {"infeasible", d.sigma.infeasible}, {"discontinuous", d.sigma.discontinuous}}}};
  if (d.sigma.first_infeasible) j["sigma_path"]["first_infeasible"] = *d.sigma.first_infeasible;
  if (d.oracle_max_delta) j["oracle_max_delta"] = *d.oracle_max_delta;
  return j;
}

int run_inventory(const Options& o, bool solve) {
  bl::InventoryConfig c = load_config(o);
  bl::ValueTable u = bl::backward_induction(c.model, c.horizon, c.grid, c.action_step);
  bl::InventoryDiagnostics d = bl::diagnose(c.model, u, c.grid, c.action_step);
  if (o.oracle) {
    std::vector<double> best = bl::enumerate_policies(c.model, c.horizon, c.grid, c.action_step);
    double delta = 0;
    const auto& last = u.values.back();
    for (std::size_t i = 0; i < best.size(); ++i) delta = std::max(delta, std::fabs(best[i] - last[i]));
    d.oracle_max_delta = delta;
  }
  Json diag = diagnostics_json(d);
  diag["variant"] = bl::variant_name(c.model.variant());
  diag["config"] = bl::inventory_config_to_json(c);
  bl::OutputDir out(o.out);
  if (want_json(o)) out.write("diagnostics.json", bl::json_text(diag));
  if (solve && want_csv(o)) {
    out.write("value_table.csv", bl::value_table_csv(u));
    for (int t = 0; t <= u.horizon(); ++t) {
      bl::CsvWriter w({"x", "value", "order"});
      const auto s = static_cast<std::size_t>(t);
      for (std::size_t i = u.valid_from[s]; i < u.xs.size(); ++i)
        w.row({bl::scalar_text(u.xs[i]), bl::scalar_text(u.values[s][i]), bl::scalar_text(u.policy[s][i])});
      out.write("stage_" + std::to_string(t) + ".csv", w.str());
    }
  }
  out.commit(run_info(solve ? "inventory solve" : "inventory diagnose", o));
  std::cout << diag.dump(2) << "\n";
  bool ok = d.starts_at_zero && d.monotone && d.bound_ok && (!d.oracle_max_delta || *d.oracle_max_delta <= 1e-9);
  return ok ? kExitOk : kExitError;
}

// ---- minimax ----

bl::MinimaxSpec load_minimax_arg(const Options& o) {
  if (o.problem.empty()) throw bl::ConfigError("cli", "minimax", "--problem is required");
  bl::MinimaxSpec s = bl::load_minimax_file(o.problem);
  if (!o.mode.empty()) s.mode = bl::parse_mode(o.mode);
  if (!o.grid.empty()) {
    auto parts = split(o.grid, ',');
    if (parts.empty() || parts.size() > 3) throw bl::ConfigError("cli", "parse_args", "--grid expects x_step[,a_step[,b_step]]");
    s.x_step = parse_scalar(parts[0], "--grid");
    if (parts.size() > 1) s.a_step = parse_scalar(parts[1], "--grid");
    if (parts.size() > 2) s.b_step = parse_scalar(parts[2], "--grid");
  }
  return s;
}

template <class T>
T eps_of(const Options& o) {
  return o.eps.empty() ? bl::default_eps_sol<T>() : bl::ScalarTraits<T>::from_exact(parse_scalar(o.eps, "--eps"));
}

template <class T>
int run_minimax_solve(const bl::MinimaxSpec& s, const Options& o) {
  bl::Minimax<T> m = bl::compile_minimax<T>(s);
  bl::MinimaxProfile<T> prof = bl::compute_minimax_profile(m, eps_of<T>(o));
  Json summary{{"problem", s.name}, {"mode", bl::mode_name(s.mode)}, {"points", prof.xs.size()}};
  if (o.oracle) {
    Json duality = Json::array();
    std::size_t swap_bad = 0;
    bl::SwappedMinimax<T> sw = bl::swap_transform(m);
    for (const auto& x : prof.xs) {
      auto d = bl::weak_duality_at(m, x, m.a_grid, m.b_grid);
      duality.push_back(Json{{"x", bl::scalar_json(x)},
                             {"min_max", bl::ext_json(d.min_max)},
                             {"max_min", bl::ext_json(d.max_min)},
                             {"rectangular", d.rectangular},
                             {"holds", d.holds}});
      for (const auto& a : bl::sample_interval(m.phi_a_at(x), m.a_grid))
        for (const auto& b : bl::sample_interval(m.phi_b_at(x, a), m.b_grid))
          if (!sw.phi_b_contains(x, b, a) || !(sw.value(x, b, a) == m.value(x, a, b))) ++swap_bad;
    }
    summary["weak_duality"] = duality;
    summary["swap_inconsistencies"] = swap_bad;
  }
  bl::OutputDir out(o.out);
  if (want_csv(o)) {
    out.write("worst_loss.csv", bl::worst_loss_csv(prof));
    out.write("minimax.csv", bl::minimax_csv(prof));
  }
  if (want_json(o)) out.write("summary.json", bl::json_text(summary));
  out.commit(run_info("minimax solve", o));
  std::cout << "solved minimax " << s.name << " on " << prof.xs.size() << " points; wrote " << o.out << "\n";
  return kExitOk;
}

template <class T>
int run_minimax_check(const bl::MinimaxSpec& s, const Options& o) {
  if (o.at.empty()) throw bl::ConfigError("cli", "minimax_check", "--at is required");
  bl::Minimax<T> m = bl::compile_minimax<T>(s);
  bl::CheckParams<T> params = bl::minimax_params(m);
  if (o.depth >= 0) params.depth = o.depth;
  if (!o.eps.empty()) params.eps_sol = eps_of<T>(o);
  std::vector<std::string> props = o.property.empty() || o.property == "all"
                                       ? std::vector<std::string>{"b_uniform_fptusc", "b_fptlisc", "b_fptlmsc", "a_lsc", "swap_kn"}
                                       : split(o.property, ',');
  Json reports = Json::array();
  std::vector<bl::Verdict<T>> verdicts;
  bool violated = false;
  for (const auto& at_text : o.at) {
    const T x = bl::ScalarTraits<T>::from_exact(parse_scalar(at_text, "--at"));
    for (const auto& pr : props) {
      if (pr == "swap_kn") {
        Json entries = Json::array();
        for (auto& e : bl::swap_kn_diagnostic(m, x, params)) {
          entries.push_back(Json{{"b", bl::scalar_json(e.b)}, {"verdict", bl::verdict_json(e.verdict)}});
          violated = violated || e.verdict.violated();
        }
        reports.push_back(Json{{"property", "swap_kn"}, {"point", bl::scalar_json(x)}, {"per_b", entries}});
        continue;
      }
      bl::Verdict<T> v;
      if (pr == "b_uniform_fptusc") {
        v = bl::check_b_uniform_fptusc(m, x, params);
      } else if (pr == "b_fptlisc") {
        v = bl::check_b_fptlisc(m, x, params);
      } else if (pr == "b_fptlmsc") {
        v = bl::check_b_fptlmsc(m, x, params);
      } else if (pr == "a_lsc") {
        v = bl::check_a_lsc(m, x, params);
      } else {
        throw bl::ConfigError("cli", "minimax_check", "unknown property '" + pr + "'");
      }
      reports.push_back(bl::verdict_json(v));
      violated = violated || v.violated();
      verdicts.push_back(std::move(v));
    }
  }
  bl::OutputDir out(o.out);
  if (want_json(o)) out.write("verdicts.json", bl::json_text(reports));
  if (want_csv(o)) out.write("summary.csv", bl::verdict_summary_csv(verdicts));
  out.commit(run_info("minimax check", o));
  std::cout << reports.dump(2) << "\n";
  return violated && o.strict ? kExitViolated : kExitOk;
}

// ---- plot ----

int run_plot(const Options& o) {
  bl::PlotData d;
  if (!o.variants.empty()) {
    auto parts = split(o.variants, ',');
    if (parts.size() != 2) throw bl::ConfigError("cli", "plot", "--variants expects L,M");
    double L = parse_scalar(parts[0], "--variants").to_double(), M = parse_scalar(parts[1], "--variants").to_double();
    auto r = split(o.x_range.empty() ? "0:" + parts[1] + ":1/10" : o.x_range, ':');
    if (r.size() != 3) throw bl::ConfigError("cli", "plot", "--x-range expects lo:hi:step");
    d = bl::feasibility_boundaries(L, M,
                                   bl::Grid1D<double>(parse_scalar(r[0], "--x-range").to_double(), parse_scalar(r[1], "--x-range").to_double(),
                                                      parse_scalar(r[2], "--x-range").to_double()));
  } else if (!o.config.empty()) {
    bl::InventoryConfig c = load_config(o);
    d = bl::plot_data(bl::backward_induction(c.model, c.horizon, c.grid, c.action_step));
  } else if (!o.problem.empty() && o.problem.size() > 5 && std::filesystem::exists(o.problem) &&
             bl::parse_json_text(bl::read_text_file(o.problem, "cli", "plot"), o.problem, "cli", "plot").contains("a_domain")) {
    bl::MinimaxSpec s = load_minimax_arg(o);
    dispatch_mode(s.mode, [&](auto tag) {
      using T = decltype(tag);
      d = bl::plot_data(bl::compute_minimax_profile(bl::compile_minimax<T>(s), eps_of<T>(o)));
      return 0;
    });
  } else {
    LoadedProblem lp = load_problem_arg(o);
    dispatch_mode(lp.spec.mode, [&](auto tag) {
      using T = decltype(tag);
      bl::Problem<T> p = bl::compile_problem<T>(lp.spec);
      bl::CheckParams<T> params = params_of<T>(lp, o);
      d = bl::plot_data(bl::compute_profile(p, x_grid_of<T>(lp), params.y_grid, params.eps_sol));
      return 0;
    });
  }
  bl::OutputDir out(o.out);
  out.write("plot.csv", d.str());
  out.commit(run_info("plot", o));
  std::cout << "wrote " << (std::filesystem::path(o.out) / "plot.csv").string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parametric minimization, semicontinuity checks, inventory control and minimax on sampled grids"};
  app.require_subcommand(1);
  Options o;
  int status = kExitOk;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--out", o.out, "output directory (replaced atomically)");
    c->add_option("--format", o.format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
    c->add_flag("--strict", o.strict, "exit 2 when any verdict is Violated");
  };
  auto add_problem = [&](CLI::App* c) {
    c->add_option("--problem", o.problem, "corpus fixture name (name or name:case) or problem file");
    c->add_option("--mode", o.mode, "float or exact")->check(CLI::IsMember({"float", "exact"}));
    c->add_option("--grid", o.grid, "x_step[,y_step] (minimax: x_step[,a_step[,b_step]])");
    c->add_option("--eps", o.eps, "solution tolerance");
  };

  auto* solve = app.add_subcommand("solve", "value profile and transform equality on the x grid");
  add_problem(solve);
  add_common(solve);

  auto* check = app.add_subcommand("check", "run semicontinuity checkers at base points");
  add_problem(check);
  add_common(check);
  check->add_option("--property", o.property, "fptusc, lisc, lmsc, kn_inf_compact, solutions_usc, continuity or all (comma list)")
      ->required();
  check->add_option("--at", o.at, "base point(s)")->delimiter(',');
  check->add_option("--depth", o.depth, "probe depth K");

  auto* corpus = app.add_subcommand("corpus", "counterexample corpus");
  corpus->require_subcommand(1);
  auto* clist = corpus->add_subcommand("list", "list fixtures");
  auto* cshow = corpus->add_subcommand("show", "print a fixture definition");
  cshow->add_option("name", o.fixture, "fixture name")->required();
  auto* cverify = corpus->add_subcommand("verify", "recompute values and labeled checks");
  cverify->add_option("name", o.fixture, "fixture name");
  cverify->add_flag("--all", o.all, "verify every fixture");
  add_common(cverify);

  auto* inventory = app.add_subcommand("inventory", "finite-horizon inventory control");
  inventory->require_subcommand(1);
  auto* isolve = inventory->add_subcommand("solve", "backward induction, stage CSVs and diagnostics");
  auto* idiag = inventory->add_subcommand("diagnose", "continuity and bound diagnostics");
  for (auto* c : {isolve, idiag}) {
    c->add_option("--config", o.config, "inventory config file")->required();
    c->add_option("--grid", o.grid, "state_step[,action_step] override");
    c->add_flag("--oracle", o.oracle, "cross-check against exhaustive policy enumeration");
    add_common(c);
  }

  auto* minimax = app.add_subcommand("minimax", "single-stage minimax");
  minimax->require_subcommand(1);
  auto* msolve = minimax->add_subcommand("solve", "worst-loss surface and minimax profile");
  auto* mcheck = minimax->add_subcommand("check", "minimax semicontinuity checks");
  for (auto* c : {msolve, mcheck}) {
    add_problem(c);
    add_common(c);
  }
  msolve->add_flag("--oracle", o.oracle, "weak duality and swap consistency at every grid x");
  mcheck->add_option("--property", o.property, "b_uniform_fptusc, b_fptlisc, b_fptlmsc, a_lsc, swap_kn or all");
  mcheck->add_option("--at", o.at, "base point(s)")->delimiter(',');
  mcheck->add_option("--depth", o.depth, "probe depth K");

  auto* plot = app.add_subcommand("plot", "long-format plot data (series, x, value)");
  add_problem(plot);
  add_common(plot);
  plot->add_option("--config", o.config, "inventory config: one series per stage");
  plot->add_option("--variants", o.variants, "L,M: feasible-action boundaries of the four inventory variants");
  plot->add_option("--x-range", o.x_range, "lo:hi:step for --variants");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      LoadedProblem lp = load_problem_arg(o);
      status = dispatch_mode(lp.spec.mode, [&](auto tag) { return run_solve<decltype(tag)>(lp, o); });
    } else if (*check) {
      LoadedProblem lp = load_problem_arg(o);
      status = dispatch_mode(lp.spec.mode, [&](auto tag) { return run_check<decltype(tag)>(lp, o); });
    } else if (*clist) {
      status = run_corpus_list();
    } else if (*cshow) {
      status = run_corpus_show(o);
    } else if (*cverify) {
      status = run_corpus_verify(o);
    } else if (*isolve || *idiag) {
      status = run_inventory(o, isolve->parsed());
    } else if (*msolve || *mcheck) {
      bl::MinimaxSpec s = load_minimax_arg(o);
      status = dispatch_mode(s.mode, [&](auto tag) {
        using T = decltype(tag);
        return msolve->parsed() ? run_minimax_solve<T>(s, o) : run_minimax_check<T>(s, o);
      });
    } else if (*plot) {
      status = run_plot(o);
    }
  } catch (const bl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return status;
}
