#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "bergelab/checkers/problem_checks.hpp"
#include "bergelab/parametric/problem_file.hpp"

namespace bergelab {

/** @brief Mode-independent minimax definition: inf over Phi_A(x) of sup over Phi_B(x, a) of f. */
struct MinimaxSpec {
  std::string name;
  Mode mode = Mode::Float;
  ExactScalar x_lo, x_hi, a_lo, a_hi, b_lo, b_hi;
  Expr f;
  MultifunctionSpec phi_a;
  MultifunctionSpec phi_b;
  ExactScalar x_step{Rational(1, 100)};
  ExactScalar a_step{Rational(1, 100)};
  ExactScalar b_step{Rational(1, 100)};
};

template <class T>
struct Minimax {
  std::string name;
  Interval<T> x_domain, a_domain, b_domain;
  Expr f;
  MultifunctionSpec phi_a;
  MultifunctionSpec phi_b;
  Grid1D<T> x_grid, a_grid, b_grid;

  Interval<T> phi_a_at(const T& x) const { return phi_at(phi_a, Env<T>::of_x(x)); }
  Interval<T> phi_b_at(const T& x, const T& a) const { return phi_at(phi_b, Env<T>::of_xa(x, a)); }
  ExtReal<T> value(const T& x, const T& a, const T& b) const { return eval(f, Env<T>::of_xab(x, a, b)); }
};

inline void validate_minimax_spec(const MinimaxSpec& s) {
  if (s.x_hi < s.x_lo || s.a_hi < s.a_lo || s.b_hi < s.b_lo)
    throw ValidationError("minimax", "validate", "a domain has lo > hi");
  validate_expr(s.f, s.mode, {Var::x, Var::a, Var::b});
  validate_multifunction(s.phi_a, s.mode, {Var::x});
  validate_multifunction(s.phi_b, s.mode, {Var::x, Var::a});
}

template <class T>
Minimax<T> compile_minimax(const MinimaxSpec& s) {
  if (s.mode != ScalarTraits<T>::mode)
    throw ValidationError("minimax", "compile", std::string("problem '") + s.name + "' is " + mode_name(s.mode) +
                                                    " mode but was instantiated as " + mode_name(ScalarTraits<T>::mode));
  validate_minimax_spec(s);
  auto cv = [](const ExactScalar& v) { return ScalarTraits<T>::from_exact(v); };
  Minimax<T> m;
  m.name = s.name;
  m.x_domain = Interval<T>::closed(cv(s.x_lo), cv(s.x_hi));
  m.a_domain = Interval<T>::closed(cv(s.a_lo), cv(s.a_hi));
  m.b_domain = Interval<T>::closed(cv(s.b_lo), cv(s.b_hi));
  m.f = s.f;
  m.phi_a = s.phi_a;
  m.phi_b = s.phi_b;
  m.x_grid = Grid1D<T>(cv(s.x_lo), cv(s.x_hi), cv(s.x_step));
  m.a_grid = Grid1D<T>(cv(s.a_lo), cv(s.a_hi), cv(s.a_step));
  m.b_grid = Grid1D<T>(cv(s.b_lo), cv(s.b_hi), cv(s.b_step));
  return m;
}

/** @brief Grid points of iv plus its closed finite endpoints, sorted and unique. */
template <class T>
std::vector<T> sample_interval(const Interval<T>& iv, const Grid1D<T>& grid) {
  Fiber<T> f;
  f.hull = iv;
  return sample_actions(f, grid);
}

template <class T>
void require_a_feasible(const Minimax<T>& m, const T& x, const T& a, const char* op) {
  if (!m.x_domain.contains(x)) throw PreconditionFailed("minimax", op, "x = " + ScalarTraits<T>::str(x) + " is outside x_domain");
  if (!m.phi_a_at(x).contains(a))
    throw InfeasibleAction("minimax", op, "a = " + ScalarTraits<T>::str(a) + " is not in Phi_A(" + ScalarTraits<T>::str(x) + ")");
}

template <class T>
std::vector<T> sampled_b(const Minimax<T>& m, const T& x, const T& a, const Grid1D<T>& b_grid, const char* op) {
  std::vector<T> bs = sample_interval(m.phi_b_at(x, a), b_grid);
  if (bs.empty())
    throw InfeasibleAction("minimax", op,
                           "no sampled b in Phi_B(" + ScalarTraits<T>::str(x) + ", " + ScalarTraits<T>::str(a) + ") at b step " +
                                 ScalarTraits<T>::str(b_grid.step()));
  return bs;
}

/** @brief f#(x, a): maximum of f(x, a, .) over sampled Phi_B(x, a). */
template <class T>
ExtReal<T> worst_loss_at(const Minimax<T>& m, const T& x, const T& a, const Grid1D<T>& b_grid) {
  require_a_feasible(m, x, a, "worst_loss_at");
  ExtReal<T> best = ExtReal<T>::neg_inf();
  for (const auto& b : sampled_b(m, x, a, b_grid, "worst_loss_at")) best = ext_max(best, m.value(x, a, b));
  return best;
}

/** @brief f*(x): minimum of f#(x, .) over sampled Phi_A(x). */
template <class T>
ExtReal<T> minimax_at(const Minimax<T>& m, const T& x, const Grid1D<T>& a_grid, const Grid1D<T>& b_grid) {
  if (!m.x_domain.contains(x)) throw PreconditionFailed("minimax", "minimax_at", "x = " + ScalarTraits<T>::str(x) + " is outside x_domain");
  std::vector<T> as = sample_interval(m.phi_a_at(x), a_grid);
  if (as.empty()) throw PreconditionFailed("minimax", "minimax_at", "no sampled a in Phi_A(" + ScalarTraits<T>::str(x) + ")");
  ExtReal<T> best = ExtReal<T>::pos_inf();
  for (const auto& a : as) best = ext_min(best, worst_loss_at(m, x, a, b_grid));
  return best;
}

template <class T>
struct MinimaxSolution {
  ExtReal<T> value;
  std::vector<T> a_star;
  /** Per sampled a: (a, f#(x, a), eps-argmax b list). */
  struct Row {
    T a;
    ExtReal<T> worst;
    std::vector<T> b_sharp;
  };
  std::vector<Row> rows;
};

namespace detail {

template <class T>
bool within_eps(const ExtReal<T>& v, const ExtReal<T>& target, const T& eps, bool below) {
  if (!target.is_finite()) return v == target;
  return below ? v <= ExtReal<T>(target.value() + eps) : ExtReal<T>(target.value() - eps) <= v;
}

}  // namespace detail

/** @brief eps-argmin of f#(x, .) and eps-argmax of f(x, a, .) for every sampled a. */
template <class T>
MinimaxSolution<T> solution_sets_at(const Minimax<T>& m, const T& x, const Grid1D<T>& a_grid, const Grid1D<T>& b_grid, const T& eps) {
  if (!m.x_domain.contains(x))
    throw PreconditionFailed("minimax", "solution_sets_at", "x = " + ScalarTraits<T>::str(x) + " is outside x_domain");
  MinimaxSolution<T> sol;
  sol.value = ExtReal<T>::pos_inf();
  std::vector<T> as = sample_interval(m.phi_a_at(x), a_grid);
  if (as.empty()) throw PreconditionFailed("minimax", "solution_sets_at", "no sampled a in Phi_A(" + ScalarTraits<T>::str(x) + ")");
  for (const auto& a : as) {
    std::vector<T> bs = sampled_b(m, x, a, b_grid, "solution_sets_at");
    std::vector<ExtReal<T>> vs;
    ExtReal<T> worst = ExtReal<T>::neg_inf();
    for (const auto& b : bs) {
      vs.push_back(m.value(x, a, b));
      worst = ext_max(worst, vs.back());
    }
    typename MinimaxSolution<T>::Row row{a, worst, {}};
    for (std::size_t i = 0; i < bs.size(); ++i)
      if (detail::within_eps(vs[i], worst, eps, false)) row.b_sharp.push_back(bs[i]);
    sol.value = ext_min(sol.value, worst);
    sol.rows.push_back(std::move(row));
  }
  for (const auto& r : sol.rows)
    if (detail::within_eps(r.worst, sol.value, eps, true)) sol.a_star.push_back(r.a);
  return sol;
}

/** @brief Swapped structures: Phi_A'(x) = union of Phi_B(x, a), Phi_B'(x, b) = {a : b in Phi_B(x, a)}, f'(x, b, a) = f(x, a, b). */
template <class T>
struct SwappedMinimax {
  const Minimax<T>* base;

  /** Sampled b reachable from some sampled a in Phi_A(x). */
  std::vector<T> phi_a_sample(const T& x, const Grid1D<T>& a_grid, const Grid1D<T>& b_grid) const {
    std::vector<T> out;
    for (const auto& a : sample_interval(base->phi_a_at(x), a_grid)) {
      auto bs = sample_interval(base->phi_b_at(x, a), b_grid);
      out.insert(out.end(), bs.begin(), bs.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  bool phi_b_contains(const T& x, const T& b, const T& a) const {
    return base->phi_a_at(x).contains(a) && base->phi_b_at(x, a).contains(b);
  }

  std::vector<T> phi_b_sample(const T& x, const T& b, const Grid1D<T>& a_grid) const {
    std::vector<T> out;
    for (const auto& a : sample_interval(base->phi_a_at(x), a_grid))
      if (base->phi_b_at(x, a).contains(b)) out.push_back(a);
    return out;
  }

  ExtReal<T> value(const T& x, const T& b, const T& a) const { return base->value(x, a, b); }
};

template <class T>
SwappedMinimax<T> swap_transform(const Minimax<T>& m) {
  return SwappedMinimax<T>{&m};
}

/** @brief Parametric problem (X, A, Phi_A, f#) whose value function is f*. */
template <class T>
Problem<T> worst_loss_problem(const Minimax<T>& m, const Grid1D<T>& b_grid) {
  Problem<T> p;
  p.name = m.name + ":worst-loss";
  p.x_domain = m.x_domain;
  p.y_domain = m.a_domain;
  p.fiber = [mm = m, b_grid](const T& x) {
    Fiber<T> f;
    f.hull = mm.phi_a_at(x);
    f.u = [mm, b_grid, x](const T& a) {
      ExtReal<T> best = ExtReal<T>::neg_inf();
      for (const auto& b : sample_interval(mm.phi_b_at(x, a), b_grid)) best = ext_max(best, mm.value(x, a, b));
      return best;
    };
    return f;
  };
  return p;
}

/** @brief Weak-duality pair from one sample of f: min_a max_b and max_b min_a over a rectangular sample. */
template <class T>
struct DualityCheck {
  ExtReal<T> min_max;
  ExtReal<T> max_min;
  bool rectangular = true;
  bool holds = true;
};

template <class T>
DualityCheck<T> weak_duality_at(const Minimax<T>& m, const T& x, const Grid1D<T>& a_grid, const Grid1D<T>& b_grid) {
  std::vector<T> as = sample_interval(m.phi_a_at(x), a_grid);
  if (as.empty()) throw PreconditionFailed("minimax", "weak_duality_at", "no sampled a in Phi_A(" + ScalarTraits<T>::str(x) + ")");
  std::vector<T> bs = sampled_b(m, x, as.front(), b_grid, "weak_duality_at");
  DualityCheck<T> d;
  for (const auto& a : as)
    if (sample_interval(m.phi_b_at(x, a), b_grid) != bs) d.rectangular = false;
  std::vector<std::vector<ExtReal<T>>> table(as.size());
  for (std::size_t i = 0; i < as.size(); ++i)
    for (const auto& b : bs) table[i].push_back(m.value(x, as[i], b));
  d.min_max = ExtReal<T>::pos_inf();
  for (const auto& row : table) d.min_max = ext_min(d.min_max, *std::max_element(row.begin(), row.end()));
  d.max_min = ExtReal<T>::neg_inf();
  for (std::size_t j = 0; j < bs.size(); ++j) {
    ExtReal<T> lo = ExtReal<T>::pos_inf();
    for (const auto& row : table) lo = ext_min(lo, row[j]);
    d.max_min = ext_max(d.max_min, lo);
  }
  d.holds = !d.rectangular || d.max_min <= d.min_max;
  return d;
}

template <class T>
CheckParams<T> minimax_params(const Minimax<T>& m) {
  return make_params(m.a_grid);
}

/** @brief eps = 2^-j, j = 0..8. */
template <class T>
std::vector<T> b_eps_schedule() {
  std::vector<T> e;
  for (int j = 0; j <= 8; ++j) e.push_back(ScalarTraits<T>::pow2(-j));
  return e;
}

/**
 * @brief B-uniform FPTusc at x through f#: for the best sampled a and each eps, nearby x_n must admit
 * a_n with f#(x_n, a_n) <= f#(x, a) + eps. Cross-checked with a direct usc test of f* along the probes.
 */
template <class T>
Verdict<T> check_b_uniform_fptusc(const Minimax<T>& m, const T& x, const CheckParams<T>& params) {
  Problem<T> p = worst_loss_problem(m, m.b_grid);
  ProbeSet<T> ps = build_probes(p, x, params, "check_b_uniform_fptusc");
  Verdict<T> v = detail::make_verdict("b_uniform_fptusc", ps, params);
  std::optional<T> eps_hit;
  for (const auto& eps : b_eps_schedule<T>()) {
    CheckParams<T> q = params;
    q.min_gap = eps < params.min_gap ? params.min_gap : eps;
    Verdict<T> u = detail::fptusc_from(ps, q);
    if (u.violated()) {
      v.status = Status::Violated;
      v.witness = u.witness;
      eps_hit = eps;
      break;
    }
  }
  std::size_t i = 0;
  GridFunction<T> f = detail::value_along_probes(ps, &i);
  Verdict<T> direct = check_usc_fn_at(f, i, params.min_gap);
  v.note = std::string("schedule eps = 2^-j, j=0..8") + (eps_hit ? "; violated at eps = " + ScalarTraits<T>::str(*eps_hit) : "") +
           "; direct usc of f* " + (direct.violated() == v.violated() ? "agrees" : "disagrees");
  return v;
}

/** @brief B-FPTlisc at x, via lower semicontinuity of f* along the probes. */
template <class T>
Verdict<T> check_b_fptlisc(const Minimax<T>& m, const T& x, const CheckParams<T>& params) {
  Problem<T> p = worst_loss_problem(m, m.b_grid);
  ProbeSet<T> ps = build_probes(p, x, params, "check_b_fptlisc");
  Verdict<T> v = detail::lisc_from(ps, params);
  v.property = "b_fptlisc";
  std::size_t i = 0;
  GridFunction<T> f = detail::value_along_probes(ps, &i);
  Verdict<T> direct = check_lsc_fn_at(f, i, params.min_gap);
  v.note = std::string("direct lsc of f* ") + (direct.violated() == v.violated() ? "agrees" : "disagrees");
  return v;
}

/** @brief B-FPTlmsc at x: B-FPTlisc plus attainment of the outer minimum (needs a certified f*(x)). */
template <class T>
Verdict<T> check_b_fptlmsc(const Minimax<T>& m, const T& x, const CheckParams<T>& params) {
  Problem<T> p = worst_loss_problem(m, m.b_grid);
  ProbeSet<T> ps = build_probes(p, x, params, "check_b_fptlmsc");
  Verdict<T> v = detail::lmsc_from(p, ps, params, detail::lisc_from(ps, params));
  v.property = "b_fptlmsc";
  return v;
}

/**
 * @brief A-lower semicontinuity at x along a_n -> a: each sampled b in Phi_B(x, a) must stay within
 * the cluster radius of Phi_B(x_n, a_n) in the limit, with a_n the sampled point of Phi_A(x_n) nearest a.
 */
template <class T>
Verdict<T> check_a_lsc(const Minimax<T>& m, const T& x, const CheckParams<T>& params) {
  if (!m.x_domain.contains(x)) throw PreconditionFailed("minimax", "check_a_lsc", "x = " + ScalarTraits<T>::str(x) + " is outside x_domain");
  const Grid1D<T>& bg = m.b_grid;
  const T r = detail::cluster_radius(bg);
  Verdict<T> v;
  v.property = "a_lsc";
  v.point = x;
  std::vector<T> radii = schedule_radii(params);
  v.resolution = Resolution<T>{radii.back(), bg.step(), static_cast<int>(radii.size()) - 1, schedule_name(params)};
  auto thin = [](std::vector<T> s, std::size_t cap) {
    if (s.size() <= cap) return s;
    std::vector<T> out;
    for (std::size_t k = 0; k < cap; ++k) out.push_back(s[k * (s.size() - 1) / (cap - 1)]);
    return out;
  };
  std::vector<T> as = thin(sample_interval(m.phi_a_at(x), params.y_grid), 17);
  if (as.empty()) throw PreconditionFailed("minimax", "check_a_lsc", "no sampled a in Phi_A(" + ScalarTraits<T>::str(x) + ")");
  // probe points per depth, with the nearest feasible a_n for each a
  struct Cell {
    T xn;
    std::vector<T> an;
  };
  std::vector<std::vector<Cell>> cells(radii.size());
  for (std::size_t k = 0; k < radii.size(); ++k) {
    for (auto& [slot, px] : probe_points(x, radii[k])) {
      if (px == x || !m.x_domain.contains(px)) continue;
      std::vector<T> an_pool = sample_interval(m.phi_a_at(px), params.y_grid);
      if (an_pool.empty()) continue;
      Cell c{px, {}};
      for (const auto& a : as) c.an.push_back(an_pool[detail::nearest_index(an_pool, a)]);
      cells[k].push_back(std::move(c));
    }
  }
  for (std::size_t ai = 0; ai < as.size(); ++ai) {
    const T& a = as[ai];
    for (const auto& b : thin(sample_interval(m.phi_b_at(x, a), bg), 17)) {
      std::vector<T> rs;
      std::vector<ExtReal<T>> dists;
      std::vector<const Cell*> picks;
      for (std::size_t k = 0; k < radii.size(); ++k) {
        const Cell* worst = nullptr;
        ExtReal<T> wd = ExtReal<T>::neg_inf();
        for (const auto& c : cells[k]) {
          ExtReal<T> d = m.phi_b_at(c.xn, c.an[ai]).distance(b);
          if (!worst || wd < d) {
            worst = &c;
            wd = d;
          }
        }
        if (!worst) continue;
        rs.push_back(radii[k]);
        dists.push_back(wd);
        picks.push_back(worst);
      }
      // jump in distance beyond the cluster radius
      std::vector<ExtReal<T>> excess;
      for (const auto& d : dists) excess.push_back(d.is_finite() ? ExtReal<T>(d.value() - r) : d);
      JumpResult<T> jr = detect_jump(rs, excess, params.min_gap);
      if (!jr.violated) continue;
      Witness<T> w;
      w.kind = "a_lsc";
      w.x = x;
      w.y = b;
      w.level = a;
      w.radius = r;
      w.gap = jr.gap;
      w.y_grid = bg;
      for (auto i : jr.seq) w.seq.push_back(WitnessPoint<T>{picks[i]->xn, picks[i]->an[ai], dists[i], rs[i]});
      v.status = Status::Violated;
      v.witness = std::move(w);
      v.note = "b isolated from Phi_B(x_n, a_n) along a_n -> a";
      return v;
    }
  }
  return v;
}

/** @brief Replays an a_lsc witness: every Phi_B(x_n, a_n) stays at least radius + gap away from b. */
template <class T>
bool replay_a_lsc(const Minimax<T>& m, const Witness<T>& w) {
  if (w.kind != "a_lsc" || !w.y || !w.level || !w.radius || w.seq.empty()) return false;
  if (!m.phi_a_at(w.x).contains(*w.level) || !m.phi_b_at(w.x, *w.level).contains(*w.y)) return false;
  for (const auto& e : w.seq) {
    if (!e.y || e.radius < ScalarTraits<T>::abs(e.x - w.x)) return false;
    if (!m.phi_a_at(e.x).contains(*e.y)) return false;
    if (m.phi_b_at(e.x, *e.y).distance(*w.y) < ExtReal<T>(*w.radius + w.gap)) return false;
  }
  return true;
}

template <class T>
struct SwapKnEntry {
  T b;
  Verdict<T> verdict;
};

/**
 * @brief KN-inf-compactness diagnostic of f'(x, b, a) = f(x, a, b) over Phi_B'(., b), one parametric
 * problem in x per sampled b of Phi_A'(x).
 */
template <class T>
std::vector<SwapKnEntry<T>> swap_kn_diagnostic(const Minimax<T>& m, const T& x, const CheckParams<T>& params, std::size_t max_b = 9) {
  SwappedMinimax<T> sw = swap_transform(m);
  std::vector<T> bs = sw.phi_a_sample(x, params.y_grid, m.b_grid);
  std::vector<T> pick;
  if (bs.size() <= max_b) {
    pick = bs;
  } else {
    for (std::size_t k = 0; k < max_b; ++k) pick.push_back(bs[k * (bs.size() - 1) / (max_b - 1)]);
  }
  std::vector<SwapKnEntry<T>> out;
  for (const auto& b : pick) {
    Problem<T> p;
    p.name = m.name + ":swapped";
    p.x_domain = m.x_domain;
    p.y_domain = m.a_domain;
    p.fiber = [mm = m, b](const T& z) {
      Fiber<T> f;
      f.hull = mm.phi_a_at(z);
      f.admits = [mm, b, z](const T& a) { return mm.phi_b_at(z, a).contains(b); };
      f.u = [mm, b, z](const T& a) { return mm.value(z, a, b); };
      return f;
    };
    try {
      out.push_back({b, check_kn_inf_compact(p, x, params)});
    } catch (const Error& e) {
      Verdict<T> v;
      v.property = "kn_inf_compact";
      v.point = x;
      v.status = Status::NotApplicable;
      v.note = e.what();
      out.push_back({b, v});
    }
  }
  return out;
}

template <class T>
struct MinimaxProfile {
  std::vector<T> xs;
  std::vector<ExtReal<T>> values;
  std::vector<std::vector<T>> a_star;
  /** (x, a, f#) cells of the worst-loss surface. */
  std::vector<std::tuple<T, T, ExtReal<T>>> surface;
};

template <class T>
MinimaxProfile<T> compute_minimax_profile(const Minimax<T>& m, const T& eps, unsigned workers = worker_count()) {
  MinimaxProfile<T> prof;
  prof.xs = m.x_grid.points();
  std::vector<MinimaxSolution<T>> sols(prof.xs.size());
  parallel_for(
      prof.xs.size(), [&](std::size_t i) { sols[i] = solution_sets_at(m, prof.xs[i], m.a_grid, m.b_grid, eps); }, workers);
  for (std::size_t i = 0; i < prof.xs.size(); ++i) {
    prof.values.push_back(sols[i].value);
    prof.a_star.push_back(sols[i].a_star);
    for (const auto& r : sols[i].rows) prof.surface.emplace_back(prof.xs[i], r.a, r.worst);
  }
  return prof;
}

inline MinimaxSpec minimax_spec_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaFailure("", "minimax problem must be an object");
  reject_unknown_keys(j, "", {"name", "mode", "x_domain", "a_domain", "b_domain", "f", "phi_A", "phi_B", "grid", "note"});
  MinimaxSpec s;
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw SchemaFailure("/name", "'name' must be a string");
    s.name = j["name"].get<std::string>();
  }
  if (j.contains("mode")) {
    if (!j["mode"].is_string()) throw SchemaFailure("/mode", "'mode' must be \"float\" or \"exact\"");
    try {
      s.mode = parse_mode(j["mode"].get<std::string>());
    } catch (const Error& e) {
      throw SchemaFailure("/mode", e.detail());
    }
  }
  auto domain = [&](const char* key, ExactScalar& lo, ExactScalar& hi) {
    const std::string p = std::string("/") + key;
    const Json& d = require_key(j, "", key);
    reject_unknown_keys(d, p, {"lo", "hi"});
    lo = scalar_from_json(require_key(d, p, "lo"), p + "/lo", s.mode);
    hi = scalar_from_json(require_key(d, p, "hi"), p + "/hi", s.mode);
    if (hi < lo) throw SchemaFailure(p, "lo exceeds hi");
  };
  domain("x_domain", s.x_lo, s.x_hi);
  domain("a_domain", s.a_lo, s.a_hi);
  domain("b_domain", s.b_lo, s.b_hi);
  s.f = expr_from_json(require_key(j, "", "f"), "/f");
  s.phi_a = j.contains("phi_A") ? multifunction_from_json(j["phi_A"], "/phi_A") : MultifunctionSpec::constant(ex::c(s.a_lo), ex::c(s.a_hi));
  s.phi_b = j.contains("phi_B") ? multifunction_from_json(j["phi_B"], "/phi_B") : MultifunctionSpec::constant(ex::c(s.b_lo), ex::c(s.b_hi));
  if (j.contains("grid")) {
    const Json& g = j["grid"];
    reject_unknown_keys(g, "/grid", {"x_step", "a_step", "b_step"});
    for (auto [key, dst] : {std::pair<const char*, ExactScalar*>{"x_step", &s.x_step}, {"a_step", &s.a_step}, {"b_step", &s.b_step}}) {
      if (!g.contains(key)) continue;
      *dst = scalar_from_json(g[key], std::string("/grid/") + key, s.mode);
      if (!(ExactScalar(0) < *dst)) throw SchemaFailure(std::string("/grid/") + key, "step must be positive");
    }
  }
  try {
    validate_expr(s.f, s.mode, {Var::x, Var::a, Var::b});
  } catch (const Error& e) {
    throw SchemaFailure("/f", e.detail());
  }
  try {
    validate_multifunction(s.phi_a, s.mode, {Var::x});
  } catch (const Error& e) {
    throw SchemaFailure("/phi_A", e.detail());
  }
  try {
    validate_multifunction(s.phi_b, s.mode, {Var::x, Var::a});
  } catch (const Error& e) {
    throw SchemaFailure("/phi_B", e.detail());
  }
  return s;
}

inline MinimaxSpec load_minimax_text(const std::string& text, const std::string& origin) {
  Json j = parse_json_text(text, origin, "minimax", "load_problem");
  try {
    return minimax_spec_from_json(j);
  } catch (const SchemaFailure& f) {
    throw ConfigError("minimax", "load_problem", anchor_message(origin, text, f));
  }
}

inline MinimaxSpec load_minimax_file(const std::string& path) {
  return load_minimax_text(read_text_file(path, "minimax", "load_problem"), path);
}

}  // namespace bergelab
