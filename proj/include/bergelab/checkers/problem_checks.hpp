#pragma once

#include <algorithm>
#include <set>

#include "bergelab/checkers/fn_checks.hpp"
#include "bergelab/checkers/probe.hpp"

namespace bergelab {

namespace detail {

template <class T>
T cluster_radius(const Grid1D<T>& y_grid) {
  return y_grid.step() * T(3);
}

template <class T>
const Probe<T>* pick_probe(const std::vector<Probe<T>>& ps, bool lowest) {
  const Probe<T>* best = nullptr;
  for (const auto& pr : ps) {
    if (!best || (lowest ? pr.slice.min < best->slice.min : best->slice.min < pr.slice.min)) best = &pr;
  }
  return best;
}

template <class T>
WitnessPoint<T> argmin_point(const Probe<T>& pr, const T& radius) {
  std::size_t i = pr.slice.argmin_index();
  return WitnessPoint<T>{pr.x, pr.slice.ys[i], pr.slice.vals[i], radius};
}

template <class T>
Verdict<T> make_verdict(const char* property, const ProbeSet<T>& ps, const CheckParams<T>& params) {
  Verdict<T> v;
  v.property = property;
  v.point = ps.x;
  v.resolution = ps.resolution(params.y_grid);
  return v;
}

template <class T>
bool near_truncated_edge(const Problem<T>& p, const T& y, const T& r) {
  if (p.y_truncated_above && p.y_domain.hi.is_finite() && ScalarTraits<T>::abs(p.y_domain.hi.value() - y) <= r) return true;
  if (p.y_truncated_below && p.y_domain.lo.is_finite() && ScalarTraits<T>::abs(y - p.y_domain.lo.value()) <= r) return true;
  return false;
}

/** @brief Distance from y to the nearest point of a sorted nonempty sample. */
template <class T>
T distance_to_sample(const std::vector<T>& sorted, const T& y) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), y);
  T best = it == sorted.end() ? y - sorted.back() : *it - y;
  if (it != sorted.begin()) {
    T d = y - *std::prev(it);
    if (d < best) best = d;
  }
  return best;
}

/** @brief Index of the sample point nearest y (ties toward the smaller point). */
template <class T>
std::size_t nearest_index(const std::vector<T>& sorted, const T& y) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), y);
  if (it == sorted.end()) return sorted.size() - 1;
  std::size_t i = static_cast<std::size_t>(it - sorted.begin());
  if (i > 0 && !(*it - y < y - sorted[i - 1])) return i - 1;
  return i;
}

/** @brief Largest number of sorted values within r of any center. */
template <class T>
std::size_t best_cluster(const std::vector<T>& centers, std::vector<T> values, const T& r) {
  std::sort(values.begin(), values.end());
  std::size_t best = 0;
  for (const auto& c : centers) {
    auto lo = std::lower_bound(values.begin(), values.end(), c - r);
    auto hi = std::upper_bound(values.begin(), values.end(), c + r);
    best = std::max<std::size_t>(best, static_cast<std::size_t>(hi - lo));
  }
  return best;
}

inline std::size_t cluster_need(std::size_t len) { return std::max<std::size_t>(2, (len + 2) / 3); }

template <class T>
std::vector<T> cluster_centers(const Problem<T>& p, const Slice<T>& base, const T& r) {
  std::vector<T> c;
  for (const auto& y : base.ys)
    if (!near_truncated_edge(p, y, r)) c.push_back(y);
  return c;
}

template <class T>
Verdict<T> lisc_from(const ProbeSet<T>& ps, const CheckParams<T>& params) {
  Verdict<T> v = make_verdict("lisc", ps, params);
  std::vector<T> radii;
  std::vector<ExtReal<T>> drops;
  std::vector<const Probe<T>*> picks;
  for (std::size_t k = 0; k < ps.by_depth.size(); ++k) {
    const Probe<T>* pr = pick_probe(ps.by_depth[k], true);
    if (!pr) continue;
    radii.push_back(ps.radii[k]);
    drops.push_back(drop_of(ps.base.min, pr->slice.min));
    picks.push_back(pr);
  }
  JumpResult<T> jr = detect_jump(radii, drops, params.min_gap);
  if (!jr.violated) return v;
  Witness<T> w;
  w.kind = "lisc";
  w.x = ps.x;
  w.base_value = ps.base.min;
  w.gap = jr.gap;
  w.y_grid = params.y_grid;
  ExtReal<T> top = ExtReal<T>::neg_inf();
  for (auto i : jr.seq) {
    w.seq.push_back(argmin_point(*picks[i], radii[i]));
    top = ext_max(top, picks[i]->slice.min);
  }
  if (top.is_finite()) {
    w.level = top.value() + w.gap;
  } else if (ps.base.min.is_finite()) {
    w.level = ps.base.min.value() - w.gap;
  } else {
    return v;
  }
  v.status = Status::Violated;
  v.witness = std::move(w);
  return v;
}

template <class T>
Verdict<T> fptusc_from(const ProbeSet<T>& ps, const CheckParams<T>& params) {
  Verdict<T> v = make_verdict("fptusc", ps, params);
  if (!ps.base.min.is_finite()) return v;
  std::vector<T> radii;
  std::vector<ExtReal<T>> rises;
  std::vector<const Probe<T>*> picks;
  for (std::size_t k = 0; k < ps.by_depth.size(); ++k) {
    const Probe<T>* pr = pick_probe(ps.by_depth[k], false);
    if (!pr) continue;
    radii.push_back(ps.radii[k]);
    rises.push_back(drop_of(pr->slice.min, ps.base.min));
    picks.push_back(pr);
  }
  JumpResult<T> jr = detect_jump(radii, rises, params.min_gap);
  if (!jr.violated) return v;
  Witness<T> w;
  w.kind = "fptusc";
  w.x = ps.x;
  w.y = ps.base.ys[ps.base.argmin_index()];
  w.base_value = ps.base.min;
  w.gap = jr.gap;
  w.level = ps.base.min.value() + jr.gap;
  w.y_grid = params.y_grid;
  for (auto i : jr.seq) w.seq.push_back(argmin_point(*picks[i], radii[i]));
  v.status = Status::Violated;
  v.witness = std::move(w);
  return v;
}

template <class T>
Verdict<T> lmsc_from(const Problem<T>& p, const ProbeSet<T>& ps, const CheckParams<T>& params, const Verdict<T>& lisc) {
  Verdict<T> v = make_verdict("lmsc", ps, params);
  if (lisc.violated()) {
    v.status = Status::Violated;
    v.witness = lisc.witness;
    v.note = "value function not lsc";
    return v;
  }
  if (p.exhaustive) {
    v.note = "finite action set: minimum attained";
    return v;
  }
  if (!params.certified_value) {
    v.status = Status::NotApplicable;
    v.note = "attainment needs a certified value; lsc half found no violation";
    return v;
  }
  const T& c = *params.certified_value;
  T tol = params.attain_tol ? *params.attain_tol : default_eps_sol<T>();
  ExtReal<T> excess = ps.base.min.is_finite() ? ExtReal<T>(ps.base.min.value() - c - tol) : ExtReal<T>::pos_inf();
  if (!(ExtReal<T>(T(0)) < excess)) {
    v.note = "minimum attained within tolerance";
    return v;
  }
  Witness<T> w;
  w.kind = "attainment";
  w.x = ps.x;
  w.y = ps.base.ys[ps.base.argmin_index()];
  w.base_value = ps.base.min;
  w.level = c;
  w.tolerance = tol;
  w.gap = excess.is_finite() ? excess.value() : T(1);
  w.y_grid = params.y_grid;
  v.status = Status::Violated;
  v.witness = std::move(w);
  v.note = "sampled minimum stays above the certified value";
  return v;
}

template <class T>
Verdict<T> solutions_usc_from(const ProbeSet<T>& ps, const CheckParams<T>& params) {
  Verdict<T> v = make_verdict("solutions_usc", ps, params);
  const T r = cluster_radius(params.y_grid);
  std::vector<T> s0 = solutions_of(ps.base, params.eps_sol);
  if (s0.empty()) return v;
  std::vector<T> radii;
  std::vector<ExtReal<T>> dists;
  std::vector<WitnessPoint<T>> picks;
  for (std::size_t k = 0; k < ps.by_depth.size(); ++k) {
    std::optional<WitnessPoint<T>> best;
    T best_d(0);
    for (const auto& pr : ps.by_depth[k]) {
      for (const auto& y : solutions_of(pr.slice, params.eps_sol)) {
        T d = distance_to_sample(s0, y);
        if (!best || best_d < d) {
          best_d = d;
          auto it = std::lower_bound(pr.slice.ys.begin(), pr.slice.ys.end(), y);
          best = WitnessPoint<T>{pr.x, y, pr.slice.vals[static_cast<std::size_t>(it - pr.slice.ys.begin())], ps.radii[k]};
        }
      }
    }
    if (!best) continue;
    radii.push_back(ps.radii[k]);
    dists.push_back(ExtReal<T>(best_d));
    picks.push_back(*best);
  }
  JumpResult<T> jr = detect_jump(radii, dists, r);
  if (!jr.violated) return v;
  T dmin = dists[jr.seq.front()].value();
  for (auto i : jr.seq) dmin = std::min(dmin, dists[i].value());
  if (!(r < dmin)) return v;
  Witness<T> w;
  w.kind = "solutions_usc";
  w.x = ps.x;
  w.radius = r;
  w.tolerance = params.eps_sol;
  w.gap = dmin - r;
  w.y_grid = params.y_grid;
  for (auto i : jr.seq) w.seq.push_back(picks[i]);
  v.status = Status::Violated;
  v.witness = std::move(w);
  return v;
}

template <class T>
std::optional<Witness<T>> kn_cluster(const Problem<T>& p, const ProbeSet<T>& ps, const CheckParams<T>& params) {
  const T r = cluster_radius(params.y_grid);
  std::vector<T> centers = cluster_centers(p, ps.base, r);
  T v0 = ps.base.min.is_finite() ? ps.base.min.value() : T(0);
  std::set<int> slot_set;
  for (const auto& d : ps.by_depth)
    for (const auto& pr : d) slot_set.insert(pr.slot);
  enum Kind { Seed, Argmin, Farthest, MaxY, MinY };
  std::vector<std::pair<Kind, std::size_t>> kinds;
  for (std::size_t s = 0; s < params.seeds.size(); ++s) kinds.push_back({Seed, s});
  for (Kind k : {Argmin, Farthest, MaxY, MinY}) kinds.push_back({k, 0});
  for (const auto& [kind, seed] : kinds) {
    for (int m : {1, 2, 4, 8}) {
      T lam = v0 + T(m);
      ExtReal<T> lam_ext(lam);
      for (int slot : slot_set) {
        std::vector<WitnessPoint<T>> seq;
        for (std::size_t k = 0; k < ps.by_depth.size(); ++k) {
          const Probe<T>* pr = nullptr;
          for (const auto& q : ps.by_depth[k])
            if (q.slot == slot) pr = &q;
          if (!pr) continue;
          const Slice<T>& s = pr->slice;
          std::optional<std::size_t> pick;
          T score(0);
          std::optional<T> target;
          if (kind == Seed) {
            ExtReal<T> t = eval(params.seeds[seed], Env<T>::of_x(pr->x));
            if (!t.is_finite()) continue;
            target = t.value();
          }
          for (std::size_t i = 0; i < s.ys.size(); ++i) {
            if (lam_ext < s.vals[i]) continue;
            T sc(0);
            switch (kind) {
              case Seed:
                sc = -ScalarTraits<T>::abs(s.ys[i] - *target);
                break;
              case Argmin:
                if (pick && !(s.vals[i] < s.vals[*pick])) continue;
                pick = i;
                continue;
              case Farthest:
                sc = ps.base.ys.empty() ? T(0) : distance_to_sample(ps.base.ys, s.ys[i]);
                break;
              case MaxY:
                sc = s.ys[i];
                break;
              case MinY:
                sc = -s.ys[i];
                break;
            }
            if (!pick || score < sc) {
              pick = i;
              score = sc;
            }
          }
          if (!pick) continue;
          seq.push_back(WitnessPoint<T>{pr->x, s.ys[*pick], s.vals[*pick], ps.radii[k]});
        }
        if (seq.size() < 3) continue;
        std::vector<T> ys;
        for (const auto& e : seq) ys.push_back(*e.y);
        std::size_t need = cluster_need(seq.size());
        std::size_t got = best_cluster(centers, ys, r);
        if (got >= need) continue;
        Witness<T> w;
        w.kind = "kn_cluster";
        w.x = ps.x;
        w.base_value = ps.base.min;
        w.level = lam;
        w.radius = r;
        w.gap = T(static_cast<long long>(need - got));
        w.seq = std::move(seq);
        w.y_grid = params.y_grid;
        w.slot = slot;
        return w;
      }
    }
  }
  return std::nullopt;
}

template <class T>
std::optional<Witness<T>> kn_lsc(const ProbeSet<T>& ps, const CheckParams<T>& params) {
  const T r = cluster_radius(params.y_grid);
  const std::size_t n = ps.base.ys.size();
  const std::size_t stride = n <= 257 ? 1 : (n + 255) / 256;
  for (std::size_t j = 0; j < n; j += stride) {
    const T& y = ps.base.ys[j];
    std::vector<T> radii;
    std::vector<ExtReal<T>> drops;
    std::vector<WitnessPoint<T>> picks;
    for (std::size_t k = 0; k < ps.by_depth.size(); ++k) {
      const T reach = std::max(ps.radii[k], r);
      std::optional<WitnessPoint<T>> best;
      for (const auto& pr : ps.by_depth[k]) {
        std::size_t i = nearest_index(pr.slice.ys, y);
        if (reach < ScalarTraits<T>::abs(pr.slice.ys[i] - y)) continue;
        if (!best || pr.slice.vals[i] < best->value)
          best = WitnessPoint<T>{pr.x, pr.slice.ys[i], pr.slice.vals[i], ps.radii[k]};
      }
      if (!best) continue;
      radii.push_back(ps.radii[k]);
      drops.push_back(drop_of(ps.base.vals[j], best->value));
      picks.push_back(*best);
    }
    JumpResult<T> jr = detect_jump(radii, drops, params.min_gap);
    if (!jr.violated) continue;
    Witness<T> w;
    w.kind = "kn_lsc";
    w.x = ps.x;
    w.y = y;
    w.base_value = ps.base.vals[j];
    w.radius = r;
    w.gap = jr.gap;
    w.y_grid = params.y_grid;
    ExtReal<T> top = ExtReal<T>::neg_inf();
    for (auto i : jr.seq) {
      w.seq.push_back(picks[i]);
      top = ext_max(top, picks[i].value);
    }
    if (top.is_finite()) {
      w.level = top.value() + w.gap;
    } else if (ps.base.vals[j].is_finite()) {
      w.level = ps.base.vals[j].value() - w.gap;
    } else {
      continue;
    }
    return w;
  }
  return std::nullopt;
}

template <class T>
GridFunction<T> value_along_probes(const ProbeSet<T>& ps, std::size_t* base_index) {
  std::vector<std::pair<T, ExtReal<T>>> pts{{ps.x, ps.base.min}};
  for (const auto& d : ps.by_depth)
    for (const auto& pr : d) pts.push_back({pr.x, pr.slice.min});
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  GridFunction<T> f;
  for (auto& [x, v] : pts) {
    if (!f.xs.empty() && f.xs.back() == x) continue;
    f.xs.push_back(x);
    f.values.push_back(v);
  }
  *base_index = static_cast<std::size_t>(std::lower_bound(f.xs.begin(), f.xs.end(), ps.x) - f.xs.begin());
  return f;
}

}  // namespace detail

namespace detail {
template <class T>
Verdict<T> kn_from(const Problem<T>& p, const ProbeSet<T>& ps, const CheckParams<T>& params);
}  // namespace detail

/** @brief Lower inf-semicontinuity at x: sampled values near x must not sit below u*(x) in the limit. */
template <class T>
Verdict<T> check_lisc(const Problem<T>& p, const T& x, const CheckParams<T>& params) {
  return detail::lisc_from(build_probes(p, x, params, "check_lisc"), params);
}

/** @brief FPTusc at x: minima at nearby parameters must not stay above u*(x). */
template <class T>
Verdict<T> check_fptusc(const Problem<T>& p, const T& x, const CheckParams<T>& params) {
  return detail::fptusc_from(build_probes(p, x, params, "check_fptusc"), params);
}

/** @brief Lower min-semicontinuity at x: lisc plus attainment of the minimum. */
template <class T>
Verdict<T> check_lmsc(const Problem<T>& p, const T& x, const CheckParams<T>& params) {
  ProbeSet<T> ps = build_probes(p, x, params, "check_lmsc");
  return detail::lmsc_from(p, ps, params, detail::lisc_from(ps, params));
}

/** @brief Upper semicontinuity of the sampled solution map at x. */
template <class T>
Verdict<T> check_solutions_usc(const Problem<T>& p, const T& x, const CheckParams<T>& params) {
  return detail::solutions_usc_from(build_probes(p, x, params, "check_solutions_usc"), params);
}

/**
 * @brief KN-inf-compactness on Gr_{x}(Phi): bounded-value sampled sequences must cluster in Phi(x),
 * and u must be lsc at every sampled (x, y).
 */
template <class T>
Verdict<T> check_kn_inf_compact(const Problem<T>& p, const T& x, const CheckParams<T>& params) {
  return detail::kn_from(p, build_probes(p, x, params, "check_kn_inf_compact"), params);
}

namespace detail {

template <class T>
Verdict<T> kn_from(const Problem<T>& p, const ProbeSet<T>& ps, const CheckParams<T>& params) {
  Verdict<T> v = detail::make_verdict("kn_inf_compact", ps, params);
  auto w = detail::kn_cluster(p, ps, params);
  if (w) {
    v.note = "bounded-value sequence without a cluster point in Phi(x)";
  } else {
    w = detail::kn_lsc(ps, params);
    if (w) v.note = "u not lsc at a sampled point of Gr_{x}(Phi)";
  }
  if (w) {
    v.status = Status::Violated;
    v.witness = std::move(w);
  }
  return v;
}

}  // namespace detail

template <class T>
struct ContinuityReport {
  Verdict<T> fptusc;
  Verdict<T> lisc;
  Verdict<T> lmsc;
  Verdict<T> direct_lsc;
  Verdict<T> direct_usc;
  /** lisc agrees with direct lsc of u*, and fptusc agrees with direct usc of u*. */
  bool consistent = false;
};

/** @brief Runs the semicontinuity checks at x together with direct tests of u* along the same probes. */
template <class T>
ContinuityReport<T> characterize_continuity(const Problem<T>& p, const T& x, const CheckParams<T>& params) {
  ProbeSet<T> ps = build_probes(p, x, params, "characterize_continuity");
  ContinuityReport<T> rep;
  rep.fptusc = detail::fptusc_from(ps, params);
  rep.lisc = detail::lisc_from(ps, params);
  rep.lmsc = detail::lmsc_from(p, ps, params, rep.lisc);
  std::size_t i = 0;
  GridFunction<T> f = detail::value_along_probes(ps, &i);
  rep.direct_lsc = check_lsc_fn_at(f, i, params.min_gap);
  rep.direct_usc = check_usc_fn_at(f, i, params.min_gap);
  rep.consistent =
      rep.direct_lsc.violated() == rep.lisc.violated() && rep.direct_usc.violated() == rep.fptusc.violated();
  return rep;
}

/**
 * @brief Level-set compactness over K x Y: D = {(x, y) sampled : x in K, u(x, y) <= lambda}.
 *
 * The x grid is refined four times from x_step. Violated when D at the finest grid reaches within r
 * of a truncated edge of Y (unbounded), or when a sampled point with u > lambda + 1e-3 is the limit of
 * points of D at the three deepest probe radii (not closed).
 */
template <class T>
Verdict<T> check_k_inf_compact(const Problem<T>& p, const T& k_lo, const T& k_hi, const T& lambda, const T& x_step,
                               const CheckParams<T>& params) {
  if (!p.x_domain.contains(k_lo) || !p.x_domain.contains(k_hi) || k_hi < k_lo)
    throw PreconditionFailed("checkers", "check_k_inf_compact", "K must be a nonempty subinterval of space_x");
  const T r = detail::cluster_radius(params.y_grid);
  Verdict<T> v;
  v.property = "k_inf_compact";
  v.point = k_lo;
  std::vector<T> radii = schedule_radii(params);
  v.resolution = Resolution<T>{radii.back(), params.y_grid.step(), params.depth, "x step " + ScalarTraits<T>::str(x_step) + "*2^-j, j=0..3"};
  const ExtReal<T> lam(lambda);
  std::vector<WitnessPoint<T>> reach;
  std::string extent;
  Grid1D<T> finest(k_lo, k_hi, x_step * ScalarTraits<T>::pow2(-3));
  for (int j = 0; j <= 3; ++j) {
    Grid1D<T> xg(k_lo, k_hi, x_step * ScalarTraits<T>::pow2(-j));
    if (j == 3) finest = xg;
    std::vector<std::optional<WitnessPoint<T>>> hi_pt(xg.size()), lo_pt(xg.size());
    parallel_for(
        xg.size(),
        [&](std::size_t i) {
          Slice<T> s = slice_of(p.fiber(xg[i]), params.y_grid, p.finite_filter);
          for (std::size_t q = 0; q < s.ys.size(); ++q) {
            if (lam < s.vals[q]) continue;
            WitnessPoint<T> wp{xg[i], s.ys[q], s.vals[q], xg.step()};
            if (!lo_pt[i]) lo_pt[i] = wp;
            hi_pt[i] = wp;
          }
        },
        params.workers);
    std::optional<WitnessPoint<T>> top, bot;
    for (std::size_t i = 0; i < xg.size(); ++i) {
      if (hi_pt[i] && (!top || *top->y < *hi_pt[i]->y)) top = hi_pt[i];
      if (lo_pt[i] && (!bot || *lo_pt[i]->y < *bot->y)) bot = lo_pt[i];
    }
    extent += (j ? ", " : "") + std::string("j=") + std::to_string(j) + ": y in [" +
              (bot ? ScalarTraits<T>::str(*bot->y) : std::string("-")) + ", " +
              (top ? ScalarTraits<T>::str(*top->y) : std::string("-")) + "]";
    std::optional<WitnessPoint<T>> edge;
    if (p.y_truncated_above && top && p.y_domain.hi.is_finite() && p.y_domain.hi.value() - *top->y < r) edge = top;
    if (!edge && p.y_truncated_below && bot && p.y_domain.lo.is_finite() && *bot->y - p.y_domain.lo.value() < r) edge = bot;
    if (edge) reach.push_back(*edge);
    if (j == 3 && edge) {
      Witness<T> w;
      w.kind = "k_unbounded";
      w.x = edge->x;
      w.y = edge->y;
      w.level = lambda;
      w.radius = r;
      T d = p.y_truncated_above && p.y_domain.hi.is_finite() && p.y_domain.hi.value() - *edge->y < r
                ? p.y_domain.hi.value() - *edge->y
                : *edge->y - p.y_domain.lo.value();
      w.gap = r - d;
      w.seq = reach;
      w.y_grid = params.y_grid;
      v.status = Status::Violated;
      v.witness = std::move(w);
      v.note = "level set reaches a truncated edge of Y; " + extent;
      return v;
    }
  }
  v.note = extent;
  // closedness on a subsample of the finest grid
  const T value_gap = ScalarTraits<T>::from_rational(Rational(1, 1000));
  const std::size_t nx = finest.size();
  const std::size_t xs_stride = nx <= 129 ? 1 : (nx + 127) / 128;
  const std::size_t deep = radii.size();
  for (std::size_t i = 0; i < nx; i += xs_stride) {
    const T& x = finest[i];
    Slice<T> s = slice_of(p.fiber(x), params.y_grid, p.finite_filter);
    const std::size_t ny = s.ys.size();
    const std::size_t ys_stride = ny <= 129 ? 1 : (ny + 127) / 128;
    for (std::size_t q = 0; q < ny; q += ys_stride) {
      if (!(ExtReal<T>(lambda + value_gap) < s.vals[q])) continue;
      for (int side : {-1, 1}) {
        std::vector<WitnessPoint<T>> seq;
        for (std::size_t k = deep >= 3 ? deep - 3 : 0; k < deep; ++k) {
          T xk = side < 0 ? x - radii[k] : x + radii[k];
          if (!p.x_domain.contains(xk)) break;
          Fiber<T> f = p.fiber(xk);
          if (!f.feasible(s.ys[q])) break;
          ExtReal<T> u = f.u(s.ys[q]);
          if (lam < u) break;
          seq.push_back(WitnessPoint<T>{xk, s.ys[q], u, radii[k]});
        }
        if (seq.size() < 3 || seq.size() < std::min<std::size_t>(3, deep)) continue;
        Witness<T> w;
        w.kind = "k_closed";
        w.x = x;
        w.y = s.ys[q];
        w.base_value = s.vals[q];
        w.level = lambda;
        w.gap = s.vals[q].is_finite() ? s.vals[q].value() - lambda : T(1);
        w.seq = std::move(seq);
        w.y_grid = params.y_grid;
        v.status = Status::Violated;
        v.witness = std::move(w);
        v.note = "sampled level set not closed; " + extent;
        return v;
      }
    }
  }
  return v;
}

/** @brief Re-evaluates a problem witness from scratch; true when its inequality holds with margin gap. */
template <class T>
bool replay_witness(const Problem<T>& p, const Witness<T>& w) {
  const T slack = ScalarTraits<T>::replay_slack();
  const ExtReal<T> sl(slack);
  auto le = [&](const ExtReal<T>& a, const ExtReal<T>& b) { return a <= ext_add(b, sl); };
  auto plus = [](const ExtReal<T>& a, const T& b) { return ext_add(a, ExtReal<T>(b)); };
  const T r_default = detail::cluster_radius(w.y_grid);
  auto seq_ok = [&](auto&& value_ok) {
    for (const auto& e : w.seq) {
      if (e.radius < ScalarTraits<T>::abs(e.x - w.x) - slack) return false;
      if (!p.x_domain.contains(e.x)) return false;
      if (e.y) {
        Fiber<T> f = p.fiber(e.x);
        if (!f.feasible(*e.y)) return false;
        ExtReal<T> u = f.u(*e.y);
        if (p.finite_filter && !u.is_finite()) return false;
        if (!value_ok(e, u)) return false;
      } else if (!value_ok(e, ExtReal<T>::pos_inf())) {
        return false;
      }
    }
    return true;
  };
  if (w.kind == "lisc") {
    if (!w.level) return false;
    Slice<T> base = slice_at(p, w.x, w.y_grid);
    if (!le(ExtReal<T>(*w.level + w.gap), base.min)) return false;
    return !w.seq.empty() && seq_ok([&](const WitnessPoint<T>&, const ExtReal<T>& u) {
      return le(plus(u, w.gap), ExtReal<T>(*w.level));
    });
  }
  if (w.kind == "fptusc") {
    if (!w.level || !w.y) return false;
    Fiber<T> f0 = p.fiber(w.x);
    if (!f0.feasible(*w.y) || !le(plus(f0.u(*w.y), w.gap), ExtReal<T>(*w.level))) return false;
    for (const auto& e : w.seq) {
      if (e.radius < ScalarTraits<T>::abs(e.x - w.x) - slack) return false;
      Slice<T> s = slice_at(p, e.x, w.y_grid);
      if (s.empty() || !le(ExtReal<T>(*w.level + w.gap), s.min)) return false;
    }
    return !w.seq.empty();
  }
  if (w.kind == "attainment") {
    if (!w.level || !w.tolerance) return false;
    Slice<T> base = slice_at(p, w.x, w.y_grid);
    return le(ExtReal<T>(*w.level + *w.tolerance + w.gap), base.min);
  }
  if (w.kind == "kn_lsc") {
    if (!w.level || !w.y) return false;
    const T r = w.radius ? *w.radius : r_default;
    Fiber<T> f0 = p.fiber(w.x);
    if (!f0.feasible(*w.y) || !le(ExtReal<T>(*w.level + w.gap), f0.u(*w.y))) return false;
    return !w.seq.empty() && seq_ok([&](const WitnessPoint<T>& e, const ExtReal<T>& u) {
      return ScalarTraits<T>::abs(*e.y - *w.y) <= std::max(e.radius, r) && le(plus(u, w.gap), ExtReal<T>(*w.level));
    });
  }
  if (w.kind == "kn_cluster") {
    if (!w.level) return false;
    const T r = w.radius ? *w.radius : r_default;
    if (!seq_ok([&](const WitnessPoint<T>&, const ExtReal<T>& u) { return le(u, ExtReal<T>(*w.level)); })) return false;
    Slice<T> base = slice_at(p, w.x, w.y_grid);
    std::vector<T> ys;
    for (const auto& e : w.seq) ys.push_back(*e.y);
    std::size_t need = detail::cluster_need(ys.size());
    std::size_t got = detail::best_cluster(detail::cluster_centers(p, base, r), ys, r);
    return got < need && w.gap <= T(static_cast<long long>(need - got));
  }
  if (w.kind == "solutions_usc") {
    if (!w.radius || !w.tolerance) return false;
    std::vector<T> s0 = solutions_at(p, w.x, w.y_grid, *w.tolerance);
    if (s0.empty() || w.seq.empty()) return false;
    for (const auto& e : w.seq) {
      if (!e.y || e.radius < ScalarTraits<T>::abs(e.x - w.x) - slack) return false;
      std::vector<T> sk = solutions_at(p, e.x, w.y_grid, *w.tolerance);
      if (!std::binary_search(sk.begin(), sk.end(), *e.y)) return false;
      if (detail::distance_to_sample(s0, *e.y) + slack < *w.radius + w.gap) return false;
    }
    return true;
  }
  if (w.kind == "k_unbounded") {
    if (!w.level || !w.radius || !w.y || w.seq.empty()) return false;
    for (const auto& e : w.seq) {
      Fiber<T> f = p.fiber(e.x);
      if (!f.feasible(*e.y) || !le(f.u(*e.y), ExtReal<T>(*w.level))) return false;
    }
    T d_hi = p.y_truncated_above && p.y_domain.hi.is_finite() ? p.y_domain.hi.value() - *w.y : *w.radius + w.gap;
    T d_lo = p.y_truncated_below && p.y_domain.lo.is_finite() ? *w.y - p.y_domain.lo.value() : *w.radius + w.gap;
    return std::min(d_hi, d_lo) + w.gap <= *w.radius + slack;
  }
  if (w.kind == "k_closed") {
    if (!w.level || !w.y) return false;
    Fiber<T> f0 = p.fiber(w.x);
    if (!f0.feasible(*w.y) || !le(ExtReal<T>(*w.level + w.gap), f0.u(*w.y))) return false;
    return !w.seq.empty() && seq_ok([&](const WitnessPoint<T>& e, const ExtReal<T>& u) {
      return *e.y == *w.y && le(u, ExtReal<T>(*w.level));
    });
  }
  return false;
}

}  // namespace bergelab
