#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bergelab/core/parallel.hpp"
#include "bergelab/parametric/problem.hpp"

namespace bergelab {

enum class Status { Violated, NoViolationFound, NotApplicable };

inline const char* status_name(Status s) {
  switch (s) {
    case Status::Violated:
      return "Violated";
    case Status::NoViolationFound:
      return "NoViolationFound";
    case Status::NotApplicable:
      return "NotApplicable";
  }
  return "?";
}

template <class T>
struct WitnessPoint {
  T x;
  std::optional<T> y;
  ExtReal<T> value;
  /** Schedule radius at which this entry was taken. */
  T radius;
};

/**
 * @brief Finite replayable evidence of a violation.
 *
 * kind selects the inequality replayed by replay_witness: lisc, fptusc, attainment,
 * kn_lsc, kn_cluster, solutions_usc, lsc_fn, usc_fn, k_unbounded, k_closed.
 */
template <class T>
struct Witness {
  std::string kind;
  T x;
  std::optional<T> y;
  std::optional<ExtReal<T>> base_value;
  /** gamma, lambda, or certified value depending on kind. */
  std::optional<T> level;
  std::optional<T> radius;
  std::optional<T> tolerance;
  T gap;
  std::vector<WitnessPoint<T>> seq;
  Grid1D<T> y_grid;
  int slot = -1;
};

template <class T>
struct Resolution {
  T delta_min;
  T y_step;
  int depth = 0;
  std::string schedule;
};

template <class T>
struct Verdict {
  std::string property;
  T point;
  Status status = Status::NoViolationFound;
  std::optional<Witness<T>> witness;
  Resolution<T> resolution;
  std::string note;

  bool violated() const { return status == Status::Violated; }
};

template <class T>
struct CheckParams {
  T delta0 = ScalarTraits<T>::from_rational(Rational(1, 2));
  int depth = 12;
  /** When positive, probes sit at x +- 1/n for n = 1..harmonic_n instead of x +- delta0 2^-k. */
  int harmonic_n = 0;
  Grid1D<T> y_grid;
  T min_gap = ScalarTraits<T>::from_rational(Rational(1, 1000000));
  std::optional<T> certified_value;
  std::optional<T> attain_tol;
  /** Candidate action paths y(x) tried first by the cluster test. */
  std::vector<Expr> seeds;
  T eps_sol = default_eps_sol<T>();
  unsigned workers = worker_count();
};

template <class T>
CheckParams<T> make_params(const Grid1D<T>& y_grid) {
  CheckParams<T> c;
  c.y_grid = y_grid;
  return c;
}

template <class T>
nlohmann::json scalar_json(const T& v) {
  if constexpr (std::is_same_v<T, double>) {
    return v;
  } else {
    return ScalarTraits<T>::str(v);
  }
}

template <class T>
nlohmann::json ext_json(const ExtReal<T>& v) {
  if (!v.is_finite()) return v.str();
  return scalar_json(v.value());
}

template <class T>
nlohmann::json grid_json(const Grid1D<T>& g) {
  return {{"lo", scalar_json(g.lo())}, {"hi", scalar_json(g.hi())}, {"step", scalar_json(g.step())}};
}

template <class T>
nlohmann::json witness_json(const Witness<T>& w) {
  nlohmann::json j;
  j["kind"] = w.kind;
  j["x"] = scalar_json(w.x);
  if (w.y) j["y"] = scalar_json(*w.y);
  if (w.base_value) j["base_value"] = ext_json(*w.base_value);
  if (w.level) j["level"] = scalar_json(*w.level);
  if (w.radius) j["radius"] = scalar_json(*w.radius);
  if (w.tolerance) j["tolerance"] = scalar_json(*w.tolerance);
  j["gap"] = scalar_json(w.gap);
  if (w.slot >= 0) j["slot"] = w.slot;
  nlohmann::json seq = nlohmann::json::array();
  for (const auto& p : w.seq) {
    nlohmann::json e{{"x", scalar_json(p.x)}, {"value", ext_json(p.value)}, {"radius", scalar_json(p.radius)}};
    if (p.y) e["y"] = scalar_json(*p.y);
    seq.push_back(std::move(e));
  }
  j["sequence"] = std::move(seq);
  j["y_grid"] = grid_json(w.y_grid);
  return j;
}

template <class T>
nlohmann::json verdict_json(const Verdict<T>& v) {
  nlohmann::json j;
  j["property"] = v.property;
  j["point"] = scalar_json(v.point);
  j["status"] = status_name(v.status);
  j["witness"] = v.witness ? witness_json(*v.witness) : nlohmann::json(nullptr);
  j["resolution"] = {{"delta_min", scalar_json(v.resolution.delta_min)},
                     {"y_step", scalar_json(v.resolution.y_step)},
                     {"depth", v.resolution.depth},
                     {"schedule", v.resolution.schedule}};
  j["gap"] = v.witness ? scalar_json(v.witness->gap) : nlohmann::json(nullptr);
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

}  // namespace bergelab
