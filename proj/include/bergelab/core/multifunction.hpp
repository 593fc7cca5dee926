#pragma once

#include <vector>

#include "bergelab/core/error.hpp"
#include "bergelab/core/expr.hpp"
#include "bergelab/core/grid.hpp"

namespace bergelab {

struct MultifunctionPiece {
  Pred guard = ex::truth(true);
  Expr lower;
  Expr upper;
  bool closed_lower = true;
  bool closed_upper = true;
};

/** @brief Guarded interval-valued map; the first piece whose guard holds is used. */
struct MultifunctionSpec {
  std::vector<MultifunctionPiece> pieces;
  bool empty_allowed = false;

  static MultifunctionSpec constant(Expr lo, Expr hi) {
    MultifunctionSpec m;
    m.pieces.push_back(MultifunctionPiece{ex::truth(true), std::move(lo), std::move(hi), true, true});
    return m;
  }
};

/** @brief Phi at the bound variables of env (x, and a for guarded-by-action maps). */
template <class T>
Interval<T> phi_at(const MultifunctionSpec& m, const Env<T>& env) {
  for (const auto& piece : m.pieces) {
    if (!eval_pred(piece.guard, env)) continue;
    Interval<T> iv{eval(piece.lower, env), eval(piece.upper, env), piece.closed_lower, piece.closed_upper};
    if (!iv.lo.is_finite()) iv.closed_lo = false;
    if (!iv.hi.is_finite()) iv.closed_hi = false;
    if (iv.is_empty() && !m.empty_allowed) {
      const T* x = env.vars[0];
      throw EmptyNotAllowed("core", "phi_at",
                            "empty value at x = " + (x ? ScalarTraits<T>::str(*x) : std::string("?")) +
                                " (lower " + iv.lo.str() + ", upper " + iv.hi.str() + ")");
    }
    return iv;
  }
  const T* x = env.vars[0];
  throw NoGuardMatched("core", "phi_at", "no piece guard holds at x = " + (x ? ScalarTraits<T>::str(*x) : std::string("?")));
}

template <class T>
Interval<T> phi_at(const MultifunctionSpec& m, const T& x) {
  return phi_at(m, Env<T>::of_x(x));
}

inline void validate_multifunction(const MultifunctionSpec& m, Mode mode, const std::vector<Var>& allowed) {
  if (m.pieces.empty()) throw ValidationError("core", "validate", "multifunction has no pieces");
  for (const auto& p : m.pieces) {
    validate_pred(p.guard, mode, allowed);
    validate_expr(p.lower, mode, allowed);
    validate_expr(p.upper, mode, allowed);
  }
}

}  // namespace bergelab
