#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bergelab/core/error.hpp"
#include "bergelab/core/exact_scalar.hpp"
#include "bergelab/core/ext_real.hpp"
#include "bergelab/core/scalar.hpp"

namespace bergelab {

enum class Var : std::uint8_t { x = 0, y = 1, a = 2, b = 3 };

inline const char* var_name(Var v) {
  static const char* names[] = {"x", "y", "a", "b"};
  return names[static_cast<int>(v)];
}

/** @brief Variable bindings for evaluation; unbound entries are null. */
template <class T>
struct Env {
  std::array<const T*, 4> vars{nullptr, nullptr, nullptr, nullptr};

  Env() = default;
  static Env of_x(const T& x) {
    Env e;
    e.vars[0] = &x;
    return e;
  }
  static Env of_xy(const T& x, const T& y) {
    Env e;
    e.vars[0] = &x;
    e.vars[1] = &y;
    return e;
  }
  static Env of_xa(const T& x, const T& a) {
    Env e;
    e.vars[0] = &x;
    e.vars[2] = &a;
    return e;
  }
  static Env of_xab(const T& x, const T& a, const T& b) {
    Env e;
    e.vars[0] = &x;
    e.vars[2] = &a;
    e.vars[3] = &b;
    return e;
  }
};

/** @brief Constant leaf: exact rational-plus-sqrt2 literal, float literal, or an infinity. */
struct ConstValue {
  enum class Kind : std::uint8_t { Exact, Float, PosInf, NegInf };
  Kind kind = Kind::Exact;
  ExactScalar exact;
  /** Float literal, or the double image of an exact literal. */
  double flt = 0.0;

  static ConstValue of_exact(ExactScalar v) {
    double d = v.to_double();
    return ConstValue{Kind::Exact, std::move(v), d};
  }
  static ConstValue of_float(double v) { return ConstValue{Kind::Float, ExactScalar(), v}; }
  static ConstValue pos_inf() { return ConstValue{Kind::PosInf, ExactScalar(), 0.0}; }
  static ConstValue neg_inf() { return ConstValue{Kind::NegInf, ExactScalar(), 0.0}; }

  std::string str() const {
    switch (kind) {
      case Kind::Exact: return exact.str();
      case Kind::Float: return ScalarTraits<double>::str(flt);
      case Kind::PosInf: return "inf";
      case Kind::NegInf: return "-inf";
    }
    return "?";
  }
};

struct ExprNode;
struct PredNode;

/** @brief Immutable expression handle. */
class Expr {
 public:
  Expr() = default;
  explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
  const ExprNode& node() const { return *node_; }
  bool valid() const { return static_cast<bool>(node_); }

 private:
  std::shared_ptr<const ExprNode> node_;
};

/** @brief Immutable predicate handle. */
class Pred {
 public:
  Pred() = default;
  explicit Pred(std::shared_ptr<const PredNode> n) : node_(std::move(n)) {}
  const PredNode& node() const { return *node_; }
  bool valid() const { return static_cast<bool>(node_); }

 private:
  std::shared_ptr<const PredNode> node_;
};

enum class UnOp : std::uint8_t { Neg, Abs };
enum class BinOp : std::uint8_t { Add, Sub, Mul, Div, Max, Min };
enum class CmpOp : std::uint8_t { Lt, Le, Eq, Gt, Ge };

struct ExprNode {
  struct Const {
    ConstValue value;
  };
  struct VarRef {
    Var var;
  };
  struct Unary {
    UnOp op;
    Expr arg;
  };
  struct Binary {
    BinOp op;
    Expr lhs, rhs;
  };
  struct Indicator {
    Pred pred;
  };
  struct Piecewise {
    std::vector<std::pair<Pred, Expr>> branches;
    std::optional<Expr> otherwise;
  };
  std::variant<Const, VarRef, Unary, Binary, Indicator, Piecewise> v;
};

struct PredNode {
  struct Bool {
    bool value;
  };
  struct Cmp {
    CmpOp op;
    Expr lhs, rhs;
  };
  struct IsRational {
    Expr arg;
  };
  struct And {
    std::vector<Pred> args;
  };
  struct Or {
    std::vector<Pred> args;
  };
  struct Not {
    Pred arg;
  };
  std::variant<Bool, Cmp, IsRational, And, Or, Not> v;
};

namespace ex {

inline Expr make(ExprNode n) { return Expr(std::make_shared<const ExprNode>(std::move(n))); }
inline Pred make(PredNode n) { return Pred(std::make_shared<const PredNode>(std::move(n))); }

inline Expr c(long long v) { return make({ExprNode::Const{ConstValue::of_exact(ExactScalar(v))}}); }
inline Expr c(const Rational& v) { return make({ExprNode::Const{ConstValue::of_exact(ExactScalar(v))}}); }
inline Expr c(const ExactScalar& v) { return make({ExprNode::Const{ConstValue::of_exact(v)}}); }
inline Expr q(long long n, long long d) { return c(Rational(n, d)); }
inline Expr cf(double v) { return make({ExprNode::Const{ConstValue::of_float(v)}}); }
inline Expr inf() { return make({ExprNode::Const{ConstValue::pos_inf()}}); }
inline Expr neg_inf() { return make({ExprNode::Const{ConstValue::neg_inf()}}); }
inline Expr var(Var v) { return make({ExprNode::VarRef{v}}); }
inline Expr x() { return var(Var::x); }
inline Expr y() { return var(Var::y); }
inline Expr a() { return var(Var::a); }
inline Expr b() { return var(Var::b); }
inline Expr bin(BinOp op, Expr l, Expr r) { return make({ExprNode::Binary{op, std::move(l), std::move(r)}}); }
inline Expr neg(Expr e) { return make({ExprNode::Unary{UnOp::Neg, std::move(e)}}); }
inline Expr abs(Expr e) { return make({ExprNode::Unary{UnOp::Abs, std::move(e)}}); }
inline Expr max(Expr l, Expr r) { return bin(BinOp::Max, std::move(l), std::move(r)); }
inline Expr min(Expr l, Expr r) { return bin(BinOp::Min, std::move(l), std::move(r)); }
inline Expr ind(Pred p) { return make({ExprNode::Indicator{std::move(p)}}); }
inline Expr piecewise(std::vector<std::pair<Pred, Expr>> br, std::optional<Expr> otherwise) {
  return make({ExprNode::Piecewise{std::move(br), std::move(otherwise)}});
}

inline Pred truth(bool v) { return make(PredNode{PredNode::Bool{v}}); }
inline Pred cmp(CmpOp op, Expr l, Expr r) { return make(PredNode{PredNode::Cmp{op, std::move(l), std::move(r)}}); }
inline Pred lt(Expr l, Expr r) { return cmp(CmpOp::Lt, std::move(l), std::move(r)); }
inline Pred le(Expr l, Expr r) { return cmp(CmpOp::Le, std::move(l), std::move(r)); }
inline Pred eq(Expr l, Expr r) { return cmp(CmpOp::Eq, std::move(l), std::move(r)); }
inline Pred gt(Expr l, Expr r) { return cmp(CmpOp::Gt, std::move(l), std::move(r)); }
inline Pred ge(Expr l, Expr r) { return cmp(CmpOp::Ge, std::move(l), std::move(r)); }
inline Pred rational(Expr e) { return make(PredNode{PredNode::IsRational{std::move(e)}}); }
inline Pred all(std::vector<Pred> ps) { return make(PredNode{PredNode::And{std::move(ps)}}); }
inline Pred any(std::vector<Pred> ps) { return make(PredNode{PredNode::Or{std::move(ps)}}); }
inline Pred no(Pred p) { return make(PredNode{PredNode::Not{std::move(p)}}); }

}  // namespace ex

inline Expr operator+(Expr l, Expr r) { return ex::bin(BinOp::Add, std::move(l), std::move(r)); }
inline Expr operator-(Expr l, Expr r) { return ex::bin(BinOp::Sub, std::move(l), std::move(r)); }
inline Expr operator*(Expr l, Expr r) { return ex::bin(BinOp::Mul, std::move(l), std::move(r)); }
inline Expr operator/(Expr l, Expr r) { return ex::bin(BinOp::Div, std::move(l), std::move(r)); }
inline Expr operator-(Expr e) { return ex::neg(std::move(e)); }

template <class T>
ExtReal<T> eval(const Expr& e, const Env<T>& env);

template <class T>
bool eval_pred(const Pred& p, const Env<T>& env);

namespace detail {

template <class T>
ExtReal<T> const_value(const ConstValue& c) {
  switch (c.kind) {
    case ConstValue::Kind::PosInf: return ExtReal<T>::pos_inf();
    case ConstValue::Kind::NegInf: return ExtReal<T>::neg_inf();
    case ConstValue::Kind::Float:
      if constexpr (std::is_same_v<T, double>) {
        return ExtReal<T>(c.flt);
      } else {
        throw ExactModeUnsupported("core", "eval_expr", "float literal " + c.str() + " in exact mode");
      }
    case ConstValue::Kind::Exact:
      if constexpr (std::is_same_v<T, double>) {
        return ExtReal<T>(c.flt);
      } else {
        return ExtReal<T>(c.exact);
      }
  }
  throw ValidationError("core", "eval_expr", "corrupt constant");
}

template <class T>
bool compare(CmpOp op, const ExtReal<T>& l, const ExtReal<T>& r) {
  switch (op) {
    case CmpOp::Lt: return l < r;
    case CmpOp::Le: return l <= r;
    case CmpOp::Eq: return l == r;
    case CmpOp::Gt: return l > r;
    case CmpOp::Ge: return l >= r;
  }
  return false;
}

}  // namespace detail

/** @brief Evaluates an expression; deterministic and side-effect free. */
template <class T>
ExtReal<T> eval(const Expr& e, const Env<T>& env) {
  const ExprNode& n = e.node();
  switch (n.v.index()) {
    case 0: return detail::const_value<T>(std::get<ExprNode::Const>(n.v).value);
    case 1: {
      Var v = std::get<ExprNode::VarRef>(n.v).var;
      const T* p = env.vars[static_cast<int>(v)];
      if (p == nullptr) throw UnboundVariable("core", "eval_expr", std::string("variable '") + var_name(v) + "' is unbound");
      return ExtReal<T>(*p);
    }
    case 2: {
      const auto& u = std::get<ExprNode::Unary>(n.v);
      ExtReal<T> a = eval(u.arg, env);
      return u.op == UnOp::Neg ? ext_neg(a) : ext_abs(a);
    }
    case 3: {
      const auto& b = std::get<ExprNode::Binary>(n.v);
      ExtReal<T> l = eval(b.lhs, env);
      ExtReal<T> r = eval(b.rhs, env);
      switch (b.op) {
        case BinOp::Add: return ext_add(l, r);
        case BinOp::Sub: return ext_sub(l, r);
        case BinOp::Mul: return ext_mul(l, r);
        case BinOp::Div: return ext_div(l, r);
        case BinOp::Max: return ext_max(l, r);
        case BinOp::Min: return ext_min(l, r);
      }
      break;
    }
    case 4:
      return ExtReal<T>(T(eval_pred(std::get<ExprNode::Indicator>(n.v).pred, env) ? 1 : 0));
    case 5: {
      const auto& pw = std::get<ExprNode::Piecewise>(n.v);
      for (const auto& [p, branch] : pw.branches)
        if (eval_pred(p, env)) return eval(branch, env);
      if (pw.otherwise) return eval(*pw.otherwise, env);
      throw NoGuardMatched("core", "eval_expr", "no piecewise branch matched and no default given");
    }
  }
  throw ValidationError("core", "eval_expr", "corrupt expression node");
}

template <class T>
bool eval_pred(const Pred& p, const Env<T>& env) {
  const PredNode& n = p.node();
  switch (n.v.index()) {
    case 0: return std::get<PredNode::Bool>(n.v).value;
    case 1: {
      const auto& c = std::get<PredNode::Cmp>(n.v);
      return detail::compare(c.op, eval(c.lhs, env), eval(c.rhs, env));
    }
    case 2: {
      ExtReal<T> v = eval(std::get<PredNode::IsRational>(n.v).arg, env);
      if (!v.is_finite()) return false;
      return ScalarTraits<T>::is_rational(v.value());
    }
    case 3:
      for (const auto& a : std::get<PredNode::And>(n.v).args)
        if (!eval_pred(a, env)) return false;
      return true;
    case 4:
      for (const auto& a : std::get<PredNode::Or>(n.v).args)
        if (eval_pred(a, env)) return true;
      return false;
    case 5: return !eval_pred(std::get<PredNode::Not>(n.v).arg, env);
  }
  throw ValidationError("core", "eval_expr", "corrupt predicate node");
}

/** @brief Mode checks done once before evaluation: no float literals in exact mode, no rationality tests in float mode. */
inline void validate_expr(const Expr& e, Mode mode, const std::vector<Var>& allowed);
inline void validate_pred(const Pred& p, Mode mode, const std::vector<Var>& allowed);

inline void validate_expr(const Expr& e, Mode mode, const std::vector<Var>& allowed) {
  if (!e.valid()) throw ValidationError("core", "validate", "missing expression");
  std::visit(
      [&](const auto& node) {
        using N = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<N, ExprNode::Const>) {
          if (mode == Mode::Exact && node.value.kind == ConstValue::Kind::Float)
            throw ExactModeUnsupported("core", "validate", "float literal " + node.value.str() +
                                                                " in exact mode; write it as a rational string");
        } else if constexpr (std::is_same_v<N, ExprNode::VarRef>) {
          bool ok = false;
          for (Var v : allowed) ok = ok || v == node.var;
          if (!ok) throw UnboundVariable("core", "validate", std::string("variable '") + var_name(node.var) + "' is not available here");
        } else if constexpr (std::is_same_v<N, ExprNode::Unary>) {
          validate_expr(node.arg, mode, allowed);
        } else if constexpr (std::is_same_v<N, ExprNode::Binary>) {
          validate_expr(node.lhs, mode, allowed);
          validate_expr(node.rhs, mode, allowed);
        } else if constexpr (std::is_same_v<N, ExprNode::Indicator>) {
          validate_pred(node.pred, mode, allowed);
        } else {
          for (const auto& [p, b] : node.branches) {
            validate_pred(p, mode, allowed);
            validate_expr(b, mode, allowed);
          }
          if (node.otherwise) validate_expr(*node.otherwise, mode, allowed);
        }
      },
      e.node().v);
}

inline void validate_pred(const Pred& p, Mode mode, const std::vector<Var>& allowed) {
  if (!p.valid()) throw ValidationError("core", "validate", "missing predicate");
  std::visit(
      [&](const auto& node) {
        using N = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<N, PredNode::Cmp>) {
          validate_expr(node.lhs, mode, allowed);
          validate_expr(node.rhs, mode, allowed);
        } else if constexpr (std::is_same_v<N, PredNode::IsRational>) {
          if (mode != Mode::Exact)
            throw ExactModeUnsupported("core", "validate", "rationality test requires exact mode");
          validate_expr(node.arg, mode, allowed);
        } else if constexpr (std::is_same_v<N, PredNode::And> || std::is_same_v<N, PredNode::Or>) {
          for (const auto& a : node.args) validate_pred(a, mode, allowed);
        } else if constexpr (std::is_same_v<N, PredNode::Not>) {
          validate_pred(node.arg, mode, allowed);
        }
      },
      p.node().v);
}

}  // namespace bergelab
