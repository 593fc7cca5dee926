#pragma once

#include <json.hpp>

#include <string>

#include "bergelab/core/error.hpp"
#include "bergelab/core/expr.hpp"
#include "bergelab/core/json_locate.hpp"
#include "bergelab/core/multifunction.hpp"

namespace bergelab {

using Json = nlohmann::json;

/** @brief Schema violation at a JSON pointer; file loaders turn it into a line-anchored ConfigError. */
class SchemaFailure : public std::runtime_error {
 public:
  SchemaFailure(std::string pointer, const std::string& msg)
      : std::runtime_error(msg), pointer_(std::move(pointer)) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

namespace detail {

inline std::string child(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }
inline std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

}  // namespace detail

inline Pred pred_from_json(const Json& j, const std::string& ptr);

inline Expr expr_from_json(const Json& j, const std::string& ptr) {
  using detail::child;
  if (j.is_number_integer()) return ex::c(static_cast<long long>(j.get<long long>()));
  if (j.is_number_unsigned()) return ex::c(static_cast<long long>(j.get<unsigned long long>()));
  if (j.is_number_float()) return ex::cf(j.get<double>());
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "x") return ex::x();
    if (s == "y") return ex::y();
    if (s == "a") return ex::a();
    if (s == "b") return ex::b();
    if (s == "inf" || s == "+inf") return ex::inf();
    if (s == "-inf") return ex::neg_inf();
    try {
      return ex::c(parse_exact(s));
    } catch (const Error& e) {
      throw SchemaFailure(ptr, "bad literal '" + s + "': " + e.detail());
    }
  }
  if (!j.is_array() || j.empty() || !j[0].is_string())
    throw SchemaFailure(ptr, "expression must be a number, a string or an [op, args...] array");
  const std::string op = j[0].get<std::string>();
  const std::size_t n = j.size() - 1;
  auto arg = [&](std::size_t i) { return expr_from_json(j[i], child(ptr, i)); };
  auto need = [&](std::size_t k) {
    if (n != k) throw SchemaFailure(ptr, "'" + op + "' takes " + std::to_string(k) + " argument(s), got " + std::to_string(n));
  };
  auto fold = [&](BinOp bop) {
    if (n < 2) throw SchemaFailure(ptr, "'" + op + "' takes at least 2 arguments");
    Expr acc = arg(1);
    for (std::size_t i = 2; i <= n; ++i) acc = ex::bin(bop, acc, arg(i));
    return acc;
  };
  if (op == "add") return fold(BinOp::Add);
  if (op == "mul") return fold(BinOp::Mul);
  if (op == "max") return fold(BinOp::Max);
  if (op == "min") return fold(BinOp::Min);
  if (op == "sub") {
    need(2);
    return arg(1) - arg(2);
  }
  if (op == "div") {
    need(2);
    return arg(1) / arg(2);
  }
  if (op == "neg") {
    need(1);
    return ex::neg(arg(1));
  }
  if (op == "abs") {
    need(1);
    return ex::abs(arg(1));
  }
  if (op == "ind") {
    need(1);
    return ex::ind(pred_from_json(j[1], child(ptr, 1)));
  }
  if (op == "piecewise") {
    std::vector<std::pair<Pred, Expr>> branches;
    std::optional<Expr> otherwise;
    for (std::size_t i = 1; i <= n; ++i) {
      const Json& br = j[i];
      std::string bp = child(ptr, i);
      if (!br.is_array() || br.size() != 2) throw SchemaFailure(bp, "piecewise branch must be [predicate, expression]");
      if (br[0].is_string() && br[0].get<std::string>() == "else") {
        if (i != n) throw SchemaFailure(bp, "'else' branch must come last");
        otherwise = expr_from_json(br[1], child(bp, 1));
      } else {
        branches.emplace_back(pred_from_json(br[0], child(bp, 0)), expr_from_json(br[1], child(bp, 1)));
      }
    }
    return ex::piecewise(std::move(branches), std::move(otherwise));
  }
  throw SchemaFailure(child(ptr, 0), "unknown expression operator '" + op + "'");
}

inline Pred pred_from_json(const Json& j, const std::string& ptr) {
  using detail::child;
  if (j.is_boolean()) return ex::truth(j.get<bool>());
  if (!j.is_array() || j.empty() || !j[0].is_string())
    throw SchemaFailure(ptr, "predicate must be true/false or an [op, args...] array");
  const std::string op = j[0].get<std::string>();
  const std::size_t n = j.size() - 1;
  auto e = [&](std::size_t i) { return expr_from_json(j[i], child(ptr, i)); };
  auto p = [&](std::size_t i) { return pred_from_json(j[i], child(ptr, i)); };
  auto need = [&](std::size_t k) {
    if (n != k) throw SchemaFailure(ptr, "'" + op + "' takes " + std::to_string(k) + " argument(s), got " + std::to_string(n));
  };
  if (op == "lt") return need(2), ex::lt(e(1), e(2));
  if (op == "le") return need(2), ex::le(e(1), e(2));
  if (op == "eq") return need(2), ex::eq(e(1), e(2));
  if (op == "gt") return need(2), ex::gt(e(1), e(2));
  if (op == "ge") return need(2), ex::ge(e(1), e(2));
  if (op == "rational") return need(1), ex::rational(e(1));
  if (op == "not") return need(1), ex::no(p(1));
  if (op == "and" || op == "or") {
    if (n < 1) throw SchemaFailure(ptr, "'" + op + "' needs at least one argument");
    std::vector<Pred> args;
    for (std::size_t i = 1; i <= n; ++i) args.push_back(p(i));
    return op == "and" ? ex::all(std::move(args)) : ex::any(std::move(args));
  }
  throw SchemaFailure(child(ptr, 0), "unknown predicate operator '" + op + "'");
}

inline MultifunctionPiece piece_from_json(const Json& j, const std::string& ptr) {
  using detail::child;
  if (!j.is_object()) throw SchemaFailure(ptr, "multifunction piece must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k != "when" && k != "lower" && k != "upper" && k != "closed_lower" && k != "closed_upper")
      throw SchemaFailure(child(ptr, k), "unknown piece field '" + k + "'");
  }
  MultifunctionPiece p;
  if (j.contains("when")) p.guard = pred_from_json(j["when"], child(ptr, "when"));
  if (!j.contains("lower")) throw SchemaFailure(ptr, "piece is missing 'lower'");
  if (!j.contains("upper")) throw SchemaFailure(ptr, "piece is missing 'upper'");
  p.lower = expr_from_json(j["lower"], child(ptr, "lower"));
  p.upper = expr_from_json(j["upper"], child(ptr, "upper"));
  auto flag = [&](const char* key, bool& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_boolean()) throw SchemaFailure(child(ptr, key), std::string("'") + key + "' must be a boolean");
    out = j[key].get<bool>();
  };
  flag("closed_lower", p.closed_lower);
  flag("closed_upper", p.closed_upper);
  return p;
}

/** @brief Accepts {"pieces": [...], "empty_allowed": bool} or a single piece object. */
inline MultifunctionSpec multifunction_from_json(const Json& j, const std::string& ptr) {
  using detail::child;
  MultifunctionSpec m;
  if (!j.is_object()) throw SchemaFailure(ptr, "multifunction must be an object");
  if (j.contains("pieces")) {
    const Json& ps = j["pieces"];
    if (!ps.is_array() || ps.empty()) throw SchemaFailure(child(ptr, "pieces"), "'pieces' must be a nonempty array");
    for (std::size_t i = 0; i < ps.size(); ++i) m.pieces.push_back(piece_from_json(ps[i], child(child(ptr, "pieces"), i)));
    for (auto it = j.begin(); it != j.end(); ++it)
      if (it.key() != "pieces" && it.key() != "empty_allowed")
        throw SchemaFailure(child(ptr, it.key()), "unknown multifunction field '" + it.key() + "'");
  } else {
    Json single = j;
    single.erase("empty_allowed");
    m.pieces.push_back(piece_from_json(single, ptr));
  }
  if (j.contains("empty_allowed")) {
    if (!j["empty_allowed"].is_boolean()) throw SchemaFailure(child(ptr, "empty_allowed"), "'empty_allowed' must be a boolean");
    m.empty_allowed = j["empty_allowed"].get<bool>();
  }
  return m;
}

inline Json pred_to_json(const Pred& p);

inline Json expr_to_json(const Expr& e) {
  const ExprNode& n = e.node();
  return std::visit(
      [](const auto& node) -> Json {
        using N = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<N, ExprNode::Const>) {
          if (node.value.kind == ConstValue::Kind::Float) return node.value.flt;
          return node.value.str();
        } else if constexpr (std::is_same_v<N, ExprNode::VarRef>) {
          return var_name(node.var);
        } else if constexpr (std::is_same_v<N, ExprNode::Unary>) {
          return Json::array({node.op == UnOp::Neg ? "neg" : "abs", expr_to_json(node.arg)});
        } else if constexpr (std::is_same_v<N, ExprNode::Binary>) {
          static const char* names[] = {"add", "sub", "mul", "div", "max", "min"};
          return Json::array({names[static_cast<int>(node.op)], expr_to_json(node.lhs), expr_to_json(node.rhs)});
        } else if constexpr (std::is_same_v<N, ExprNode::Indicator>) {
          return Json::array({"ind", pred_to_json(node.pred)});
        } else {
          Json out = Json::array({"piecewise"});
          for (const auto& [p, b] : node.branches) out.push_back(Json::array({pred_to_json(p), expr_to_json(b)}));
          if (node.otherwise) out.push_back(Json::array({"else", expr_to_json(*node.otherwise)}));
          return out;
        }
      },
      n.v);
}

inline Json pred_to_json(const Pred& p) {
  return std::visit(
      [](const auto& node) -> Json {
        using N = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<N, PredNode::Bool>) {
          return node.value;
        } else if constexpr (std::is_same_v<N, PredNode::Cmp>) {
          static const char* names[] = {"lt", "le", "eq", "gt", "ge"};
          return Json::array({names[static_cast<int>(node.op)], expr_to_json(node.lhs), expr_to_json(node.rhs)});
        } else if constexpr (std::is_same_v<N, PredNode::IsRational>) {
          return Json::array({"rational", expr_to_json(node.arg)});
        } else if constexpr (std::is_same_v<N, PredNode::And> || std::is_same_v<N, PredNode::Or>) {
          Json out = Json::array({std::is_same_v<N, PredNode::And> ? "and" : "or"});
          for (const auto& a : node.args) out.push_back(pred_to_json(a));
          return out;
        } else {
          return Json::array({"not", pred_to_json(node.arg)});
        }
      },
      p.node().v);
}

inline Json multifunction_to_json(const MultifunctionSpec& m) {
  Json pieces = Json::array();
  for (const auto& p : m.pieces) {
    pieces.push_back(Json{{"when", pred_to_json(p.guard)},
                          {"lower", expr_to_json(p.lower)},
                          {"upper", expr_to_json(p.upper)},
                          {"closed_lower", p.closed_lower},
                          {"closed_upper", p.closed_upper}});
  }
  return Json{{"pieces", pieces}, {"empty_allowed", m.empty_allowed}};
}

/** @brief Formats a schema failure against the source text as "origin:line:col: message". */
inline std::string anchor_message(const std::string& origin, const std::string& text, const SchemaFailure& f) {
  auto pos = locate_json_pointer(text, f.pointer());
  std::string where = origin;
  if (pos) where += ":" + std::to_string(pos->line) + ":" + std::to_string(pos->column);
  return where + ": " + f.what() + " (at " + (f.pointer().empty() ? std::string("/") : f.pointer()) + ")";
}

/** @brief Parses JSON text; syntax errors become ConfigError with line and column. */
inline Json parse_json_text(const std::string& text, const std::string& origin, const std::string& module,
                            const std::string& op) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t byte = e.byte;
    int line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(module, op, origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": JSON syntax error");
  }
}

}  // namespace bergelab
