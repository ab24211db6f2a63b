#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nashlab/poly.hpp"
#include "nashlab/types.hpp"

namespace nashlab {

enum class ExprKind { Constant, Variable, Add, Sub, Mul, Div, Pow, Exp, Neg };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

/// Immutable expression-tree node. Trees are shared; never mutate one.
struct ExprNode {
  ExprKind kind;
  Cx value{};         // Constant
  std::string name;   // Variable
  Expr lhs, rhs;      // children (unary nodes use lhs)
  int exponent = 0;   // Pow (non-negative)
};

Expr make_const(Cx v);
Expr make_var(const std::string& name);
// Binary/unary builders fold constant operands (division only when safe).
Expr make_add(Expr a, Expr b);
Expr make_sub(Expr a, Expr b);
Expr make_mul(Expr a, Expr b);
Expr make_div(Expr a, Expr b);
Expr make_pow(Expr a, int k);
Expr make_exp(Expr a);
Expr make_neg(Expr a);

/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-' factor | atom ('^' nonneg-int)?
///   atom   := number | 'i' | identifier | 'exp' '(' expr ')' | '(' expr ')'
///   number := decimal with optional trailing 'i'
/// When `allowed` is given, identifiers outside it (other than exp/i) are
/// rejected with their column.
Expr parse_expr(const std::string& text);
Expr parse_expr(const std::string& text, const std::set<std::string>& allowed);

std::string to_string(const Expr& e);
bool expr_equal(const Expr& a, const Expr& b);
std::set<std::string> expr_variables(const Expr& e);

Cx expr_eval(const Expr& e, const std::map<std::string, Cx>& point);

/// Degree-<=order Taylor polynomial of a univariate expression at `center`,
/// computed by truncated power-series arithmetic through the tree. The
/// returned coefficients are in powers of (x - center).
UniPoly taylor_truncate(const Expr& e, Cx center, int order);

/// Horner-form tree for sum_k c_k (var - center)^k.
Expr unipoly_to_expr(const UniPoly& p, const std::string& var, Cx center);

/// Rebuilds e with the listed variables replaced by subtrees.
Expr substitute_vars(const Expr& e, const std::map<std::string, Expr>& repl);

/// Conversion for polynomial trees (constants, variables, + - * neg, integer
/// powers, division by constants); nullopt for anything else.
std::optional<MultiPoly> expr_to_poly(const Expr& e, const std::vector<std::string>& variables);

/// Holomorphic map H : U -> C^p given by one expression per component over a
/// polydisc domain U in the base variables.
struct HoloMap {
  std::vector<std::string> base_vars;
  std::vector<Expr> components;
  Polydisc domain;

  int base_dim() const { return static_cast<int>(base_vars.size()); }
  int target_dim() const { return static_cast<int>(components.size()); }
  CVec eval(const CVec& x) const;
};

/// Validates that every component variable is declared, then assembles.
HoloMap make_holomap(std::vector<std::string> base_vars, std::vector<Expr> components,
                     Polydisc domain);

std::vector<CVec> map_images(const HoloMap& h, const std::vector<CVec>& base_points);

}  // namespace nashlab
