#include "nashlab/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace nashlab {

namespace {

Expr node(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

bool is_const(const Expr& e) { return e->kind == ExprKind::Constant; }

Cx pow_int(Cx base, int k) {
  Cx acc(1.0, 0.0);
  for (int i = 0; i < k; ++i) acc *= base;
  return acc;
}

}  // namespace

Expr make_const(Cx v) {
  require_finite(v, "expression constant");
  ExprNode n;
  n.kind = ExprKind::Constant;
  n.value = v;
  return node(std::move(n));
}

Expr make_var(const std::string& name) {
  ExprNode n;
  n.kind = ExprKind::Variable;
  n.name = name;
  return node(std::move(n));
}

Expr make_add(Expr a, Expr b) {
  if (is_const(a) && is_const(b)) return make_const(a->value + b->value);
  ExprNode n;
  n.kind = ExprKind::Add;
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return node(std::move(n));
}

Expr make_sub(Expr a, Expr b) {
  if (is_const(a) && is_const(b)) return make_const(a->value - b->value);
  ExprNode n;
  n.kind = ExprKind::Sub;
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return node(std::move(n));
}

Expr make_mul(Expr a, Expr b) {
  if (is_const(a) && is_const(b)) return make_const(a->value * b->value);
  ExprNode n;
  n.kind = ExprKind::Mul;
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return node(std::move(n));
}

Expr make_div(Expr a, Expr b) {
  if (is_const(a) && is_const(b) && std::abs(b->value) >= 1e-300) {
    return make_const(a->value / b->value);
  }
  ExprNode n;
  n.kind = ExprKind::Div;
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return node(std::move(n));
}

Expr make_pow(Expr a, int k) {
  if (k < 0) throw NumericError("make_pow: negative exponent");
  if (is_const(a)) return make_const(pow_int(a->value, k));
  ExprNode n;
  n.kind = ExprKind::Pow;
  n.lhs = std::move(a);
  n.exponent = k;
  return node(std::move(n));
}

Expr make_exp(Expr a) {
  ExprNode n;
  n.kind = ExprKind::Exp;
  n.lhs = std::move(a);
  return node(std::move(n));
}

Expr make_neg(Expr a) {
  if (is_const(a)) return make_const(-a->value);
  ExprNode n;
  n.kind = ExprKind::Neg;
  n.lhs = std::move(a);
  return node(std::move(n));
}

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  Cx number{};        // Number
  std::string text;   // Ident
  size_t column = 0;  // 1-based
};

class Lexer {
public:
  explicit Lexer(const std::string& s) : s_(s) {}

  Token next() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    Token t;
    t.column = pos_ + 1;
    if (pos_ >= s_.size()) {
      t.kind = Tok::End;
      return t;
    }
    char c = s_[pos_];
    switch (c) {
      case '+': ++pos_; t.kind = Tok::Plus; return t;
      case '-': ++pos_; t.kind = Tok::Minus; return t;
      case '*': ++pos_; t.kind = Tok::Star; return t;
      case '/': ++pos_; t.kind = Tok::Slash; return t;
      case '^': ++pos_; t.kind = Tok::Caret; return t;
      case '(': ++pos_; t.kind = Tok::LParen; return t;
      case ')': ++pos_; t.kind = Tok::RParen; return t;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ < s_.size() && s_[pos_] == '.') {
        ++pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
      if (pos_ == start || (pos_ == start + 1 && s_[start] == '.')) {
        throw ParseError("malformed number", t.column);
      }
      double v = std::strtod(s_.substr(start, pos_ - start).c_str(), nullptr);
      bool imaginary = false;
      // Trailing 'i' is part of the literal unless it starts an identifier.
      if (pos_ < s_.size() && s_[pos_] == 'i' &&
          (pos_ + 1 >= s_.size() || !is_ident_char(s_[pos_ + 1]))) {
        imaginary = true;
        ++pos_;
      }
      t.kind = Tok::Number;
      t.number = imaginary ? Cx(0.0, v) : Cx(v, 0.0);
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < s_.size() && is_ident_char(s_[pos_])) ++pos_;
      t.kind = Tok::Ident;
      t.text = s_.substr(start, pos_ - start);
      return t;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", t.column);
  }

private:
  static bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }
  const std::string& s_;
  size_t pos_ = 0;
};

class Parser {
public:
  Parser(const std::string& text, const std::set<std::string>* allowed)
      : lex_(text), allowed_(allowed) {
    advance();
  }

  Expr run() {
    Expr e = expr();
    if (cur_.kind != Tok::End) throw ParseError("trailing input", cur_.column);
    return e;
  }

private:
  void advance() { cur_ = lex_.next(); }

  Expr expr() {
    Expr acc = term();
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      bool plus = cur_.kind == Tok::Plus;
      advance();
      Expr rhs = term();
      acc = plus ? make_add(acc, rhs) : make_sub(acc, rhs);
    }
    return acc;
  }

  Expr term() {
    Expr acc = factor();
    while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash) {
      bool mul = cur_.kind == Tok::Star;
      advance();
      Expr rhs = factor();
      acc = mul ? make_mul(acc, rhs) : make_div(acc, rhs);
    }
    return acc;
  }

  Expr factor() {
    if (cur_.kind == Tok::Minus) {
      advance();
      return make_neg(factor());
    }
    Expr base = atom();
    if (cur_.kind == Tok::Caret) {
      advance();
      if (cur_.kind != Tok::Number || cur_.number.imag() != 0.0 ||
          cur_.number.real() < 0.0 || cur_.number.real() != std::floor(cur_.number.real())) {
        throw ParseError("expected non-negative integer exponent", cur_.column);
      }
      int k = static_cast<int>(cur_.number.real());
      advance();
      return make_pow(base, k);
    }
    return base;
  }

  Expr atom() {
    switch (cur_.kind) {
      case Tok::Number: {
        Expr e = make_const(cur_.number);
        advance();
        return e;
      }
      case Tok::Ident: {
        std::string name = cur_.text;
        size_t col = cur_.column;
        advance();
        if (name == "i") return make_const(Cx(0.0, 1.0));
        if (name == "exp") {
          expect(Tok::LParen, "expected '(' after exp");
          Expr inner = expr();
          expect(Tok::RParen, "expected ')'");
          return make_exp(inner);
        }
        if (allowed_ && !allowed_->count(name)) {
          throw ParseError("unknown identifier '" + name + "'", col);
        }
        return make_var(name);
      }
      case Tok::LParen: {
        advance();
        Expr inner = expr();
        expect(Tok::RParen, "expected ')'");
        return inner;
      }
      default:
        throw ParseError("expected number, identifier or '('", cur_.column);
    }
  }

  void expect(Tok k, const char* message) {
    if (cur_.kind != k) throw ParseError(message, cur_.column);
    advance();
  }

  Lexer lex_;
  Token cur_;
  const std::set<std::string>* allowed_;
};

}  // namespace

Expr parse_expr(const std::string& text) { return Parser(text, nullptr).run(); }

Expr parse_expr(const std::string& text, const std::set<std::string>& allowed) {
  return Parser(text, &allowed).run();
}

namespace {

std::string print_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string print_const(Cx v) {
  if (v.imag() == 0.0) {
    std::string s = print_double(v.real());
    return v.real() < 0.0 ? "(" + s + ")" : s;
  }
  if (v.real() == 0.0) {
    std::string s = print_double(v.imag()) + "i";
    return v.imag() < 0.0 ? "(" + s + ")" : s;
  }
  std::string s = "(" + print_double(v.real());
  if (v.imag() >= 0.0) s += "+";
  s += print_double(v.imag()) + "i)";
  return s;
}

// Precedence levels: add/sub 1, mul/div 2, neg 3, pow 4, atoms 5.
void print_node(const Expr& e, int min_prec, std::string& out) {
  switch (e->kind) {
    case ExprKind::Constant:
      out += print_const(e->value);
      return;
    case ExprKind::Variable:
      out += e->name;
      return;
    case ExprKind::Add:
    case ExprKind::Sub: {
      bool wrap = min_prec > 1;
      if (wrap) out += "(";
      print_node(e->lhs, 1, out);
      out += (e->kind == ExprKind::Add) ? "+" : "-";
      print_node(e->rhs, 2, out);
      if (wrap) out += ")";
      return;
    }
    case ExprKind::Mul:
    case ExprKind::Div: {
      bool wrap = min_prec > 2;
      if (wrap) out += "(";
      print_node(e->lhs, 2, out);
      out += (e->kind == ExprKind::Mul) ? "*" : "/";
      print_node(e->rhs, 3, out);
      if (wrap) out += ")";
      return;
    }
    case ExprKind::Neg: {
      bool wrap = min_prec > 3;
      if (wrap) out += "(";
      out += "-";
      print_node(e->lhs, 3, out);
      if (wrap) out += ")";
      return;
    }
    case ExprKind::Pow: {
      bool wrap = min_prec > 4;
      if (wrap) out += "(";
      print_node(e->lhs, 5, out);
      out += "^" + std::to_string(e->exponent);
      if (wrap) out += ")";
      return;
    }
    case ExprKind::Exp:
      out += "exp(";
      print_node(e->lhs, 1, out);
      out += ")";
      return;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print_node(e, 1, out);
  return out;
}

bool expr_equal(const Expr& a, const Expr& b) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::Constant:
      return a->value == b->value;
    case ExprKind::Variable:
      return a->name == b->name;
    case ExprKind::Pow:
      return a->exponent == b->exponent && expr_equal(a->lhs, b->lhs);
    case ExprKind::Exp:
    case ExprKind::Neg:
      return expr_equal(a->lhs, b->lhs);
    default:
      return expr_equal(a->lhs, b->lhs) && expr_equal(a->rhs, b->rhs);
  }
}

namespace {

void collect_vars(const Expr& e, std::set<std::string>& out) {
  switch (e->kind) {
    case ExprKind::Constant:
      return;
    case ExprKind::Variable:
      out.insert(e->name);
      return;
    case ExprKind::Pow:
    case ExprKind::Exp:
    case ExprKind::Neg:
      collect_vars(e->lhs, out);
      return;
    default:
      collect_vars(e->lhs, out);
      collect_vars(e->rhs, out);
  }
}

}  // namespace

std::set<std::string> expr_variables(const Expr& e) {
  std::set<std::string> out;
  collect_vars(e, out);
  return out;
}

Cx expr_eval(const Expr& e, const std::map<std::string, Cx>& point) {
  switch (e->kind) {
    case ExprKind::Constant:
      return e->value;
    case ExprKind::Variable: {
      auto it = point.find(e->name);
      if (it == point.end()) throw NumericError("expr_eval: missing variable " + e->name);
      return it->second;
    }
    case ExprKind::Add:
      return expr_eval(e->lhs, point) + expr_eval(e->rhs, point);
    case ExprKind::Sub:
      return expr_eval(e->lhs, point) - expr_eval(e->rhs, point);
    case ExprKind::Mul:
      return expr_eval(e->lhs, point) * expr_eval(e->rhs, point);
    case ExprKind::Div: {
      Cx den = expr_eval(e->rhs, point);
      if (std::abs(den) < 1e-300) throw NumericError("expr_eval: division by (near-)zero");
      return expr_eval(e->lhs, point) / den;
    }
    case ExprKind::Pow:
      return pow_int(expr_eval(e->lhs, point), e->exponent);
    case ExprKind::Exp:
      return std::exp(expr_eval(e->lhs, point));
    case ExprKind::Neg:
      return -expr_eval(e->lhs, point);
  }
  throw NumericError("expr_eval: corrupt node");
}

namespace {

// Truncated power series in t = x - center, coefficients by ascending power.
using Series = std::vector<Cx>;

Series series_add(const Series& a, const Series& b, bool sub) {
  Series r(a.size());
  for (size_t k = 0; k < r.size(); ++k) r[k] = sub ? a[k] - b[k] : a[k] + b[k];
  return r;
}

Series series_mul(const Series& a, const Series& b) {
  Series r(a.size(), Cx(0.0, 0.0));
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == Cx(0.0, 0.0)) continue;
    for (size_t j = 0; i + j < r.size(); ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

Series series_div(const Series& a, const Series& b) {
  if (std::abs(b[0]) < 1e-300) {
    throw NumericError("taylor_truncate: expression not analytic at center (division by a series with vanishing constant term)");
  }
  Series r(a.size(), Cx(0.0, 0.0));
  for (size_t k = 0; k < r.size(); ++k) {
    Cx acc = a[k];
    for (size_t j = 1; j <= k; ++j) acc -= b[j] * r[k - j];
    r[k] = acc / b[0];
  }
  return r;
}

Series series_exp(const Series& a) {
  Series u = a;
  Cx a0 = u[0];
  u[0] = Cx(0.0, 0.0);
  Series acc(a.size(), Cx(0.0, 0.0));
  acc[0] = Cx(1.0, 0.0);
  Series term = acc;
  for (size_t k = 1; k < a.size(); ++k) {
    term = series_mul(term, u);
    for (Cx& c : term) c /= static_cast<double>(k);
    bool zero = true;
    for (size_t j = 0; j < term.size(); ++j) {
      acc[j] += term[j];
      if (term[j] != Cx(0.0, 0.0)) zero = false;
    }
    if (zero) break;
  }
  Cx e0 = std::exp(a0);
  for (Cx& c : acc) c *= e0;
  return acc;
}

Series series_of(const Expr& e, Cx center, size_t len) {
  switch (e->kind) {
    case ExprKind::Constant: {
      Series s(len, Cx(0.0, 0.0));
      s[0] = e->value;
      return s;
    }
    case ExprKind::Variable: {
      Series s(len, Cx(0.0, 0.0));
      s[0] = center;
      if (len > 1) s[1] = Cx(1.0, 0.0);
      return s;
    }
    case ExprKind::Add:
      return series_add(series_of(e->lhs, center, len), series_of(e->rhs, center, len), false);
    case ExprKind::Sub:
      return series_add(series_of(e->lhs, center, len), series_of(e->rhs, center, len), true);
    case ExprKind::Mul:
      return series_mul(series_of(e->lhs, center, len), series_of(e->rhs, center, len));
    case ExprKind::Div:
      return series_div(series_of(e->lhs, center, len), series_of(e->rhs, center, len));
    case ExprKind::Pow: {
      Series base = series_of(e->lhs, center, len);
      Series acc(len, Cx(0.0, 0.0));
      acc[0] = Cx(1.0, 0.0);
      for (int i = 0; i < e->exponent; ++i) acc = series_mul(acc, base);
      return acc;
    }
    case ExprKind::Exp:
      return series_exp(series_of(e->lhs, center, len));
    case ExprKind::Neg: {
      Series s = series_of(e->lhs, center, len);
      for (Cx& c : s) c = -c;
      return s;
    }
  }
  throw NumericError("taylor_truncate: corrupt node");
}

}  // namespace

UniPoly taylor_truncate(const Expr& e, Cx center, int order) {
  if (order < 0) throw NumericError("taylor_truncate: negative order");
  auto vars = expr_variables(e);
  if (vars.size() > 1) {
    throw NumericError("taylor_truncate: expression must be univariate");
  }
  Series s = series_of(e, center, static_cast<size_t>(order) + 1);
  for (Cx c : s) require_finite(c, "Taylor coefficient");
  return UniPoly(std::move(s));
}

Expr unipoly_to_expr(const UniPoly& p, const std::string& var, Cx center) {
  const auto& c = p.coeffs();
  if (c.empty()) return make_const(Cx(0.0, 0.0));
  Expr t = (center == Cx(0.0, 0.0)) ? make_var(var) : make_sub(make_var(var), make_const(center));
  Expr acc = make_const(c.back());
  for (int k = static_cast<int>(c.size()) - 2; k >= 0; --k) {
    acc = make_add(make_mul(acc, t), make_const(c[static_cast<size_t>(k)]));
  }
  return acc;
}

Expr substitute_vars(const Expr& e, const std::map<std::string, Expr>& repl) {
  switch (e->kind) {
    case ExprKind::Constant:
      return e;
    case ExprKind::Variable: {
      auto it = repl.find(e->name);
      return it == repl.end() ? e : it->second;
    }
    case ExprKind::Add:
      return make_add(substitute_vars(e->lhs, repl), substitute_vars(e->rhs, repl));
    case ExprKind::Sub:
      return make_sub(substitute_vars(e->lhs, repl), substitute_vars(e->rhs, repl));
    case ExprKind::Mul:
      return make_mul(substitute_vars(e->lhs, repl), substitute_vars(e->rhs, repl));
    case ExprKind::Div:
      return make_div(substitute_vars(e->lhs, repl), substitute_vars(e->rhs, repl));
    case ExprKind::Pow:
      return make_pow(substitute_vars(e->lhs, repl), e->exponent);
    case ExprKind::Exp:
      return make_exp(substitute_vars(e->lhs, repl));
    case ExprKind::Neg:
      return make_neg(substitute_vars(e->lhs, repl));
  }
  throw NumericError("substitute_vars: corrupt node");
}

std::optional<MultiPoly> expr_to_poly(const Expr& e, const std::vector<std::string>& variables) {
  switch (e->kind) {
    case ExprKind::Constant:
      return MultiPoly::constant(variables, e->value);
    case ExprKind::Variable: {
      MultiPoly probe(variables);
      if (probe.var_index(e->name) < 0) return std::nullopt;
      return MultiPoly::variable(variables, e->name);
    }
    case ExprKind::Add: {
      auto a = expr_to_poly(e->lhs, variables), b = expr_to_poly(e->rhs, variables);
      if (!a || !b) return std::nullopt;
      return *a + *b;
    }
    case ExprKind::Sub: {
      auto a = expr_to_poly(e->lhs, variables), b = expr_to_poly(e->rhs, variables);
      if (!a || !b) return std::nullopt;
      return *a - *b;
    }
    case ExprKind::Mul: {
      auto a = expr_to_poly(e->lhs, variables), b = expr_to_poly(e->rhs, variables);
      if (!a || !b) return std::nullopt;
      return *a * *b;
    }
    case ExprKind::Div: {
      if (e->rhs->kind != ExprKind::Constant) return std::nullopt;
      if (std::abs(e->rhs->value) < 1e-300) return std::nullopt;
      auto a = expr_to_poly(e->lhs, variables);
      if (!a) return std::nullopt;
      return a->scaled(Cx(1.0, 0.0) / e->rhs->value);
    }
    case ExprKind::Pow: {
      auto a = expr_to_poly(e->lhs, variables);
      if (!a) return std::nullopt;
      MultiPoly acc = MultiPoly::constant(variables, Cx(1.0, 0.0));
      for (int i = 0; i < e->exponent; ++i) acc = acc * *a;
      return acc;
    }
    case ExprKind::Neg: {
      auto a = expr_to_poly(e->lhs, variables);
      if (!a) return std::nullopt;
      return -*a;
    }
    case ExprKind::Exp:
      return std::nullopt;
  }
  return std::nullopt;
}

CVec HoloMap::eval(const CVec& x) const {
  if (x.size() != base_dim()) throw NumericError("HoloMap::eval: wrong base dimension");
  std::map<std::string, Cx> point;
  for (int a = 0; a < base_dim(); ++a) point[base_vars[static_cast<size_t>(a)]] = x[a];
  CVec out(target_dim());
  for (int j = 0; j < target_dim(); ++j) {
    out[j] = expr_eval(components[static_cast<size_t>(j)], point);
  }
  return out;
}

HoloMap make_holomap(std::vector<std::string> base_vars, std::vector<Expr> components,
                     Polydisc domain) {
  if (domain.dim() != static_cast<int>(base_vars.size())) {
    throw NumericError("make_holomap: domain dimension mismatch");
  }
  std::set<std::string> declared(base_vars.begin(), base_vars.end());
  for (const Expr& c : components) {
    for (const auto& v : expr_variables(c)) {
      if (!declared.count(v)) throw NumericError("make_holomap: undeclared variable " + v);
    }
  }
  HoloMap h;
  h.base_vars = std::move(base_vars);
  h.components = std::move(components);
  h.domain = std::move(domain);
  return h;
}

std::vector<CVec> map_images(const HoloMap& h, const std::vector<CVec>& base_points) {
  std::vector<CVec> out;
  out.reserve(base_points.size());
  for (const CVec& x : base_points) out.push_back(h.eval(x));
  return out;
}

}  // namespace nashlab
