#include "tropinv/expr.hpp"

#include <cassert>
#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>

namespace tropinv {

Expr Expr::make(Node n) {
  Expr e;
  e.n_ = std::make_shared<const Node>(std::move(n));
  return e;
}

Expr Expr::constant(BigRat v) {
  Node n;
  n.op = Op::Const;
  n.value = std::move(v);
  return make(std::move(n));
}

Expr Expr::bconst(bool b) {
  Node n;
  n.op = Op::BoolConst;
  n.bval = b;
  return make(std::move(n));
}

Expr Expr::var(std::string name, int index) {
  Node n;
  n.op = Op::Var;
  n.var = VarRef{std::move(name), index};
  return make(std::move(n));
}

Expr Expr::var(VarRef v) {
  Node n;
  n.op = Op::Var;
  n.var = std::move(v);
  return make(std::move(n));
}

Expr Expr::add(Expr a, Expr b) {
  Node n;
  n.op = Op::Add;
  n.kids = {std::move(a), std::move(b)};
  return make(std::move(n));
}

Expr Expr::sub(Expr a, Expr b) {
  Node n;
  n.op = Op::Sub;
  n.kids = {std::move(a), std::move(b)};
  return make(std::move(n));
}

Expr Expr::neg(Expr a) {
  Node n;
  n.op = Op::Neg;
  n.kids = {std::move(a)};
  return make(std::move(n));
}

Expr Expr::mul(Expr a, Expr b) {
  Node n;
  n.op = Op::Mul;
  n.kids = {std::move(a), std::move(b)};
  return make(std::move(n));
}

Expr Expr::maxf(std::vector<Expr> args) {
  Node n;
  n.op = Op::Max;
  n.kids = std::move(args);
  return make(std::move(n));
}

Expr Expr::minf(std::vector<Expr> args) {
  Node n;
  n.op = Op::Min;
  n.kids = std::move(args);
  return make(std::move(n));
}

Expr Expr::cmp(CmpOp op, Expr a, Expr b) {
  Node n;
  n.op = Op::Cmp;
  n.cmp = op;
  n.kids = {std::move(a), std::move(b)};
  return make(std::move(n));
}

Expr Expr::land(Expr a, Expr b) {
  Node n;
  n.op = Op::And;
  n.kids = {std::move(a), std::move(b)};
  return make(std::move(n));
}

Expr Expr::lor(Expr a, Expr b) {
  Node n;
  n.op = Op::Or;
  n.kids = {std::move(a), std::move(b)};
  return make(std::move(n));
}

Expr Expr::lnot(Expr a) {
  Node n;
  n.op = Op::Not;
  n.kids = {std::move(a)};
  return make(std::move(n));
}

Expr Expr::conj(const std::vector<Expr>& fs) {
  if (fs.empty()) return bconst(true);
  Expr acc = fs[0];
  for (size_t i = 1; i < fs.size(); ++i) acc = land(acc, fs[i]);
  return acc;
}

Expr Expr::disj(const std::vector<Expr>& fs) {
  if (fs.empty()) return bconst(false);
  Expr acc = fs[0];
  for (size_t i = 1; i < fs.size(); ++i) acc = lor(acc, fs[i]);
  return acc;
}

bool Expr::operator==(const Expr& o) const {
  if (n_ == o.n_) return true;
  if (!n_ || !o.n_) return false;
  if (n_->op != o.n_->op) return false;
  switch (n_->op) {
    case Op::Const: return n_->value == o.n_->value;
    case Op::BoolConst: return n_->bval == o.n_->bval;
    case Op::Var: return n_->var == o.n_->var;
    case Op::Cmp:
      if (n_->cmp != o.n_->cmp) return false;
      break;
    default: break;
  }
  if (n_->kids.size() != o.n_->kids.size()) return false;
  for (size_t i = 0; i < n_->kids.size(); ++i)
    if (!(n_->kids[i] == o.n_->kids[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Evaluation

static bool cmp_holds(CmpOp op, const BigRat& a, const BigRat& b) {
  switch (op) {
    case CmpOp::Lt: return a < b;
    case CmpOp::Le: return a <= b;
    case CmpOp::Gt: return a > b;
    case CmpOp::Ge: return a >= b;
    case CmpOp::Eq: return a == b;
    case CmpOp::Ne: return a != b;
  }
  return false;
}

BigRat eval_arith(const Expr& e, const Env& env) {
  switch (e.op()) {
    case Op::Const: return e.value();
    case Op::BoolConst: return BigRat(e.bval() ? 1 : 0);
    case Op::Var: {
      auto v = env(e.varref());
      if (!v) throw UnboundVariable("unbound variable: " + e.varref().name);
      return *v;
    }
    case Op::Add: return eval_arith(e.kids()[0], env) + eval_arith(e.kids()[1], env);
    case Op::Sub: return eval_arith(e.kids()[0], env) - eval_arith(e.kids()[1], env);
    case Op::Neg: return -eval_arith(e.kids()[0], env);
    case Op::Mul: return eval_arith(e.kids()[0], env) * eval_arith(e.kids()[1], env);
    case Op::Max: {
      BigRat m = eval_arith(e.kids()[0], env);
      for (size_t i = 1; i < e.kids().size(); ++i) {
        BigRat v = eval_arith(e.kids()[i], env);
        if (v > m) m = v;
      }
      return m;
    }
    case Op::Min: {
      BigRat m = eval_arith(e.kids()[0], env);
      for (size_t i = 1; i < e.kids().size(); ++i) {
        BigRat v = eval_arith(e.kids()[i], env);
        if (v < m) m = v;
      }
      return m;
    }
    case Op::Cmp:
    case Op::And:
    case Op::Or:
    case Op::Not: return BigRat(eval_bool(e, env) ? 1 : 0);
  }
  throw std::logic_error("eval_arith: bad op");
}

bool eval_bool(const Expr& e, const Env& env) {
  switch (e.op()) {
    case Op::BoolConst: return e.bval();
    case Op::Cmp:
      return cmp_holds(e.cmpop(), eval_arith(e.kids()[0], env), eval_arith(e.kids()[1], env));
    case Op::And: return eval_bool(e.kids()[0], env) && eval_bool(e.kids()[1], env);
    case Op::Or: return eval_bool(e.kids()[0], env) || eval_bool(e.kids()[1], env);
    case Op::Not: return !eval_bool(e.kids()[0], env);
    default: return eval_arith(e, env) != 0;
  }
}

// ---------------------------------------------------------------------------
// Traversals

static void collect(const Expr& e, std::vector<VarRef>& out) {
  if (e.op() == Op::Var) {
    for (const auto& v : out)
      if (v == e.varref()) return;
    out.push_back(e.varref());
    return;
  }
  for (const auto& k : e.kids()) collect(k, out);
}

std::vector<VarRef> collect_vars(const Expr& e) {
  std::vector<VarRef> out;
  collect(e, out);
  return out;
}

static Expr map_vars(const Expr& e, const std::function<Expr(const VarRef&)>& f) {
  switch (e.op()) {
    case Op::Const:
    case Op::BoolConst: return e;
    case Op::Var: return f(e.varref());
    default: break;
  }
  std::vector<Expr> kids;
  kids.reserve(e.kids().size());
  bool changed = false;
  for (const auto& k : e.kids()) {
    Expr nk = map_vars(k, f);
    if (!(nk == k)) changed = true;
    kids.push_back(std::move(nk));
  }
  if (!changed) return e;
  switch (e.op()) {
    case Op::Add: return Expr::add(kids[0], kids[1]);
    case Op::Sub: return Expr::sub(kids[0], kids[1]);
    case Op::Neg: return Expr::neg(kids[0]);
    case Op::Mul: return Expr::mul(kids[0], kids[1]);
    case Op::Max: return Expr::maxf(std::move(kids));
    case Op::Min: return Expr::minf(std::move(kids));
    case Op::Cmp: return Expr::cmp(e.cmpop(), kids[0], kids[1]);
    case Op::And: return Expr::land(kids[0], kids[1]);
    case Op::Or: return Expr::lor(kids[0], kids[1]);
    case Op::Not: return Expr::lnot(kids[0]);
    default: break;
  }
  throw std::logic_error("map_vars: bad op");
}

Expr shift_index(const Expr& e, int j) {
  return map_vars(e, [&](const VarRef& v) {
    if (v.plain() || v.ghost()) return Expr::var(v);
    return Expr::var(v.name, v.index + j);
  });
}

Expr at_index(const Expr& e, int i) {
  return map_vars(e, [&](const VarRef& v) {
    if (v.plain()) return Expr::var(v.name, i);
    return Expr::var(v);
  });
}

Expr simplify(const Expr& e) {
  auto is_const = [](const Expr& x) { return x.op() == Op::Const; };
  switch (e.op()) {
    case Op::Const:
    case Op::BoolConst:
    case Op::Var: return e;
    default: break;
  }
  std::vector<Expr> kids;
  for (const auto& k : e.kids()) kids.push_back(simplify(k));
  switch (e.op()) {
    case Op::Add:
      if (is_const(kids[0]) && is_const(kids[1]))
        return Expr::constant(kids[0].value() + kids[1].value());
      if (is_const(kids[0]) && kids[0].value() == 0) return kids[1];
      if (is_const(kids[1]) && kids[1].value() == 0) return kids[0];
      return Expr::add(kids[0], kids[1]);
    case Op::Sub:
      if (is_const(kids[0]) && is_const(kids[1]))
        return Expr::constant(kids[0].value() - kids[1].value());
      if (is_const(kids[1]) && kids[1].value() == 0) return kids[0];
      return Expr::sub(kids[0], kids[1]);
    case Op::Neg:
      if (is_const(kids[0])) return Expr::constant(-kids[0].value());
      return Expr::neg(kids[0]);
    case Op::Mul:
      if (is_const(kids[0]) && is_const(kids[1]))
        return Expr::constant(kids[0].value() * kids[1].value());
      if (is_const(kids[0]) && kids[0].value() == 0) return Expr::constant(0L);
      if (is_const(kids[1]) && kids[1].value() == 0) return Expr::constant(0L);
      if (is_const(kids[0]) && kids[0].value() == 1) return kids[1];
      if (is_const(kids[1]) && kids[1].value() == 1) return kids[0];
      return Expr::mul(kids[0], kids[1]);
    case Op::Max: return Expr::maxf(std::move(kids));
    case Op::Min: return Expr::minf(std::move(kids));
    case Op::Cmp: return Expr::cmp(e.cmpop(), kids[0], kids[1]);
    case Op::And: return Expr::land(kids[0], kids[1]);
    case Op::Or: return Expr::lor(kids[0], kids[1]);
    case Op::Not: return Expr::lnot(kids[0]);
    default: break;
  }
  throw std::logic_error("simplify: bad op");
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::Or: return 1;
    case Op::And: return 2;
    case Op::Not: return 3;
    case Op::Cmp: return 4;
    case Op::Add:
    case Op::Sub: return 5;
    case Op::Mul: return 6;
    case Op::Neg: return 7;
    default: return 8;
  }
}

std::string default_var_text(const VarRef& v) {
  if (v.plain()) return v.name;
  if (v.ghost()) return v.name + "@in";
  return v.name + "@" + std::to_string(v.index);
}

std::string cmp_text(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
  }
  return "?";
}

struct Printer {
  const std::function<std::string(const VarRef&)>& vt;

  std::string paren(const Expr& e, int parent_prec, bool strict = false) {
    std::string s = print(e);
    int p = precedence(e);
    if (p < parent_prec || (strict && p == parent_prec)) return "(" + s + ")";
    return s;
  }

  std::string print(const Expr& e) {
    switch (e.op()) {
      case Op::Const: {
        const BigRat& v = e.value();
        std::string s = to_string(v);
        return s;
      }
      case Op::BoolConst: return e.bval() ? "true" : "false";
      case Op::Var: return vt ? vt(e.varref()) : default_var_text(e.varref());
      case Op::Add: {
        const Expr& r = e.kids()[1];
        if (r.op() == Op::Const && r.value() < 0)
          return paren(e.kids()[0], 5) + " - " + to_string(BigRat(-r.value()));
        return paren(e.kids()[0], 5) + " + " + paren(r, 5, true);
      }
      case Op::Sub: {
        const Expr& r = e.kids()[1];
        if (r.op() == Op::Const && r.value() < 0)
          return paren(e.kids()[0], 5) + " + " + to_string(BigRat(-r.value()));
        return paren(e.kids()[0], 5) + " - " + paren(r, 5, true);
      }
      case Op::Neg: return "-" + paren(e.kids()[0], 7, false);
      case Op::Mul: return paren(e.kids()[0], 6) + "*" + paren(e.kids()[1], 6, true);
      case Op::Max:
      case Op::Min: {
        std::string s = e.op() == Op::Max ? "max(" : "min(";
        for (size_t i = 0; i < e.kids().size(); ++i) {
          if (i) s += ", ";
          s += print(e.kids()[i]);
        }
        return s + ")";
      }
      case Op::Cmp:
        return paren(e.kids()[0], 4, true) + " " + cmp_text(e.cmpop()) + " " +
               paren(e.kids()[1], 4, true);
      case Op::And: return paren(e.kids()[0], 2) + " && " + paren(e.kids()[1], 2);
      case Op::Or: return paren(e.kids()[0], 1) + " || " + paren(e.kids()[1], 1);
      case Op::Not: return "!" + paren(e.kids()[0], 3, false);
    }
    return "?";
  }
};

}  // namespace

std::string to_text(const Expr& e, const std::function<std::string(const VarRef&)>& var_text) {
  Printer p{var_text};
  return p.print(e);
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
  enum Kind { Num, Ident, Punct, End } kind;
  std::string text;
  size_t pos;
};

struct Lexer {
  const std::string& s;
  size_t i = 0;
  Token cur;

  explicit Lexer(const std::string& src) : s(src) { advance(); }

  [[noreturn]] void fail(const std::string& msg, size_t pos) {
    throw std::runtime_error("parse error at offset " + std::to_string(pos) + ": " + msg);
  }

  void advance() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size()) {
      cur = {Token::End, "", i};
      return;
    }
    size_t start = i;
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      cur = {Token::Num, s.substr(i, j - i), start};
      i = j;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
        ++j;
      // A step-index suffix binds tightly: "x@n-1" is one token, while
      // "x@n - 1" (with spaces) is a subtraction.
      if (j < s.size() && s[j] == '@') {
        size_t k = j + 1;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
          j = k;
        } else if (s.compare(k, 2, "in") == 0 &&
                   (k + 2 >= s.size() ||
                    (!std::isalnum(static_cast<unsigned char>(s[k + 2])) && s[k + 2] != '_'))) {
          j = k + 2;
        } else if (k < s.size() && s[k] == 'n' &&
                   (k + 1 >= s.size() ||
                    (!std::isalnum(static_cast<unsigned char>(s[k + 1])) && s[k + 1] != '_'))) {
          j = k + 1;
          if (s.compare(j, 2, "-1") == 0 &&
              (j + 2 >= s.size() || !std::isdigit(static_cast<unsigned char>(s[j + 2]))))
            j += 2;
        } else {
          fail("bad variable index suffix", k);
        }
      }
      cur = {Token::Ident, s.substr(i, j - i), start};
      i = j;
      return;
    }
    // multi-char operators
    static const char* two[] = {"<=", ">=", "==", "!=", "&&", "||"};
    for (const char* t : two) {
      if (s.compare(i, 2, t) == 0) {
        cur = {Token::Punct, t, start};
        i += 2;
        return;
      }
    }
    cur = {Token::Punct, std::string(1, c), start};
    ++i;
  }

  bool accept(const std::string& t) {
    if (cur.kind == Token::Punct && cur.text == t) {
      advance();
      return true;
    }
    return false;
  }

  void expect(const std::string& t) {
    if (!accept(t)) fail("expected '" + t + "', got '" + cur.text + "'", cur.pos);
  }
};

struct FormulaParser {
  Lexer lx;

  explicit FormulaParser(const std::string& s) : lx(s) {}

  Expr parse() {
    Expr e = or_level();
    if (lx.cur.kind != Token::End)
      lx.fail("unexpected trailing input '" + lx.cur.text + "'", lx.cur.pos);
    return e;
  }

  Expr or_level() {
    Expr e = and_level();
    while (lx.accept("||")) e = Expr::lor(e, and_level());
    return e;
  }

  Expr and_level() {
    Expr e = not_level();
    while (lx.accept("&&")) e = Expr::land(e, not_level());
    return e;
  }

  Expr not_level() {
    if (lx.accept("!")) return Expr::lnot(not_level());
    return cmp_level();
  }

  Expr cmp_level() {
    Expr a = arith();
    std::optional<CmpOp> op;
    if (lx.cur.kind == Token::Punct) {
      const std::string& t = lx.cur.text;
      if (t == "<") op = CmpOp::Lt;
      else if (t == "<=") op = CmpOp::Le;
      else if (t == ">") op = CmpOp::Gt;
      else if (t == ">=") op = CmpOp::Ge;
      else if (t == "=" || t == "==") op = CmpOp::Eq;
      else if (t == "!=") op = CmpOp::Ne;
    }
    if (!op) return a;
    lx.advance();
    Expr b = arith();
    return Expr::cmp(*op, a, b);
  }

  Expr arith() {
    Expr e = term();
    for (;;) {
      if (lx.accept("+")) e = Expr::add(e, term());
      else if (lx.accept("-")) e = Expr::sub(e, term());
      else return e;
    }
  }

  Expr term() {
    Expr e = factor();
    while (lx.accept("*")) e = Expr::mul(e, factor());
    return e;
  }

  Expr factor() {
    if (lx.accept("-")) return Expr::neg(factor());
    Expr a = atom();
    if (lx.accept("^")) {
      if (lx.cur.kind != Token::Num) lx.fail("expected integer exponent", lx.cur.pos);
      long p = std::stol(lx.cur.text);
      lx.advance();
      if (p < 1) lx.fail("exponent must be >= 1", lx.cur.pos);
      Expr e = a;
      for (long k = 1; k < p; ++k) e = Expr::mul(e, a);
      return e;
    }
    return a;
  }

  Expr number() {
    BigInt n(lx.cur.text);
    lx.advance();
    if (lx.accept("/")) {
      if (lx.cur.kind != Token::Num) lx.fail("expected denominator", lx.cur.pos);
      BigInt d(lx.cur.text);
      lx.advance();
      if (d == 0) lx.fail("zero denominator", lx.cur.pos);
      return Expr::constant(BigRat(n) / BigRat(d));
    }
    return Expr::constant(BigRat(n));
  }

  Expr atom() {
    if (lx.cur.kind == Token::Num) return number();
    if (lx.accept("(")) {
      Expr e = or_level();
      lx.expect(")");
      return e;
    }
    if (lx.cur.kind == Token::Ident) {
      std::string tok = lx.cur.text;
      size_t pos = lx.cur.pos;
      lx.advance();
      if (tok == "true") return Expr::bconst(true);
      if (tok == "false") return Expr::bconst(false);
      if ((tok == "max" || tok == "min") && lx.accept("(")) {
        std::vector<Expr> args;
        args.push_back(arith());
        while (lx.accept(",")) args.push_back(arith());
        lx.expect(")");
        return tok == "max" ? Expr::maxf(std::move(args)) : Expr::minf(std::move(args));
      }
      auto at = tok.find('@');
      if (at == std::string::npos) return Expr::var(std::move(tok));
      std::string name = tok.substr(0, at);
      std::string suffix = tok.substr(at + 1);
      int index;
      if (suffix == "in") index = VarRef::kGhost;
      else if (suffix == "n") index = 1;  // transition-template convention
      else if (suffix == "n-1") index = 0;
      else if (!suffix.empty() && std::isdigit(static_cast<unsigned char>(suffix[0])))
        index = std::stoi(suffix);
      else {
        lx.fail("bad variable index '" + suffix + "'", pos);
      }
      return Expr::var(std::move(name), index);
    }
    lx.fail("unexpected token '" + lx.cur.text + "'", lx.cur.pos);
  }
};

}  // namespace

Expr parse_formula_text(const std::string& text) {
  FormulaParser p(text);
  return p.parse();
}

}  // namespace tropinv
