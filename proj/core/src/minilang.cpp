#include "tropinv/minilang.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <random>

namespace tropinv {

// ---------------------------------------------------------------------------
// Parser

namespace {

struct PTok {
  enum Kind { Num, Ident, Punct, End } kind;
  std::string text;
  int line, col;
};

struct PLexer {
  const std::string& s;
  size_t i = 0;
  int line = 1, col = 1;
  PTok cur;

  explicit PLexer(const std::string& src) : s(src) { advance(); }

  [[noreturn]] void fail(const std::string& msg, int l, int c) {
    throw ParseError("line " + std::to_string(l) + ", col " + std::to_string(c) + ": " + msg);
  }
  [[noreturn]] void fail_here(const std::string& msg) { fail(msg, cur.line, cur.col); }

  void bump() {
    if (s[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  }

  void advance() {
    for (;;) {
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) bump();
      if (i + 1 < s.size() && s[i] == '/' && s[i + 1] == '/') {
        while (i < s.size() && s[i] != '\n') bump();
        continue;
      }
      break;
    }
    if (i >= s.size()) {
      cur = {PTok::End, "", line, col};
      return;
    }
    int l = line, c = col;
    char ch = s[i];
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::string t;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        t += s[i];
        bump();
      }
      cur = {PTok::Num, t, l, c};
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::string t;
      while (i < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) {
        t += s[i];
        bump();
      }
      cur = {PTok::Ident, t, l, c};
      return;
    }
    static const char* two[] = {"<=", ">=", "==", "!=", "&&", "||"};
    for (const char* t : two) {
      if (s.compare(i, 2, t) == 0) {
        cur = {PTok::Punct, t, l, c};
        bump();
        bump();
        return;
      }
    }
    cur = {PTok::Punct, std::string(1, ch), l, c};
    bump();
  }

  bool accept(const std::string& t) {
    if (cur.kind == PTok::Punct && cur.text == t) {
      advance();
      return true;
    }
    return false;
  }
  bool accept_kw(const std::string& t) {
    if (cur.kind == PTok::Ident && cur.text == t) {
      advance();
      return true;
    }
    return false;
  }
  void expect(const std::string& t) {
    if (!accept(t)) fail_here("expected '" + t + "', got '" + cur.text + "'");
  }
  std::string expect_ident() {
    if (cur.kind != PTok::Ident) fail_here("expected identifier, got '" + cur.text + "'");
    std::string t = cur.text;
    advance();
    return t;
  }
};

const std::set<std::string> kKeywords = {"prog",   "if",     "else",   "while",
                                         "assume", "assert", "return", "true",
                                         "false"};

struct ProgParser {
  PLexer lx;
  Program prog;

  explicit ProgParser(const std::string& s) : lx(s) {}

  Program parse() {
    if (!lx.accept_kw("prog")) lx.fail_here("expected 'prog'");
    prog.name = lx.expect_ident();
    lx.expect("(");
    if (!lx.accept(")")) {
      do {
        std::string p = lx.expect_ident();
        if (std::find(prog.params.begin(), prog.params.end(), p) != prog.params.end())
          lx.fail_here("duplicate parameter '" + p + "'");
        prog.params.push_back(p);
      } while (lx.accept(","));
      lx.expect(")");
    }
    prog.body = block();
    if (lx.cur.kind != PTok::End) lx.fail_here("trailing input after program body");
    check_variables();
    return std::move(prog);
  }

  std::vector<StmtPtr> block() {
    lx.expect("{");
    std::vector<StmtPtr> out;
    while (!lx.accept("}")) out.push_back(statement());
    return out;
  }

  StmtPtr statement() {
    auto st = std::make_shared<Stmt>();
    st->line = lx.cur.line;
    if (lx.accept("[")) {
      st->kind = Stmt::Mark;
      st->label = lx.expect_ident();
      lx.expect("]");
      lx.accept(";");
      register_label(st->label);
      return st;
    }
    if (lx.accept_kw("if")) {
      st->kind = Stmt::If;
      lx.expect("(");
      st->expr = expr();
      lx.expect(")");
      st->body = block();
      if (lx.accept_kw("else")) st->orelse = block();
      return st;
    }
    if (lx.accept_kw("while")) {
      st->kind = Stmt::While;
      if (lx.accept("[")) {
        st->label = lx.expect_ident();
        lx.expect("]");
        register_label(st->label);
      }
      lx.expect("(");
      st->expr = expr();
      lx.expect(")");
      st->body = block();
      return st;
    }
    if (lx.cur.kind == PTok::Ident && (lx.cur.text == "assume" || lx.cur.text == "assert")) {
      st->kind = lx.cur.text == "assume" ? Stmt::Assume : Stmt::Assert;
      lx.advance();
      lx.expect("(");
      st->expr = expr();
      lx.expect(")");
      lx.expect(";");
      return st;
    }
    if (lx.accept_kw("return")) {
      st->kind = Stmt::Return;
      st->expr = expr();
      lx.expect(";");
      return st;
    }
    if (lx.cur.kind == PTok::Ident) {
      if (kKeywords.count(lx.cur.text)) lx.fail_here("unexpected keyword '" + lx.cur.text + "'");
      st->kind = Stmt::Assign;
      st->target = lx.expect_ident();
      lx.expect("=");
      st->expr = expr();
      lx.expect(";");
      return st;
    }
    lx.fail_here("expected statement, got '" + lx.cur.text + "'");
  }

  void register_label(const std::string& l) {
    if (prog.locations.count(l)) lx.fail_here("duplicate label '" + l + "'");
    prog.locations.insert(l);
  }

  // expression precedence: || < && < ! < comparison < +- < * < unary -
  Expr expr() { return or_level(); }
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
    static const std::pair<const char*, CmpOp> ops[] = {
        {"<=", CmpOp::Le}, {">=", CmpOp::Ge}, {"==", CmpOp::Eq},
        {"!=", CmpOp::Ne}, {"<", CmpOp::Lt},  {">", CmpOp::Gt}};
    for (const auto& [t, op] : ops) {
      if (lx.accept(t)) return Expr::cmp(op, a, arith());
    }
    return a;
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
    Expr e = unary();
    while (lx.accept("*")) e = Expr::mul(e, unary());
    return e;
  }
  Expr unary() {
    if (lx.accept("-")) return Expr::neg(unary());
    return atom();
  }
  Expr atom() {
    if (lx.cur.kind == PTok::Num) {
      Expr e = Expr::constant(BigRat(BigInt(lx.cur.text)));
      lx.advance();
      return e;
    }
    if (lx.accept("(")) {
      Expr e = or_level();
      lx.expect(")");
      return e;
    }
    if (lx.cur.kind == PTok::Ident) {
      if (lx.cur.text == "true" || lx.cur.text == "false") {
        Expr e = Expr::bconst(lx.cur.text == "true");
        lx.advance();
        return e;
      }
      if (kKeywords.count(lx.cur.text)) lx.fail_here("unexpected keyword '" + lx.cur.text + "'");
      std::string name = lx.cur.text;
      lx.advance();
      return Expr::var(name);
    }
    lx.fail_here("expected expression, got '" + lx.cur.text + "'");
  }

  // Use-before-assignment check. A variable counts as defined after its
  // first assignment on every path (if/else contributes the intersection;
  // loop bodies contribute nothing since they may not run).
  void check_variables() {
    std::set<std::string> defined(prog.params.begin(), prog.params.end());
    check_block(prog.body, defined);
  }

  void check_block(const std::vector<StmtPtr>& stmts, std::set<std::string>& defined) {
    for (const auto& st : stmts) check_stmt(st, defined);
  }

  void check_uses(const Expr& e, const std::set<std::string>& defined, int line) {
    for (const auto& v : collect_vars(e)) {
      if (!defined.count(v.name))
        throw ParseError("line " + std::to_string(line) + ": use of undeclared variable '" +
                         v.name + "'");
    }
  }

  void check_stmt(const StmtPtr& st, std::set<std::string>& defined) {
    switch (st->kind) {
      case Stmt::Assign:
        check_uses(st->expr, defined, st->line);
        defined.insert(st->target);
        break;
      case Stmt::If: {
        check_uses(st->expr, defined, st->line);
        auto d1 = defined, d2 = defined;
        check_block(st->body, d1);
        check_block(st->orelse, d2);
        for (const auto& v : d1)
          if (d2.count(v)) defined.insert(v);
        break;
      }
      case Stmt::While: {
        check_uses(st->expr, defined, st->line);
        auto d = defined;
        check_block(st->body, d);
        break;
      }
      case Stmt::Assume:
      case Stmt::Assert:
      case Stmt::Return:
        check_uses(st->expr, defined, st->line);
        break;
      case Stmt::Mark: break;
    }
  }
};

}  // namespace

Program parse_program(const std::string& text) {
  ProgParser p(text);
  return p.parse();
}

// ---------------------------------------------------------------------------
// Traced-variable layout

namespace {

// Flattened syntactic walk; stops (returns true) when the location is hit.
bool collect_until(const std::vector<StmtPtr>& stmts, const std::string& location,
                   std::vector<std::string>& order, std::set<std::string>& seen) {
  for (const auto& st : stmts) {
    switch (st->kind) {
      case Stmt::Assign:
        if (!seen.count(st->target)) {
          seen.insert(st->target);
          order.push_back(st->target);
        }
        break;
      case Stmt::If:
        if (collect_until(st->body, location, order, seen)) return true;
        if (collect_until(st->orelse, location, order, seen)) return true;
        break;
      case Stmt::While:
        if (st->label == location) return true;
        if (collect_until(st->body, location, order, seen)) return true;
        break;
      case Stmt::Mark:
        if (st->label == location) return true;
        break;
      default: break;
    }
  }
  return false;
}

}  // namespace

std::vector<std::string> Program::traced_vars(const std::string& location) const {
  if (!locations.count(location))
    throw MinilangError("unknown location '" + location + "' in program " + name);
  std::vector<std::string> order(params.begin(), params.end());
  std::set<std::string> seen(params.begin(), params.end());
  collect_until(body, location, order, seen);
  return order;
}

// ---------------------------------------------------------------------------
// Interpreter

namespace {

struct Interp {
  const Program& p;
  const std::string& location;
  long step_limit;
  std::vector<std::string> traced;
  std::map<std::string, BigRat> env;
  TraceSet out;
  long steps = 0;
  bool in_entry_prefix = true;
  bool returned = false;

  Interp(const Program& prog, const std::string& loc, long limit)
      : p(prog), location(loc), step_limit(limit) {
    traced = p.traced_vars(loc);
    out.location = loc;
    out.variables = traced;
  }

  Env lookup() {
    return [this](const VarRef& v) -> std::optional<BigRat> {
      auto it = env.find(v.name);
      if (it == env.end()) return std::nullopt;
      return it->second;
    };
  }

  void tick() {
    if (++steps > step_limit)
      throw StepLimitExceeded("step limit " + std::to_string(step_limit) + " exceeded in " +
                              p.name);
  }

  void snapshot() {
    Valuation v;
    for (const auto& name : traced) {
      auto it = env.find(name);
      if (it == env.end())
        throw MinilangError("variable '" + name + "' not yet assigned at location " + location);
      v.entries[name] = it->second;
    }
    out.rows.push_back(std::move(v));
  }

  void exec_block(const std::vector<StmtPtr>& stmts) {
    for (const auto& st : stmts) {
      exec(st);
      if (returned) return;
    }
  }

  void exec(const StmtPtr& st) {
    tick();
    if (st->kind != Stmt::Assume && st->kind != Stmt::Assert) in_entry_prefix = false;
    switch (st->kind) {
      case Stmt::Assign:
        env[st->target] = eval_arith(st->expr, lookup());
        break;
      case Stmt::If:
        if (eval_bool(st->expr, lookup())) exec_block(st->body);
        else exec_block(st->orelse);
        break;
      case Stmt::While: {
        for (;;) {
          tick();
          if (st->label == location) snapshot();
          if (!eval_bool(st->expr, lookup())) break;
          exec_block(st->body);
          if (returned) return;
        }
        break;
      }
      case Stmt::Assume:
        if (!eval_bool(st->expr, lookup()))
          throw EntryAssumptionViolated("assume at line " + std::to_string(st->line) +
                                        " violated");
        break;
      case Stmt::Assert:
        if (!eval_bool(st->expr, lookup())) {
          if (in_entry_prefix)
            throw EntryAssumptionViolated("entry assert at line " + std::to_string(st->line) +
                                          " violated");
          throw AssertViolation("assert at line " + std::to_string(st->line) + " violated in " +
                                p.name);
        }
        break;
      case Stmt::Return:
        (void)eval_arith(st->expr, lookup());
        returned = true;
        break;
      case Stmt::Mark:
        if (st->label == location) snapshot();
        break;
    }
  }
};

}  // namespace

TraceSet run_traced(const Program& p, const InputVector& input, const std::string& location,
                    long step_limit) {
  for (const auto& param : p.params)
    if (!input.count(param)) throw MinilangError("input does not bind parameter '" + param + "'");
  Interp it(p, location, step_limit);
  for (const auto& [k, v] : input) it.env[k] = BigRat(v);
  it.exec_block(p.body);
  return std::move(it.out);
}

std::vector<InputVector> gen_random_inputs(const Program& p, int n, unsigned long long seed,
                                           long long lo, long long hi) {
  if (n < 1) throw MinilangError("gen_random_inputs: n must be >= 1");
  if (lo > hi) throw MinilangError("gen_random_inputs: empty range");

  // Entry assumption = leading assume/assert prefix of the body.
  std::vector<Expr> entry;
  for (const auto& st : p.body) {
    if (st->kind == Stmt::Assume || st->kind == Stmt::Assert) entry.push_back(st->expr);
    else break;
  }

  std::mt19937_64 rng(seed);
  unsigned long long span = static_cast<unsigned long long>(hi - lo) + 1ULL;
  std::vector<InputVector> out;
  int consecutive_rejects = 0;
  while (static_cast<int>(out.size()) < n) {
    InputVector iv;
    for (const auto& param : p.params) {
      unsigned long long r = rng();
      long long v = lo + static_cast<long long>(span == 0 ? r : r % span);
      iv[param] = BigInt(v);
    }
    Env env = [&](const VarRef& v) -> std::optional<BigRat> {
      auto it = iv.find(v.name);
      if (it == iv.end()) return std::nullopt;
      return BigRat(it->second);
    };
    bool ok = true;
    for (const auto& e : entry) {
      if (!eval_bool(e, env)) {
        ok = false;
        break;
      }
    }
    if (!ok) {
      if (++consecutive_rejects > 1000)
        throw RetryBudgetExceeded("entry assumption of " + p.name +
                                  " rejected 1000 consecutive random inputs in [" +
                                  std::to_string(lo) + "," + std::to_string(hi) + "]");
      continue;
    }
    consecutive_rejects = 0;
    out.push_back(std::move(iv));
  }
  return out;
}

}  // namespace tropinv
