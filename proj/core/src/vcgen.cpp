#include "tropinv/vcgen.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

namespace tropinv {

namespace {

using Sigma = std::map<std::string, Expr>;

// Reassembles a node of the same shape over new children.
Expr rebuild(const Expr& e, const std::vector<Expr>& kids) {
  switch (e.op()) {
    case Op::Add: return Expr::add(kids[0], kids[1]);
    case Op::Sub: return Expr::sub(kids[0], kids[1]);
    case Op::Neg: return Expr::neg(kids[0]);
    case Op::Mul: return Expr::mul(kids[0], kids[1]);
    case Op::Max: return Expr::maxf(kids);
    case Op::Min: return Expr::minf(kids);
    case Op::Cmp: return Expr::cmp(e.cmpop(), kids[0], kids[1]);
    case Op::And: return Expr::land(kids[0], kids[1]);
    case Op::Or: return Expr::lor(kids[0], kids[1]);
    case Op::Not: return Expr::lnot(kids[0]);
    default: throw VcgenError("unexpected operator");
  }
}

// Substitutes every plain variable by its current symbolic value.
Expr subst(const Expr& e, const Sigma& sigma) {
  switch (e.op()) {
    case Op::Var: {
      if (!e.varref().plain()) return e;
      auto it = sigma.find(e.varref().name);
      if (it == sigma.end())
        throw VcgenError("use of unassigned variable: " + e.varref().name);
      return it->second;
    }
    case Op::Const:
    case Op::BoolConst:
      return e;
    default: {
      std::vector<Expr> kids;
      kids.reserve(e.kids().size());
      for (const auto& k : e.kids()) kids.push_back(subst(k, sigma));
      return rebuild(e, kids);
    }
  }
}

// ¬(a < b) becomes a >= b, etc.; non-comparisons get a plain not.
Expr negate_cond(const Expr& e) {
  if (e.op() == Op::Cmp) {
    CmpOp flipped;
    switch (e.cmpop()) {
      case CmpOp::Lt: flipped = CmpOp::Ge; break;
      case CmpOp::Le: flipped = CmpOp::Gt; break;
      case CmpOp::Gt: flipped = CmpOp::Le; break;
      case CmpOp::Ge: flipped = CmpOp::Lt; break;
      case CmpOp::Eq: flipped = CmpOp::Ne; break;
      case CmpOp::Ne: flipped = CmpOp::Eq; break;
    }
    return Expr::cmp(flipped, e.kids()[0], e.kids()[1]);
  }
  return Expr::lnot(e);
}

struct Path {
  std::vector<Expr> conds;
  Sigma sigma;
};

// Symbolic execution of loop-free code; every if splits the path set.
std::vector<Path> exec_paths(const std::vector<StmtPtr>& stmts, std::vector<Path> paths,
                             bool allow_spec_stmts) {
  for (const auto& st : stmts) {
    switch (st->kind) {
      case Stmt::Assign:
        for (auto& p : paths) p.sigma[st->target] = subst(st->expr, p.sigma);
        break;
      case Stmt::If: {
        std::vector<Path> next;
        for (auto& p : paths) {
          Expr c = subst(st->expr, p.sigma);
          Path then_p = p;
          then_p.conds.push_back(c);
          Path else_p = std::move(p);
          else_p.conds.push_back(negate_cond(c));
          for (auto& q : exec_paths(st->body, {std::move(then_p)}, allow_spec_stmts))
            next.push_back(std::move(q));
          for (auto& q : exec_paths(st->orelse, {std::move(else_p)}, allow_spec_stmts))
            next.push_back(std::move(q));
        }
        paths = std::move(next);
        break;
      }
      case Stmt::Assume:
      case Stmt::Assert:
        if (!allow_spec_stmts)
          throw VcgenError("assume/assert inside the loop body is unsupported");
        for (auto& p : paths) p.conds.push_back(subst(st->expr, p.sigma));
        break;
      case Stmt::Mark:
        if (!allow_spec_stmts) throw VcgenError("mark inside the loop body is unsupported");
        break;  // sampling points do not constrain states
      case Stmt::While:
        throw VcgenError("nested while on line " + std::to_string(st->line) +
                         " is unsupported");
      case Stmt::Return:
        throw VcgenError("return before the labeled loop is unsupported");
    }
  }
  return paths;
}

// Finds the labeled while at top level and returns the statements before it.
const Stmt* find_loop(const Program& p, const std::string& location,
                      std::vector<StmtPtr>& prefix) {
  for (const auto& st : p.body) {
    if (st->kind == Stmt::While && st->label == location) return st.get();
    prefix.push_back(st);
  }
  throw VcgenError("no top-level while labeled [" + location + "]");
}

}  // namespace

TransitionSystem extract_transition_system(const Program& p, const std::string& location) {
  TransitionSystem ts;
  ts.vars = p.traced_vars(location);

  std::vector<StmtPtr> prefix;
  const Stmt* loop = find_loop(p, location, prefix);

  // Entry path: parameters start as rigid ghosts.
  Path entry;
  for (const auto& prm : p.params) entry.sigma[prm] = Expr::var(prm, VarRef::kGhost);
  std::vector<Path> entry_paths = exec_paths(prefix, {std::move(entry)}, true);

  std::vector<Expr> init_disjuncts;
  for (const auto& path : entry_paths) {
    // A ghost retained verbatim by some state variable is named by that
    // variable at index 0; its defining equality becomes trivial and drops.
    Sigma ghost_map;
    for (const auto& prm : p.params) {
      Expr g = Expr::var(prm, VarRef::kGhost);
      for (const auto& v : ts.vars) {
        auto it = path.sigma.find(v);
        if (it != path.sigma.end() && it->second == g) {
          ghost_map[prm] = Expr::var(v, 0);
          break;
        }
      }
      if (!ghost_map.count(prm)) ghost_map[prm] = g;
    }
    std::function<Expr(const Expr&)> resolve = [&](const Expr& x) -> Expr {
      if (x.op() == Op::Var && x.varref().ghost()) return ghost_map.at(x.varref().name);
      if (x.op() == Op::Const || x.op() == Op::BoolConst || x.op() == Op::Var) return x;
      std::vector<Expr> kids;
      for (const auto& k : x.kids()) kids.push_back(resolve(k));
      return rebuild(x, kids);
    };

    std::vector<Expr> conjs;
    for (const auto& c : path.conds) conjs.push_back(resolve(c));
    for (const auto& v : ts.vars) {
      auto it = path.sigma.find(v);
      if (it == path.sigma.end())
        throw VcgenError("state variable " + v + " is unassigned before the loop");
      Expr rhs = resolve(it->second);
      Expr lhs = Expr::var(v, 0);
      if (rhs == lhs) continue;
      conjs.push_back(Expr::cmp(CmpOp::Eq, lhs, rhs));
    }
    init_disjuncts.push_back(Expr::conj(conjs));
  }
  ts.init = Expr::disj(init_disjuncts);

  // Loop body: state variables at index 0 stand for step n-1.
  Path body_entry;
  for (const auto& v : ts.vars) body_entry.sigma[v] = Expr::var(v, 0);
  Expr guard = subst(loop->expr, body_entry.sigma);
  std::vector<Path> body_paths = exec_paths(loop->body, {std::move(body_entry)}, false);

  // An update expression shared verbatim by every path is factored out.
  auto update_of = [&](const Path& path, const std::string& v) {
    auto it = path.sigma.find(v);
    return it == path.sigma.end() ? Expr::var(v, 0) : it->second;
  };
  std::vector<std::string> common_vars, varying_vars;
  for (const auto& v : ts.vars) {
    Expr first = update_of(body_paths[0], v);
    bool same = std::all_of(body_paths.begin(), body_paths.end(),
                            [&](const Path& q) { return update_of(q, v) == first; });
    (same ? common_vars : varying_vars).push_back(v);
  }

  std::vector<Expr> conjs{guard};
  for (const auto& v : common_vars)
    conjs.push_back(Expr::cmp(CmpOp::Eq, Expr::var(v, 1), update_of(body_paths[0], v)));
  if (!varying_vars.empty() || body_paths.size() > 1) {
    std::vector<Expr> disjuncts;
    for (const auto& path : body_paths) {
      std::vector<Expr> sub_conjs = path.conds;
      for (const auto& v : varying_vars)
        sub_conjs.push_back(Expr::cmp(CmpOp::Eq, Expr::var(v, 1), update_of(path, v)));
      disjuncts.push_back(Expr::conj(sub_conjs));
    }
    if (body_paths.size() > 1) conjs.push_back(Expr::disj(disjuncts));
    else if (!varying_vars.empty()) conjs.push_back(disjuncts[0]);
  }
  ts.trans = Expr::conj(conjs);
  return ts;
}

std::string serialize_transition_system(const TransitionSystem& ts) {
  auto step_names = [](const VarRef& v) -> std::string {
    if (v.ghost()) return v.name + "@in";
    if (v.index == 0) return v.name + "@n-1";
    if (v.index == 1) return v.name + "@n";
    return v.name + "@" + std::to_string(v.index);
  };
  std::ostringstream os;
  os << "vars: ";
  for (size_t i = 0; i < ts.vars.size(); ++i) os << (i ? ", " : "") << ts.vars[i];
  os << "\n";
  os << "init: " << to_text(ts.init) << "\n";
  os << "trans: " << to_text(ts.trans, step_names) << "\n";
  return os.str();
}

TransitionSystem parse_transition_system(const std::string& text) {
  TransitionSystem ts;
  std::istringstream is(text);
  std::string line;
  bool have_vars = false, have_init = false, have_trans = false;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = line;
    auto pos = t.find_first_not_of(" \t\r");
    if (pos == std::string::npos || t[pos] == '#') continue;
    t = t.substr(pos);
    auto starts = [&](const char* p) { return t.rfind(p, 0) == 0; };
    try {
      if (starts("vars:")) {
        std::string rest = t.substr(5);
        std::string cur;
        for (char c : rest + ",") {
          if (c == ',') {
            auto b = cur.find_first_not_of(" \t\r");
            auto e = cur.find_last_not_of(" \t\r");
            if (b != std::string::npos) ts.vars.push_back(cur.substr(b, e - b + 1));
            cur.clear();
          } else {
            cur += c;
          }
        }
        have_vars = true;
      } else if (starts("init:")) {
        ts.init = parse_formula_text(t.substr(5));
        have_init = true;
      } else if (starts("trans:")) {
        ts.trans = parse_formula_text(t.substr(6));
        have_trans = true;
      } else {
        throw VcgenError("unrecognized line");
      }
    } catch (const std::exception& e) {
      throw VcgenError("transition system, line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_vars || !have_init || !have_trans)
    throw VcgenError("transition system needs vars:, init: and trans: lines");
  return ts;
}

}  // namespace tropinv
