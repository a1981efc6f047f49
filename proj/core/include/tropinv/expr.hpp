#pragma once
// Shared expression/formula AST: integer polynomial arithmetic, max/min,
// comparisons, boolean connectives. Variables optionally carry a step index
// (x@0, x@1, ...) or mark a rigid entry-value ghost (x@in). Nodes are
// immutable and cheaply shareable.

#include <climits>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tropinv/bigq.hpp"

namespace tropinv {

enum class Op {
  Const,      // exact rational literal
  BoolConst,  // true/false
  Var,
  Add,
  Sub,
  Neg,
  Mul,
  Max,  // n-ary
  Min,  // n-ary
  Cmp,
  And,
  Or,
  Not,
};

enum class CmpOp { Lt, Le, Gt, Ge, Eq, Ne };

struct VarRef {
  static constexpr int kPlain = INT_MIN;      // unindexed candidate variable
  static constexpr int kGhost = INT_MIN + 1;  // rigid entry constant (x@in)
  std::string name;
  int index = kPlain;

  bool plain() const { return index == kPlain; }
  bool ghost() const { return index == kGhost; }
  bool operator==(const VarRef& o) const { return name == o.name && index == o.index; }
  bool operator<(const VarRef& o) const {
    return name != o.name ? name < o.name : index < o.index;
  }
};

class Expr {
 public:
  struct Node {
    Op op;
    BigRat value;            // Const
    bool bval = false;       // BoolConst
    VarRef var;              // Var
    CmpOp cmp = CmpOp::Eq;   // Cmp
    std::vector<Expr> kids;
  };

  Expr() = default;  // empty handle; only valid after assignment
  bool valid() const { return n_ != nullptr; }

  static Expr constant(BigRat v);
  static Expr constant(long v) { return constant(BigRat(v)); }
  static Expr bconst(bool b);
  static Expr var(std::string name, int index = VarRef::kPlain);
  static Expr var(VarRef v);
  static Expr add(Expr a, Expr b);
  static Expr sub(Expr a, Expr b);
  static Expr neg(Expr a);
  static Expr mul(Expr a, Expr b);
  static Expr maxf(std::vector<Expr> args);
  static Expr minf(std::vector<Expr> args);
  static Expr cmp(CmpOp op, Expr a, Expr b);
  static Expr land(Expr a, Expr b);
  static Expr lor(Expr a, Expr b);
  static Expr lnot(Expr a);
  static Expr conj(const std::vector<Expr>& fs);  // true for empty
  static Expr disj(const std::vector<Expr>& fs);  // false for empty

  Op op() const { return n_->op; }
  const BigRat& value() const { return n_->value; }
  bool bval() const { return n_->bval; }
  const VarRef& varref() const { return n_->var; }
  CmpOp cmpop() const { return n_->cmp; }
  const std::vector<Expr>& kids() const { return n_->kids; }

  bool operator==(const Expr& o) const;  // structural

 private:
  std::shared_ptr<const Node> n_;
  static Expr make(Node n);
};

// Environment resolving a variable to its exact value; nullopt = unbound.
using Env = std::function<std::optional<BigRat>(const VarRef&)>;

struct UnboundVariable : std::runtime_error {
  explicit UnboundVariable(const std::string& what) : std::runtime_error(what) {}
};

// Integer/rational evaluation. Comparisons and connectives yield 0/1.
BigRat eval_arith(const Expr& e, const Env& env);
// Boolean evaluation; arithmetic subterms evaluate exactly, nonzero = true.
bool eval_bool(const Expr& e, const Env& env);

// Collects each distinct variable once, in first-occurrence order.
std::vector<VarRef> collect_vars(const Expr& e);

// Renames indices: absolute index i becomes i + j. Plain and ghost variables
// are untouched. Inverse of itself with -j.
Expr shift_index(const Expr& e, int j);
// Stamps every plain (unindexed) variable with the given absolute index.
Expr at_index(const Expr& e, int i);

// Light structural simplification: constant folding, +0 / *1 / *0 identities.
Expr simplify(const Expr& e);

// Deterministic infix rendering. `var_text` overrides variable rendering
// (defaults: "x", "x@3", "x@in").
std::string to_text(const Expr& e,
                    const std::function<std::string(const VarRef&)>& var_text = nullptr);

// Parses the canonical relation/formula syntax: integer and p/q literals,
// variables (with optional @0 / @n / @n-1 / @in suffix), + - * ^, max(...)/
// min(...), comparisons (= == != < <= > >=), && || !, true/false.
// Throws std::runtime_error with a position-tagged message on bad input.
Expr parse_formula_text(const std::string& text);

}  // namespace tropinv
