#pragma once
// A small imperative integer language with labeled sampling locations:
// parser, interpreter, tracer, and random input generation. Integers are
// arbitrary precision; there is no division, modulo, array, or call.

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "tropinv/expr.hpp"
#include "tropinv/trace.hpp"

namespace tropinv {

struct MinilangError : std::runtime_error {
  explicit MinilangError(const std::string& what) : std::runtime_error(what) {}
};
struct ParseError : MinilangError {
  using MinilangError::MinilangError;
};
// Input rejected by the program's entry assumption (assume/assert prefix).
struct EntryAssumptionViolated : MinilangError {
  using MinilangError::MinilangError;
};
struct AssertViolation : MinilangError {
  using MinilangError::MinilangError;
};
struct StepLimitExceeded : MinilangError {
  using MinilangError::MinilangError;
};
struct RetryBudgetExceeded : MinilangError {
  using MinilangError::MinilangError;
};

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Stmt {
  enum Kind { Assign, If, While, Assume, Assert, Return, Mark } kind;
  int line = 0;
  std::string target;             // Assign: lhs variable
  std::string label;              // While: optional label; Mark: label
  Expr expr;                      // Assign rhs / guard / condition / return value
  std::vector<StmtPtr> body;      // If: then-branch; While: loop body
  std::vector<StmtPtr> orelse;    // If: else-branch
};

struct Program {
  std::string name;
  std::vector<std::string> params;
  std::vector<StmtPtr> body;
  std::set<std::string> locations;

  // Variables observable at the labeled location: parameters plus locals
  // first assigned (in flattened program order) before the label. This is
  // the tracer's row layout and the transition system's state vector.
  std::vector<std::string> traced_vars(const std::string& location) const;
};

using InputVector = std::map<std::string, BigInt>;

// Grammar: prog name(p1, p2) { stmt* } with statements
//   v = expr;  if (cond) {..} [else {..}]  while[L] (cond) {..}
//   assume(cond);  assert(cond);  return expr;  [L]
// Expressions: + - * over arbitrary-precision integers; comparisons yield
// 0/1 and && || ! combine conditions.
Program parse_program(const std::string& text);

inline constexpr long kDefaultStepLimit = 1000000;

// Executes the program and samples the valuation of traced_vars(location)
// every time control reaches the location: for a labeled while, at every
// guard evaluation including the final failing one; for a bare [L] mark,
// once per execution of the mark.
TraceSet run_traced(const Program& p, const InputVector& input, const std::string& location,
                    long step_limit = kDefaultStepLimit);

// n input vectors drawn uniformly per parameter from [lo, hi], deterministic
// in seed. Draws violating the entry assumption are discarded and redrawn;
// more than 1000 consecutive rejections raise RetryBudgetExceeded.
std::vector<InputVector> gen_random_inputs(const Program& p, int n, unsigned long long seed,
                                           long long lo, long long hi);

}  // namespace tropinv
