#pragma once
// Transition-system extraction: symbolic execution of the entry path and the
// labeled loop body yields M = (init, trans) over step-indexed variables.

#include <string>
#include <vector>

#include "tropinv/expr.hpp"
#include "tropinv/minilang.hpp"

namespace tropinv {

struct VcgenError : MinilangError {
  using MinilangError::MinilangError;
};

// vars: the state vector (same layout the tracer samples at the label).
// init: formula over index 0, plus rigid @in ghosts for entry values that
//       no state variable retained.
// trans: one step, index 0 standing for n-1 and index 1 for n.
struct TransitionSystem {
  std::vector<std::string> vars;
  Expr init;
  Expr trans;
};

// The location must label a top-level while whose body and entry path are
// loop-free (assignments and if/else only; assume/assert allowed before the
// loop). init is the strongest postcondition of the entry path with branches
// as disjuncts; trans is guard ∧ update equations, common updates factored
// out of the per-branch disjunction, unmodified variables framed.
TransitionSystem extract_transition_system(const Program& p, const std::string& location);

// Text form:
//   vars: x, y
//   init: <formula over @0 / @in>
//   trans: <formula over @n-1 / @n>
std::string serialize_transition_system(const TransitionSystem& ts);
TransitionSystem parse_transition_system(const std::string& text);

}  // namespace tropinv
