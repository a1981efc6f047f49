#pragma once
// SMT-LIB2 encoding and external solver sessions over stdio. A session wraps
// one long-lived solver process; state is rebuilt through (reset) so the
// process is reused across queries. Every counterexample model is validated
// against the asserted formulas with the exact evaluator before it is
// returned.

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "tropinv/bigq.hpp"
#include "tropinv/expr.hpp"

namespace tropinv {

// Process died, protocol desynchronized, hard deadline hit, or a model failed
// validation. Never silently converted into a verdict.
struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverConfig {
  std::string command;        // shell command speaking SMT-LIB2 on stdio
  int timeout_ms = 10000;     // soft per-query limit passed to the solver
  int hard_grace_ms = 20000;  // extra wall-clock slack before kill
  std::string logic = "QF_NIA";
};

// TROPINV_SOLVER_CMD from the environment, else the compiled-in default.
std::string default_solver_command();

// Variable rendering: x -> "x", x@3 -> "x__3", x@in -> "x__in".
std::string smt_name(const VarRef& v);
VarRef parse_smt_name(const std::string& name);

// Lowers max/min to ite chains and clears rational constants by
// cross-multiplying at comparison atoms; 0/1-valued use of a comparison in
// arithmetic position becomes (ite c 1 0). Input is a boolean formula.
std::string encode(const Expr& formula);
// Stamps plain variables with step index i, then encodes.
std::string encode_at(const Expr& formula, int i);

using Model = std::map<VarRef, BigRat>;

// Total environment over a model; variables the solver omitted read as 0.
Env model_env(const Model& m);

enum class EntailStatus { Entailed, Counterexample, Unknown };

struct EntailResult {
  EntailStatus status = EntailStatus::Unknown;
  Model model;         // Counterexample
  std::string reason;  // Unknown
};

class SolverSession {
 public:
  explicit SolverSession(SolverConfig cfg);
  ~SolverSession();
  SolverSession(const SolverSession&) = delete;
  SolverSession& operator=(const SolverSession&) = delete;

  // Fresh assertion state (set-logic, timeout) on the same process.
  void reset();
  void push();
  void pop();
  void assert_formula(const Expr& f);
  // Do the current assertions entail the goal? Bracketed internally with
  // push/pop, so session assertions persist across calls.
  EntailResult entail(const Expr& goal);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tropinv
