#pragma once
// Iterative k-induction over an external SMT solver. A candidate is proved at
// the smallest depth k where the base cases 0..k hold and the inductive step
// from k consecutive candidate states goes through; previously proved
// invariants strengthen the step as lemmas. Counterexamples are concrete
// prefixes, replayed through the transition system before being reported.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tropinv/candidate.hpp"
#include "tropinv/smt.hpp"
#include "tropinv/trace.hpp"
#include "tropinv/vcgen.hpp"

namespace tropinv {

// A concrete execution prefix: one valuation of the state vector per step,
// plus the rigid entry constants (x@in) the init formula mentions.
struct Cex {
  std::vector<Valuation> steps;
  std::map<std::string, BigRat> ghosts;
};

struct ProofResult {
  enum class Verdict { Proved, Disproved, Unproved };
  Verdict verdict = Verdict::Unproved;
  int k = -1;           // Proved: induction depth; Disproved: cex length - 1
  std::optional<Cex> cex;
  std::string reason;   // Unproved
};

// Exact re-evaluation: init and every step of trans hold along the prefix and
// p fails at the last state. Variables a formula mentions but the cex does
// not bind read as 0.
bool replay_cex(const TransitionSystem& ts, const Cex& cex, const Expr& p);

// Owns one solver session for base cases and one for step queries; both are
// rebuilt per call, so a Prover can be reused across many candidates.
class Prover {
 public:
  Prover(TransitionSystem ts, SolverConfig cfg);

  // Tries k = 0..maxk in order. Base-case counterexample => Disproved with a
  // validated cex. Base-case unknown => Unproved. Step failure advances k.
  ProofResult kprove(const Expr& p, int maxk, const std::vector<Expr>& lemmas = {});

  const TransitionSystem& system() const { return ts_; }

 private:
  ProofResult kprove_attempt(const Expr& p, int maxk, const std::vector<Expr>& lemmas);

  TransitionSystem ts_;
  SolverConfig cfg_;
  SolverSession base_;
  SolverSession step_;
};

// One-shot convenience over a fresh Prover.
ProofResult kprove(const TransitionSystem& ts, const Expr& p, int maxk,
                   const std::vector<Expr>& lemmas = {},
                   const SolverConfig& cfg = {});

struct VerifiedCandidate {
  Candidate cand;
  ProofResult result;
  int round = 0;  // round in which the verdict landed
};

// Proved invariants split into an independent core and members entailed by
// the rest; disproved and unproved kept separately. Original candidate order
// within each bucket.
struct Partition {
  std::vector<VerifiedCandidate> independent;
  std::vector<VerifiedCandidate> redundant;
  std::vector<VerifiedCandidate> disproved;
  std::vector<VerifiedCandidate> unproved;
};

struct VerifyOutcome {
  Partition partition;
  int rounds = 0;
  bool solver_failed = false;
  std::string failure;  // first solver failure, when solver_failed
};

// Round-based fixpoint: every pending candidate is attempted with the proved
// set snapshotted at the round start as lemmas; newly proved ones join the
// lemmas for the next round. Stops when a round proves nothing new or nothing
// is pending. `jobs` workers share the round's pending list; results do not
// depend on jobs. A solver failure aborts with partial results flagged.
VerifyOutcome verify_set(const TransitionSystem& ts, const std::vector<Candidate>& cands,
                         int maxk, const SolverConfig& cfg = {}, int jobs = 1);

// Splits proved candidates into (independent, redundant) index sets: walking
// simplest-first, a candidate entailed by the conjunction of the other still-
// independent ones is redundant. Indices refer to `proved`, ascending.
std::pair<std::vector<size_t>, std::vector<size_t>> check_redundancy(
    const std::vector<Candidate>& proved, SolverSession& session);

}  // namespace tropinv
