#pragma once
// A candidate invariant: the logical reading (a formula over plain program
// variables), its canonical text, and which inference pass produced it.

#include <string>
#include <vector>

#include "tropinv/expr.hpp"
#include "tropinv/trace.hpp"

namespace tropinv {

struct Candidate {
  std::string text;
  Expr formula;
  std::string provenance;
};

// True iff the candidate's formula holds at the valuation (exact arithmetic).
bool holds_on(const Candidate& c, const Valuation& v);

// Keeps exactly the candidates that hold on every row of the filter traces.
std::vector<Candidate> filter_candidates(const std::vector<Candidate>& cands,
                                         const TraceSet& traces);

// Parses one canonical relation text ("x - y <= 0", "t = 2*a + 1",
// "max(0, x - 5) >= y - 5", disjunctions/conjunctions of these) into a
// candidate with the given provenance.
Candidate parse_candidate(const std::string& text, const std::string& provenance = "parsed");

}  // namespace tropinv
