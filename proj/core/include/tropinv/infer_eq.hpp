#pragma once
// Polynomial equality inference: the nullspace of the trace matrix over the
// monomial basis up to a degree bound, reported as a canonical basis.

#include <string>
#include <utility>
#include <vector>

#include "tropinv/bigq.hpp"
#include "tropinv/candidate.hpp"
#include "tropinv/trace.hpp"

namespace tropinv {

// One equality sum(coeff_i * term_i) = 0 with integer coprime coefficients.
// Terms are stored in descending graded-lex order and the greatest term has a
// positive coefficient; the constant term (if any) is last.
struct PolyEquality {
  std::vector<std::pair<Term, BigInt>> coeffs;
  std::vector<std::string> var_order;

  // "2*a - t = -1": non-constant terms on the left, negated constant right.
  std::string text() const;
  Expr to_formula() const;
  bool holds_on(const Valuation& v) const;
  Candidate to_candidate() const;
};

// Canonical nullspace basis of the terms-by-rows evaluation matrix. The basis
// is derived from the reduced row echelon form of the row space, so it does
// not depend on row order. Fewer rows than terms is allowed (the nullspace is
// just larger); empty traces are an error. `cap` bounds the monomial count.
std::vector<PolyEquality> infer_equalities(const TraceSet& traces, int degree,
                                           int term_cap = 2000);

}  // namespace tropinv
