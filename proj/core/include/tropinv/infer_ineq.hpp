#pragma once
// Template linear inequality inference: box (±v), zone (v1 - v2), and
// octagon (±v1 ± v2) bounds tightened against the observed rows.

#include <string>
#include <utility>
#include <vector>

#include "tropinv/bigq.hpp"
#include "tropinv/candidate.hpp"
#include "tropinv/trace.hpp"

namespace tropinv {

enum class IneqFamily { Box, Zone, Octagon };

// sum(coeff_i * var_i) <= bound (or >=). Canonical: one or two variables,
// first coefficient +1, second (if any) +1 or -1.
struct LinearInequality {
  std::vector<std::pair<std::string, int>> lhs;
  CmpOp sense;  // Le or Ge
  BigRat bound;

  std::string text() const;  // "x - y <= 0", "y >= 5"
  Expr to_formula() const;
  bool holds_on(const Valuation& v) const;
  Candidate to_candidate(const std::string& provenance) const;
};

// For every template expression in the family, emits e <= max(rows) and
// e >= min(rows). Order: single variables in declared order, then pairs
// (i < j) with the difference before the sum; upper bound before lower.
// Empty traces are an error.
std::vector<LinearInequality> infer_template_bounds(const TraceSet& traces,
                                                    IneqFamily family);

}  // namespace tropinv
