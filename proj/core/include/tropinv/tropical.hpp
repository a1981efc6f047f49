#pragma once
// Max-plus / min-plus relation inference. Two fitting strategies:
//  - weak forms: coefficients fixed at 0/absent, one open additive parameter
//    d on the target, solved in one pass over the rows;
//  - general pair forms: full two-variable templates max(c0, u + c1) vs v
//    (and u/v swapped) with the Pareto frontier of tight (c0, c1) choices.
// Relations are stored as lhs >= rhs (or lhs = rhs after merging).

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tropinv/bigq.hpp"
#include "tropinv/candidate.hpp"
#include "tropinv/expr.hpp"
#include "tropinv/trace.hpp"

namespace tropinv {

enum class TropicalKind { Max, Min };
enum class RelSense { Ge, Eq };

// One side of a relation: an optional constant argument plus variable
// arguments with additive coefficients, folded with max or min.
struct TropicalSide {
  std::optional<BigRat> constant;
  std::vector<std::pair<std::string, BigRat>> args;

  int arity() const { return (constant ? 1 : 0) + static_cast<int>(args.size()); }
};

struct TropicalRelation {
  TropicalKind kind = TropicalKind::Max;
  RelSense sense = RelSense::Ge;
  TropicalSide lhs, rhs;

  // Canonical rendering. The constant of the max side is shifted to zero
  // ("max(0, x - 5) >= y - 5"); a min side with a single variable argument
  // shifts that coefficient to zero instead ("b + 10 >= min(11, y)").
  // Constant argument first, then variables in stored order.
  std::string text() const;
  Expr to_formula() const;  // same shift, so to_text(to_formula()) == text()
  Candidate to_candidate(const std::string& provenance) const;
};

// Folds one side at a valuation; nullopt means the side is empty (the fold
// identity: -inf for max, +inf for min).
std::optional<BigRat> eval_side(const TropicalSide& s, TropicalKind kind, const Valuation& v);

bool check_relation(const TropicalRelation& r, const Valuation& v);

// True iff the relation holds at every valuation (by argument domination).
bool is_tautology(const TropicalRelation& r);

// Weak forms. The side is a subset of {constant} + vars (the target itself
// may appear); the single parameter d sits on the target.
enum class WeakDirection { SideGeTarget, TargetGeSide };

struct WeakTemplate {
  TropicalKind kind = TropicalKind::Max;
  std::string target;
  bool with_constant = false;
  std::vector<std::string> side_vars;
  WeakDirection direction = WeakDirection::SideGeTarget;
};

struct WeakFit {
  WeakTemplate tmpl;
  BigRat d;
  TropicalRelation relation;
};

// All k * 2^(k+2) templates over k variables: every target, every subset of
// {constant} + vars (empty included), both directions.
std::vector<WeakTemplate> enumerate_weak_templates(const std::vector<std::string>& vars,
                                                   TropicalKind kind);

// Tightest d over the rows: min of (side - target) for SideGeTarget, max for
// TargetGeSide. Empty-side templates are vacuous -> nullopt. Empty traces are
// an error.
std::optional<WeakFit> fit_parameter(const WeakTemplate& t, const TraceSet& traces);

// General two-variable fitting for max(c0, u + c1) >= v, v >= min(c0, u + c1)
// and the u/v-swapped templates. Returns the Pareto-tight frontier with
// single-argument sides and relations already implied by the box/zone bounds
// of the same rows dropped; pairs whose reverse inequality also holds on all
// rows come back merged as equalities.
std::vector<TropicalRelation> fit_pair_general(const TraceSet& traces, const std::string& u,
                                               const std::string& v, TropicalKind kind);

// Drops relations implied by another kept relation via argument domination
// (e.g. max(x, y, 0) >= x is implied by max(y, 0) >= x). Earlier entries win
// ties; order is otherwise preserved.
std::vector<TropicalRelation> prune_redundant(const std::vector<TropicalRelation>& rels);

// The image of a relation under negating every program variable: kind flips,
// constants and coefficients negate, sides swap. Min-plus fitting on rows P
// equals the image of max-plus fitting on -P.
TropicalRelation negate_relation(const TropicalRelation& r);
TraceSet negate_traces(const TraceSet& traces);

struct TropicalOptions {
  bool weak_max = true;
  bool weak_min = true;
  bool general_max = true;
  bool general_min = true;
};

// Full tropical pass over a trace set: weak fitting on every pair and triple
// of variables (the variables themselves if fewer than two), general fitting
// on every pair, with vacuous/tautological/degenerate fits dropped, equal
// opposite-direction fits merged, duplicates removed, and the pool pruned.
std::vector<TropicalRelation> infer_tropical_relations(const TraceSet& traces,
                                                       const TropicalOptions& opts = {});

}  // namespace tropinv
