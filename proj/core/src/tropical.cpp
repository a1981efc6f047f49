#include "tropinv/tropical.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace tropinv {

namespace {

using OptRat = std::optional<BigRat>;

OptRat side_coeff(const TropicalSide& s, const std::string& var) {
  for (const auto& [v, c] : s.args)
    if (v == var) return c;
  return std::nullopt;
}

// fold(a) >= fold(b) at every valuation, decided structurally: under max,
// every argument of b must be matched in a with a coefficient at least as
// large; under min, every argument of a must be matched in b with one at
// most as large.
bool dominates(TropicalKind k, const TropicalSide& a, const TropicalSide& b) {
  if (k == TropicalKind::Max) {
    if (b.constant && !(a.constant && *a.constant >= *b.constant)) return false;
    for (const auto& [v, c] : b.args) {
      OptRat ca = side_coeff(a, v);
      if (!ca || *ca < c) return false;
    }
    return true;
  }
  if (a.constant && !(b.constant && *b.constant <= *a.constant)) return false;
  for (const auto& [v, c] : a.args) {
    OptRat cb = side_coeff(b, v);
    if (!cb || *cb > c) return false;
  }
  return true;
}

// Constant shift applied to both sides before rendering: a max side drops
// its constant to zero; a min side zeroes its single variable coefficient
// (falling back to the constant when there is no lone variable argument).
BigRat canonical_shift(const TropicalRelation& r) {
  const TropicalSide* trop = nullptr;
  if (r.lhs.arity() >= 2) trop = &r.lhs;
  else if (r.rhs.arity() >= 2) trop = &r.rhs;
  if (!trop) return 0;
  if (r.kind == TropicalKind::Max) return trop->constant ? BigRat(-*trop->constant) : BigRat(0);
  if (trop->args.size() == 1) return -trop->args[0].second;
  return trop->constant ? BigRat(-*trop->constant) : BigRat(0);
}

Expr side_expr(const TropicalSide& s, TropicalKind kind, const BigRat& shift) {
  std::vector<Expr> items;
  if (s.constant) items.push_back(Expr::constant(*s.constant + shift));
  for (const auto& [v, c] : s.args) {
    Expr x = Expr::var(v);
    BigRat cc = c + shift;
    items.push_back(cc == 0 ? x : Expr::add(x, Expr::constant(cc)));
  }
  if (items.empty()) throw std::logic_error("empty tropical side");
  if (items.size() == 1) return items[0];
  return kind == TropicalKind::Max ? Expr::maxf(items) : Expr::minf(items);
}

}  // namespace

std::optional<BigRat> eval_side(const TropicalSide& s, TropicalKind kind, const Valuation& v) {
  OptRat acc;
  auto mix = [&](BigRat x) {
    if (!acc) {
      acc = std::move(x);
    } else if (kind == TropicalKind::Max) {
      if (x > *acc) acc = std::move(x);
    } else if (x < *acc) {
      acc = std::move(x);
    }
  };
  if (s.constant) mix(*s.constant);
  for (const auto& [var, c] : s.args) mix(v.at(var) + c);
  return acc;
}

bool check_relation(const TropicalRelation& r, const Valuation& v) {
  OptRat l = eval_side(r.lhs, r.kind, v);
  OptRat rr = eval_side(r.rhs, r.kind, v);
  if (r.sense == RelSense::Eq) return l == rr;
  if (!l || !rr) {
    // An empty side is the fold identity: -inf under max, +inf under min.
    if (!l && r.kind == TropicalKind::Min) return true;
    if (!rr && r.kind == TropicalKind::Max) return true;
    return false;
  }
  return *l >= *rr;
}

bool is_tautology(const TropicalRelation& r) {
  if (r.sense == RelSense::Eq)
    return dominates(r.kind, r.lhs, r.rhs) && dominates(r.kind, r.rhs, r.lhs);
  return dominates(r.kind, r.lhs, r.rhs);
}

Expr TropicalRelation::to_formula() const {
  BigRat shift = canonical_shift(*this);
  Expr l = side_expr(lhs, kind, shift);
  Expr r = side_expr(rhs, kind, shift);
  return Expr::cmp(sense == RelSense::Eq ? CmpOp::Eq : CmpOp::Ge, l, r);
}

std::string TropicalRelation::text() const { return to_text(to_formula()); }

Candidate TropicalRelation::to_candidate(const std::string& provenance) const {
  return Candidate{text(), to_formula(), provenance};
}

std::vector<WeakTemplate> enumerate_weak_templates(const std::vector<std::string>& vars,
                                                   TropicalKind kind) {
  const size_t k = vars.size();
  if (k > 16) throw TraceError("weak template enumeration over too many variables");
  std::vector<WeakTemplate> out;
  out.reserve(k << (k + 2));
  for (size_t ti = 0; ti < k; ++ti) {
    for (unsigned mask = 0; mask < (1u << (k + 1)); ++mask) {
      WeakTemplate t;
      t.kind = kind;
      t.target = vars[ti];
      t.with_constant = (mask & 1u) != 0;
      for (size_t i = 0; i < k; ++i)
        if (mask & (1u << (i + 1))) t.side_vars.push_back(vars[i]);
      for (WeakDirection dir : {WeakDirection::SideGeTarget, WeakDirection::TargetGeSide}) {
        t.direction = dir;
        out.push_back(t);
      }
    }
  }
  return out;
}

std::optional<WeakFit> fit_parameter(const WeakTemplate& t, const TraceSet& traces) {
  if (traces.rows.empty()) throw TraceError("no trace rows to fit");
  auto have = [&](const std::string& v) {
    return std::find(traces.variables.begin(), traces.variables.end(), v) !=
           traces.variables.end();
  };
  if (!have(t.target)) throw TraceError("unknown target variable: " + t.target);
  for (const auto& v : t.side_vars)
    if (!have(v)) throw TraceError("unknown side variable: " + v);
  if (!t.with_constant && t.side_vars.empty()) return std::nullopt;  // vacuous

  TropicalSide side;
  if (t.with_constant) side.constant = BigRat(0);
  for (const auto& v : t.side_vars) side.args.emplace_back(v, BigRat(0));

  OptRat d;
  for (const auto& row : traces.rows) {
    BigRat gap = *eval_side(side, t.kind, row) - row.at(t.target);
    if (!d) {
      d = std::move(gap);
    } else if (t.direction == WeakDirection::SideGeTarget) {
      if (gap < *d) d = std::move(gap);
    } else if (gap > *d) {
      d = std::move(gap);
    }
  }

  TropicalSide target_side;
  target_side.args.emplace_back(t.target, *d);
  TropicalRelation rel;
  rel.kind = t.kind;
  rel.sense = RelSense::Ge;
  if (t.direction == WeakDirection::SideGeTarget) {
    rel.lhs = side;
    rel.rhs = target_side;
  } else {
    rel.lhs = target_side;
    rel.rhs = side;
  }
  return WeakFit{t, *d, rel};
}

std::vector<TropicalRelation> fit_pair_general(const TraceSet& traces, const std::string& u,
                                               const std::string& v, TropicalKind kind) {
  if (traces.rows.empty()) throw TraceError("no trace rows to fit");
  const bool mx = kind == TropicalKind::Max;
  std::vector<TropicalRelation> out;

  for (auto [base, target] : {std::pair{u, v}, std::pair{v, u}}) {
    std::vector<std::pair<BigRat, BigRat>> bt;
    bt.reserve(traces.rows.size());
    for (const auto& row : traces.rows) bt.emplace_back(row.at(base), row.at(target));

    std::vector<BigRat> diffs;
    for (const auto& [b, t] : bt) diffs.push_back(t - b);
    std::sort(diffs.begin(), diffs.end());
    diffs.erase(std::unique(diffs.begin(), diffs.end()), diffs.end());

    // Extremes of the box/zone bounds these rows already pin down.
    BigRat ext_t = bt[0].second, ext_d = diffs[0];
    for (const auto& [b, t] : bt)
      if (mx ? t > ext_t : t < ext_t) ext_t = t;
    if (mx) ext_d = diffs.back();

    // One tight c0 per candidate c1 (rows c1 fails to cover pin c0), plus the
    // c1-absent candidate. Absent means the argument is dropped entirely.
    std::vector<std::pair<OptRat, OptRat>> cands;
    for (const BigRat& c1 : diffs) {
      OptRat c0;
      for (const auto& [b, t] : bt) {
        bool covered = mx ? t - b <= c1 : t - b >= c1;
        if (covered) continue;
        if (!c0 || (mx ? t > *c0 : t < *c0)) c0 = t;
      }
      cands.emplace_back(c0, c1);
    }
    cands.emplace_back(ext_t, std::nullopt);

    // Pareto frontier: under max keep the minimal pairs (absent = -inf),
    // under min keep the maximal ones (absent = +inf).
    auto as_good = [&](const OptRat& a, const OptRat& b) {
      if (!a) return true;
      if (!b) return false;
      return mx ? *a <= *b : *a >= *b;
    };
    for (size_t i = 0; i < cands.size(); ++i) {
      bool dominated = false;
      for (size_t j = 0; j < cands.size() && !dominated; ++j)
        if (j != i && as_good(cands[j].first, cands[i].first) &&
            as_good(cands[j].second, cands[i].second))
          dominated = true;
      if (dominated) continue;

      const auto& [c0, c1] = cands[i];
      if (!c0 || !c1) continue;  // single argument: a plain box/zone bound

      TropicalSide side;
      side.constant = *c0;
      side.args.emplace_back(base, *c1);
      TropicalSide tgt;
      tgt.args.emplace_back(target, BigRat(0));

      bool eq = true;
      for (const auto& [b, t] : bt) {
        bool rev = mx ? (t >= *c0 && t >= b + *c1) : (*c0 >= t && b + *c1 >= t);
        if (!rev) {
          eq = false;
          break;
        }
      }
      TropicalRelation r;
      r.kind = kind;
      if (eq) {
        // The reverse inequality also holds on every row: merge to equality.
        r.sense = RelSense::Eq;
        r.lhs = side;
        r.rhs = tgt;
        out.push_back(r);
        continue;
      }
      // Already implied by the box/zone bounds of the same rows.
      if (mx ? (*c0 >= ext_t || *c1 >= ext_d) : (*c0 <= ext_t || *c1 <= ext_d)) continue;
      r.sense = RelSense::Ge;
      if (mx) {
        r.lhs = side;
        r.rhs = tgt;
      } else {
        r.lhs = tgt;
        r.rhs = side;
      }
      out.push_back(r);
    }
  }
  return out;
}

namespace {

// a entails b, by argument domination on the matching sides.
bool implies_rel(const TropicalRelation& a, const TropicalRelation& b) {
  if (a.kind != b.kind) return false;
  auto ge_impl = [&](const TropicalSide& la, const TropicalSide& ra, const TropicalSide& lb,
                     const TropicalSide& rb) {
    return dominates(a.kind, lb, la) && dominates(a.kind, ra, rb);
  };
  const bool aeq = a.sense == RelSense::Eq, beq = b.sense == RelSense::Eq;
  if (!aeq && !beq) return ge_impl(a.lhs, a.rhs, b.lhs, b.rhs);
  if (aeq && !beq)
    return ge_impl(a.lhs, a.rhs, b.lhs, b.rhs) || ge_impl(a.rhs, a.lhs, b.lhs, b.rhs);
  if (aeq && beq)
    return ge_impl(a.lhs, a.rhs, b.lhs, b.rhs) && ge_impl(a.rhs, a.lhs, b.rhs, b.lhs);
  return false;
}

}  // namespace

std::vector<TropicalRelation> prune_redundant(const std::vector<TropicalRelation>& rels) {
  std::vector<bool> removed(rels.size(), false);
  for (size_t i = 0; i < rels.size(); ++i) {
    for (size_t j = 0; j < rels.size(); ++j) {
      if (i == j || removed[j]) continue;
      if (!implies_rel(rels[j], rels[i])) continue;
      if (implies_rel(rels[i], rels[j]) && i < j) continue;  // mutual: earlier wins
      removed[i] = true;
      break;
    }
  }
  std::vector<TropicalRelation> out;
  for (size_t i = 0; i < rels.size(); ++i)
    if (!removed[i]) out.push_back(rels[i]);
  return out;
}

namespace {

TropicalSide negate_side(const TropicalSide& s) {
  TropicalSide o;
  if (s.constant) o.constant = -*s.constant;
  for (const auto& [v, c] : s.args) o.args.emplace_back(v, -c);
  return o;
}

}  // namespace

TropicalRelation negate_relation(const TropicalRelation& r) {
  TropicalRelation o;
  o.kind = r.kind == TropicalKind::Max ? TropicalKind::Min : TropicalKind::Max;
  o.sense = r.sense;
  if (r.sense == RelSense::Eq) {
    o.lhs = negate_side(r.lhs);
    o.rhs = negate_side(r.rhs);
  } else {
    o.lhs = negate_side(r.rhs);
    o.rhs = negate_side(r.lhs);
  }
  return o;
}

TraceSet negate_traces(const TraceSet& traces) {
  TraceSet o{traces.location, traces.variables, {}};
  o.rows.reserve(traces.rows.size());
  for (const auto& row : traces.rows) {
    Valuation v;
    for (const auto& [name, x] : row.entries) v.entries[name] = -x;
    o.rows.push_back(std::move(v));
  }
  return o;
}

std::vector<TropicalRelation> infer_tropical_relations(const TraceSet& traces,
                                                       const TropicalOptions& opts) {
  std::vector<TropicalRelation> pool;
  std::set<std::string> seen;
  auto add = [&](const TropicalRelation& r) {
    if (seen.insert(r.text()).second) pool.push_back(r);
  };

  const auto& vars = traces.variables;
  std::vector<std::vector<std::string>> weak_subsets;
  std::vector<std::pair<std::string, std::string>> pairs;
  if (vars.size() == 1) {
    weak_subsets.push_back(vars);
  } else {
    for (size_t i = 0; i < vars.size(); ++i)
      for (size_t j = i + 1; j < vars.size(); ++j) {
        weak_subsets.push_back({vars[i], vars[j]});
        pairs.emplace_back(vars[i], vars[j]);
      }
    for (size_t i = 0; i < vars.size(); ++i)
      for (size_t j = i + 1; j < vars.size(); ++j)
        for (size_t k = j + 1; k < vars.size(); ++k)
          weak_subsets.push_back({vars[i], vars[j], vars[k]});
  }

  for (TropicalKind kind : {TropicalKind::Max, TropicalKind::Min}) {
    const bool mx = kind == TropicalKind::Max;
    if (mx ? opts.weak_max : opts.weak_min) {
      for (const auto& subset : weak_subsets) {
        auto templates = enumerate_weak_templates(subset, kind);
        // Directions are adjacent in enumeration order: fit both, merge to an
        // equality when the tight parameters coincide.
        for (size_t i = 0; i + 1 < templates.size(); i += 2) {
          auto ge = fit_parameter(templates[i], traces);
          auto le = fit_parameter(templates[i + 1], traces);
          if (!ge || !le) continue;  // vacuous empty side
          // A one-argument side is just a box/zone bound in disguise.
          if (ge->relation.lhs.arity() < 2 && ge->relation.rhs.arity() < 2) continue;
          if (ge->d == le->d) {
            TropicalRelation eq = ge->relation;
            eq.sense = RelSense::Eq;
            if (!is_tautology(eq)) add(eq);
          } else {
            if (!is_tautology(ge->relation)) add(ge->relation);
            if (!is_tautology(le->relation)) add(le->relation);
          }
        }
      }
    }
    if (mx ? opts.general_max : opts.general_min) {
      for (const auto& [u, v] : pairs)
        for (const auto& r : fit_pair_general(traces, u, v, kind)) add(r);
    }
  }
  return prune_redundant(pool);
}

}  // namespace tropinv
