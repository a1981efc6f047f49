#pragma once
// Trace data model: valuations observed at a labeled location, monomial
// terms, exact evaluation, and the line-oriented trace file format.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tropinv/bigq.hpp"

namespace tropinv {

struct TraceError : std::runtime_error {
  explicit TraceError(const std::string& what) : std::runtime_error(what) {}
};

// One observation: variable name -> exact rational value.
struct Valuation {
  std::map<std::string, BigRat> entries;

  const BigRat& at(const std::string& var) const {
    auto it = entries.find(var);
    if (it == entries.end()) throw TraceError("unbound variable in valuation: " + var);
    return it->second;
  }
  bool binds(const std::string& var) const { return entries.count(var) != 0; }
};

// All observations collected at one location. Every row binds exactly the
// declared variable list; the declared order is authoritative.
struct TraceSet {
  std::string location;
  std::vector<std::string> variables;
  std::vector<Valuation> rows;
};

// A monomial: variable -> exponent. Empty map = the constant monomial 1.
struct Term {
  std::map<std::string, int> exponents;

  int total_degree() const {
    int d = 0;
    for (const auto& [_, e] : exponents) d += e;
    return d;
  }
  bool is_constant() const { return exponents.empty(); }
  bool operator==(const Term& o) const { return exponents == o.exponents; }
  // Renders "1", "x", "x^2*y" with variables in the given order.
  std::string text(const std::vector<std::string>& var_order) const;
};

// Graded-lexicographic comparison: first by total degree, then within a
// degree by exponent vector (higher power of an earlier variable first).
// Returns negative/zero/positive. `var_order` fixes the variable sequence.
int compare_terms_grlex(const Term& a, const Term& b, const std::vector<std::string>& var_order);

// Parses the trace file format:
//   line 1: `loc: <label>`        (or the one-line form `loc: L; vars: x,y`)
//   line 2: `vars: <v1>,<v2>,...`
//   lines 3+: comma-separated rational literals, one row per observation
//   `#`-prefixed lines are comments.
// Errors carry the offending line number.
TraceSet parse_traces(const std::string& text);

std::string serialize_traces(const TraceSet& ts);

// All monomials of total degree <= degree over vars, constant 1 included,
// in ascending graded-lex order. Throws TraceError if the count C(n+d, d)
// exceeds cap.
std::vector<Term> gen_terms(const std::vector<std::string>& vars, int degree, int cap);

// Product of v(var)^exponent; the constant term evaluates to 1.
BigRat eval_term(const Term& term, const Valuation& v);

}  // namespace tropinv
