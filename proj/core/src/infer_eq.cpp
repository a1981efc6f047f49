#include "tropinv/infer_eq.hpp"

#include <algorithm>
#include <stdexcept>

namespace tropinv {

namespace {

// Echelon form of the row space, maintained incrementally. Rows are kept
// pivot-normalized (pivot entry 1) and sorted by pivot column.
struct Echelon {
  std::vector<std::vector<BigRat>> rows;
  std::vector<size_t> pivots;

  // Reduces `vec` against the rows and inserts it if independent.
  // Returns true if the rank grew.
  bool absorb(std::vector<BigRat> vec) {
    for (size_t i = 0; i < rows.size(); ++i) {
      BigRat f = vec[pivots[i]];
      if (f == 0) continue;
      for (size_t j = pivots[i]; j < vec.size(); ++j) vec[j] -= f * rows[i][j];
    }
    size_t p = 0;
    while (p < vec.size() && vec[p] == 0) ++p;
    if (p == vec.size()) return false;
    BigRat inv = vec[p];
    for (size_t j = p; j < vec.size(); ++j) vec[j] /= inv;
    size_t at = 0;
    while (at < pivots.size() && pivots[at] < p) ++at;
    rows.insert(rows.begin() + static_cast<long>(at), std::move(vec));
    pivots.insert(pivots.begin() + static_cast<long>(at), p);
    return true;
  }

  // Eliminates above-pivot entries, yielding the unique RREF of the row space.
  void reduce_fully() {
    for (size_t i = 0; i < rows.size(); ++i) {
      for (size_t j = 0; j < rows.size(); ++j) {
        if (j == i) continue;
        BigRat f = rows[j][pivots[i]];
        if (f == 0) continue;
        for (size_t k = pivots[i]; k < rows[j].size(); ++k)
          rows[j][k] -= f * rows[i][k];
      }
    }
  }
};

PolyEquality make_equality(const std::vector<Term>& terms,
                           const std::vector<BigRat>& vec,
                           const std::vector<std::string>& var_order) {
  // Clear denominators, then divide by the gcd of the numerators.
  BigInt den = 1;
  for (const auto& c : vec)
    if (c != 0) den = lcm(den, denom(c));
  std::vector<std::pair<Term, BigInt>> coeffs;
  BigInt g = 0;
  for (size_t i = 0; i < vec.size(); ++i) {
    if (vec[i] == 0) continue;
    BigInt n = numer(vec[i] * BigRat(den));
    coeffs.emplace_back(terms[i], n);
    g = gcd(g, n);
  }
  if (g == 0) throw std::logic_error("zero nullspace vector");
  // Terms arrive in ascending graded-lex order; the greatest term is last.
  BigInt lead = coeffs.back().second;
  BigInt scale = lead > 0 ? g : -g;
  for (auto& [t, c] : coeffs) c /= scale;
  std::reverse(coeffs.begin(), coeffs.end());
  return PolyEquality{std::move(coeffs), var_order};
}

Expr term_expr(const Term& t, const std::vector<std::string>& var_order) {
  Expr e;
  for (const auto& v : var_order) {
    auto it = t.exponents.find(v);
    if (it == t.exponents.end()) continue;
    for (int k = 0; k < it->second; ++k) {
      Expr x = Expr::var(v);
      e = e.valid() ? Expr::mul(e, x) : x;
    }
  }
  return e;  // empty for the constant term
}

}  // namespace

std::string PolyEquality::text() const {
  std::string lhs;
  BigInt rhs = 0;
  for (const auto& [t, c] : coeffs) {
    if (t.exponents.empty()) {
      rhs = -c;
      continue;
    }
    std::string mag = abs_text(c);
    std::string body = (mag == "1") ? t.text(var_order) : mag + "*" + t.text(var_order);
    if (lhs.empty()) {
      lhs = (c < 0 ? "-" : "") + body;
    } else {
      lhs += (c < 0 ? " - " : " + ") + body;
    }
  }
  if (lhs.empty()) throw std::logic_error("constant-only equality");
  return lhs + " = " + rhs.str();
}

Expr PolyEquality::to_formula() const {
  Expr lhs;
  BigInt rhs = 0;
  for (const auto& [t, c] : coeffs) {
    if (t.exponents.empty()) {
      rhs = -c;
      continue;
    }
    BigInt mag = c < 0 ? BigInt(-c) : c;
    Expr body = term_expr(t, var_order);
    if (mag != 1) body = Expr::mul(Expr::constant(BigRat(mag)), body);
    if (!lhs.valid()) {
      lhs = c < 0 ? Expr::neg(body) : body;
    } else {
      lhs = c < 0 ? Expr::sub(lhs, body) : Expr::add(lhs, body);
    }
  }
  return Expr::cmp(CmpOp::Eq, lhs, Expr::constant(BigRat(rhs)));
}

bool PolyEquality::holds_on(const Valuation& v) const {
  BigRat sum = 0;
  for (const auto& [t, c] : coeffs) sum += BigRat(c) * eval_term(t, v);
  return sum == 0;
}

Candidate PolyEquality::to_candidate() const {
  return Candidate{text(), to_formula(), "eq"};
}

std::vector<PolyEquality> infer_equalities(const TraceSet& traces, int degree,
                                           int term_cap) {
  if (traces.rows.empty()) throw TraceError("no trace rows to infer from");
  std::vector<Term> terms = gen_terms(traces.variables, degree, term_cap);
  const size_t m = terms.size();

  Echelon ech;
  for (const auto& row : traces.rows) {
    std::vector<BigRat> vec(m);
    for (size_t i = 0; i < m; ++i) vec[i] = eval_term(terms[i], row);
    ech.absorb(std::move(vec));
    if (ech.rows.size() == m) return {};  // full rank, trivial nullspace
  }
  ech.reduce_fully();

  // One basis vector per free column: unit there, minus the RREF column at
  // the pivots. Free columns ascending gives a canonical ordering.
  std::vector<PolyEquality> out;
  std::vector<bool> is_pivot(m, false);
  for (size_t p : ech.pivots) is_pivot[p] = true;
  for (size_t f = 0; f < m; ++f) {
    if (is_pivot[f]) continue;
    std::vector<BigRat> vec(m);
    vec[f] = 1;
    for (size_t i = 0; i < ech.rows.size(); ++i) vec[ech.pivots[i]] = -ech.rows[i][f];
    out.push_back(make_equality(terms, vec, traces.variables));
  }
  return out;
}

}  // namespace tropinv
