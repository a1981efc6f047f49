#include "tropinv/infer_ineq.hpp"

#include <stdexcept>

namespace tropinv {

namespace {

BigRat eval_lhs(const std::vector<std::pair<std::string, int>>& lhs, const Valuation& v) {
  BigRat sum = 0;
  for (const auto& [var, c] : lhs) sum += BigRat(c) * v.at(var);
  return sum;
}

std::string lhs_text(const std::vector<std::pair<std::string, int>>& lhs) {
  std::string s;
  for (const auto& [var, c] : lhs) {
    if (s.empty()) {
      s = (c < 0 ? "-" : "") + var;
    } else {
      s += (c < 0 ? " - " : " + ") + var;
    }
  }
  return s;
}

}  // namespace

std::string LinearInequality::text() const {
  const char* op = sense == CmpOp::Le ? " <= " : " >= ";
  return lhs_text(lhs) + op + tropinv::to_string(bound);
}

Expr LinearInequality::to_formula() const {
  Expr e;
  for (const auto& [var, c] : lhs) {
    Expr x = Expr::var(var);
    if (!e.valid()) {
      e = c < 0 ? Expr::neg(x) : x;
    } else {
      e = c < 0 ? Expr::sub(e, x) : Expr::add(e, x);
    }
  }
  return Expr::cmp(sense, e, Expr::constant(bound));
}

bool LinearInequality::holds_on(const Valuation& v) const {
  BigRat val = eval_lhs(lhs, v);
  return sense == CmpOp::Le ? val <= bound : val >= bound;
}

Candidate LinearInequality::to_candidate(const std::string& provenance) const {
  return Candidate{text(), to_formula(), provenance};
}

std::vector<LinearInequality> infer_template_bounds(const TraceSet& traces,
                                                    IneqFamily family) {
  if (traces.rows.empty()) throw TraceError("no trace rows to infer from");
  using Lhs = std::vector<std::pair<std::string, int>>;
  std::vector<Lhs> templates;
  const auto& vars = traces.variables;
  for (const auto& v : vars) templates.push_back({{v, 1}});
  if (family != IneqFamily::Box) {
    for (size_t i = 0; i < vars.size(); ++i) {
      for (size_t j = i + 1; j < vars.size(); ++j) {
        templates.push_back({{vars[i], 1}, {vars[j], -1}});
        if (family == IneqFamily::Octagon) templates.push_back({{vars[i], 1}, {vars[j], 1}});
      }
    }
  }

  std::vector<LinearInequality> out;
  for (const auto& t : templates) {
    BigRat lo = eval_lhs(t, traces.rows.front());
    BigRat hi = lo;
    for (const auto& row : traces.rows) {
      BigRat v = eval_lhs(t, row);
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
    out.push_back(LinearInequality{t, CmpOp::Le, hi});
    out.push_back(LinearInequality{t, CmpOp::Ge, lo});
  }
  return out;
}

}  // namespace tropinv
