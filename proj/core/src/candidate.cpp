#include "tropinv/candidate.hpp"

#include <stdexcept>

namespace tropinv {

bool holds_on(const Candidate& c, const Valuation& v) {
  Env env = [&](const VarRef& r) -> std::optional<BigRat> {
    auto it = v.entries.find(r.name);
    if (it == v.entries.end()) return std::nullopt;
    return it->second;
  };
  return eval_bool(c.formula, env);
}

std::vector<Candidate> filter_candidates(const std::vector<Candidate>& cands,
                                         const TraceSet& traces) {
  std::vector<Candidate> kept;
  for (const auto& c : cands) {
    bool ok = true;
    for (const auto& row : traces.rows) {
      if (!holds_on(c, row)) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(c);
  }
  return kept;
}

Candidate parse_candidate(const std::string& text, const std::string& provenance) {
  Expr f = parse_formula_text(text);
  return Candidate{text, f, provenance};
}

}  // namespace tropinv
