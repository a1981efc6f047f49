#include "tropinv/trace.hpp"

#include <algorithm>
#include <sstream>

namespace tropinv {

std::string Term::text(const std::vector<std::string>& var_order) const {
  if (exponents.empty()) return "1";
  std::string s;
  for (const auto& v : var_order) {
    auto it = exponents.find(v);
    if (it == exponents.end()) continue;
    if (!s.empty()) s += "*";
    s += v;
    if (it->second > 1) s += "^" + std::to_string(it->second);
  }
  return s;
}

int compare_terms_grlex(const Term& a, const Term& b,
                        const std::vector<std::string>& var_order) {
  int da = a.total_degree(), db = b.total_degree();
  if (da != db) return da < db ? -1 : 1;
  for (const auto& v : var_order) {
    auto ia = a.exponents.find(v);
    auto ib = b.exponents.find(v);
    int ea = ia == a.exponents.end() ? 0 : ia->second;
    int eb = ib == b.exponents.end() ? 0 : ib->second;
    if (ea != eb) return ea > eb ? -1 : 1;  // more of an earlier variable sorts first
  }
  return 0;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

[[noreturn]] void fail_line(int line, const std::string& msg) {
  throw TraceError("trace line " + std::to_string(line) + ": " + msg);
}

}  // namespace

TraceSet parse_traces(const std::string& text) {
  TraceSet ts;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  bool have_loc = false, have_vars = false;

  auto handle_vars = [&](const std::string& body, int line) {
    for (auto& name : split(body, ',')) {
      std::string v = trim(name);
      if (!valid_identifier(v)) fail_line(line, "bad variable name '" + v + "'");
      if (std::find(ts.variables.begin(), ts.variables.end(), v) != ts.variables.end())
        fail_line(line, "duplicate variable '" + v + "'");
      ts.variables.push_back(v);
    }
    have_vars = true;
  };

  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (!have_loc) {
      if (line.rfind("loc:", 0) != 0) fail_line(lineno, "expected 'loc: <label>' header");
      std::string rest = trim(line.substr(4));
      // accept the one-line form "loc: L; vars: x,y"
      auto semi = rest.find(';');
      std::string label = trim(semi == std::string::npos ? rest : rest.substr(0, semi));
      if (!valid_identifier(label)) fail_line(lineno, "bad location label '" + label + "'");
      ts.location = label;
      have_loc = true;
      if (semi != std::string::npos) {
        std::string tail = trim(rest.substr(semi + 1));
        if (tail.rfind("vars:", 0) != 0) fail_line(lineno, "expected 'vars:' after ';'");
        handle_vars(tail.substr(5), lineno);
      }
      continue;
    }
    if (!have_vars) {
      if (line.rfind("vars:", 0) != 0) fail_line(lineno, "expected 'vars: <v1>,...' header");
      handle_vars(line.substr(5), lineno);
      continue;
    }
    auto cells = split(line, ',');
    if (cells.size() != ts.variables.size())
      fail_line(lineno, "row has " + std::to_string(cells.size()) + " values, expected " +
                            std::to_string(ts.variables.size()));
    Valuation v;
    for (size_t i = 0; i < cells.size(); ++i) {
      auto q = parse_rat(trim(cells[i]));
      if (!q) fail_line(lineno, "unparsable rational literal '" + trim(cells[i]) + "'");
      v.entries[ts.variables[i]] = *q;
    }
    ts.rows.push_back(std::move(v));
  }
  if (!have_loc) throw TraceError("trace file missing 'loc:' header");
  if (!have_vars) throw TraceError("trace file missing 'vars:' header");
  return ts;
}

std::string serialize_traces(const TraceSet& ts) {
  std::string out = "loc: " + ts.location + "\nvars: ";
  for (size_t i = 0; i < ts.variables.size(); ++i) {
    if (i) out += ",";
    out += ts.variables[i];
  }
  out += "\n";
  for (const auto& row : ts.rows) {
    for (size_t i = 0; i < ts.variables.size(); ++i) {
      if (i) out += ",";
      out += to_string(row.at(ts.variables[i]));
    }
    out += "\n";
  }
  return out;
}

namespace {

// Counts C(n+d, d) without overflow concerns.
BigInt count_terms(size_t n, int d) {
  BigInt num = 1, den = 1;
  for (int i = 1; i <= d; ++i) {
    num *= BigInt(n + static_cast<size_t>(i));
    den *= i;
  }
  return num / den;
}

void gen_rec(const std::vector<std::string>& vars, size_t idx, int remaining, Term& cur,
             std::vector<Term>& out) {
  if (idx == vars.size()) {
    out.push_back(cur);
    return;
  }
  // Emit the higher powers of the earlier variable first so that within each
  // degree the output is already in graded-lex order after a stable sort.
  for (int e = remaining; e >= 0; --e) {
    if (e > 0) cur.exponents[vars[idx]] = e;
    gen_rec(vars, idx + 1, remaining - e, cur, out);
    if (e > 0) cur.exponents.erase(vars[idx]);
  }
}

}  // namespace

std::vector<Term> gen_terms(const std::vector<std::string>& vars, int degree, int cap) {
  if (degree < 1) throw TraceError("gen_terms: degree must be >= 1");
  if (cap < 1) throw TraceError("gen_terms: cap must be >= 1");
  BigInt count = count_terms(vars.size(), degree);
  if (count > cap)
    throw TraceError("gen_terms: " + count.str() + " terms exceed cap " + std::to_string(cap));
  std::vector<Term> out;
  Term cur;
  gen_rec(vars, 0, degree, cur, out);
  std::stable_sort(out.begin(), out.end(), [&](const Term& a, const Term& b) {
    return compare_terms_grlex(a, b, vars) < 0;
  });
  return out;
}

BigRat eval_term(const Term& term, const Valuation& v) {
  BigRat prod = 1;
  for (const auto& [var, exp] : term.exponents) {
    const BigRat& val = v.at(var);
    for (int i = 0; i < exp; ++i) prod *= val;
  }
  return prod;
}

}  // namespace tropinv
