#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "tropinv/trace.hpp"

using namespace tropinv;

namespace {

// Independent binomial C(n+d, d) for the term-count law.
long long binom(long long n, long long k) {
  long long r = 1;
  for (long long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_SUITE("trace") {

TEST_CASE("parse accepts the two-line header, comments, and rationals") {
  TraceSet ts = parse_traces("# collected at L\nloc: L\nvars: x, y\n0,1\n2,3/2\n-4,-5\n");
  CHECK(ts.location == "L");
  CHECK(ts.variables == std::vector<std::string>{"x", "y"});
  REQUIRE(ts.rows.size() == 3);
  CHECK(ts.rows[1].at("y") == BigRat(3) / BigRat(2));
  CHECK(ts.rows[2].at("x") == BigRat(-4));
}

TEST_CASE("parse accepts the one-line header form") {
  TraceSet ts = parse_traces("loc: L; vars: x,y\n1,2\n");
  CHECK(ts.location == "L");
  CHECK(ts.variables.size() == 2);
  CHECK(ts.rows.size() == 1);
}

TEST_CASE("serialize emits the canonical layout and roundtrips") {
  TraceSet ts = testutil::make_traces({"x", "y"}, {{0, 1}});
  Valuation v;
  v.entries["x"] = BigRat(2);
  v.entries["y"] = BigRat(3) / BigRat(2);
  ts.rows.push_back(v);
  CHECK(serialize_traces(ts) == "loc: L\nvars: x,y\n0,1\n2,3/2\n");
  TraceSet back = parse_traces(serialize_traces(ts));
  CHECK(back.location == ts.location);
  CHECK(back.variables == ts.variables);
  REQUIRE(back.rows.size() == ts.rows.size());
  for (size_t i = 0; i < ts.rows.size(); ++i)
    for (const auto& var : ts.variables) CHECK(back.rows[i].at(var) == ts.rows[i].at(var));
}

TEST_CASE("parse errors carry the offending line number") {
  auto msg_of = [](const std::string& text) {
    try {
      parse_traces(text);
    } catch (const TraceError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(msg_of("loc L\nvars: x\n1\n").find("line 1") != std::string::npos);
  CHECK(msg_of("loc: L\nvars: x\n1,2\n").find("line 3") != std::string::npos);
  CHECK(msg_of("loc: L\nvars: x\nbogus\n").find("line 3") != std::string::npos);
}

TEST_CASE("valuation lookups fail loudly on unbound names") {
  TraceSet ts = testutil::make_traces({"x"}, {{7}});
  CHECK(ts.rows[0].at("x") == BigRat(7));
  CHECK(ts.rows[0].binds("x"));
  CHECK(!ts.rows[0].binds("q"));
  CHECK_THROWS_AS(ts.rows[0].at("q"), TraceError);
}

TEST_CASE("gen_terms emits ascending graded-lex order") {
  auto texts = [](const std::vector<Term>& terms, const std::vector<std::string>& vars) {
    std::vector<std::string> out;
    for (const auto& t : terms) out.push_back(t.text(vars));
    return out;
  };
  CHECK(texts(gen_terms({"x", "y"}, 2, 100), {"x", "y"}) ==
        std::vector<std::string>{"1", "x", "y", "x^2", "x*y", "y^2"});
  CHECK(texts(gen_terms({"a"}, 3, 100), {"a"}) ==
        std::vector<std::string>{"1", "a", "a^2", "a^3"});
  CHECK(texts(gen_terms({"x", "y", "z"}, 1, 100), {"x", "y", "z"}) ==
        std::vector<std::string>{"1", "x", "y", "z"});
}

TEST_CASE("gen_terms counts follow C(n+d, d) and entries are unique") {
  std::vector<std::string> pool = {"a", "b", "c", "d", "e"};
  for (int n = 1; n <= 5; ++n) {
    std::vector<std::string> vars(pool.begin(), pool.begin() + n);
    for (int d = 1; d <= 5; ++d) {
      auto terms = gen_terms(vars, d, 100000);
      CHECK(static_cast<long long>(terms.size()) == binom(n + d, d));
      std::set<std::string> seen;
      for (const auto& t : terms) {
        CHECK(t.total_degree() <= d);
        seen.insert(t.text(vars));
      }
      CHECK(seen.size() == terms.size());
      for (size_t i = 0; i + 1 < terms.size(); ++i)
        CHECK(compare_terms_grlex(terms[i], terms[i + 1], vars) < 0);
    }
  }
}

TEST_CASE("gen_terms honors the term cap") {
  // 4 variables, degree 5: C(9,4) = 126, inside a 200-term cap.
  CHECK(gen_terms({"a", "s", "t", "x"}, 5, 200).size() == 126);
  CHECK_THROWS_AS(gen_terms({"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"}, 4, 100),
                  TraceError);
}

TEST_CASE("eval_term multiplies exact powers") {
  Valuation v;
  v.entries["x"] = BigRat(3);
  v.entries["y"] = BigRat(2);
  CHECK(eval_term(testutil::mono({{"x", 2}, {"y", 1}}), v) == BigRat(18));
  CHECK(eval_term(testutil::mono({}), v) == BigRat(1));
  v.entries["x"] = BigRat(1) / BigRat(2);
  CHECK(eval_term(testutil::mono({{"x", 2}}), v) == BigRat(1) / BigRat(4));
}

TEST_CASE("grlex comparison ranks by total degree first") {
  std::vector<std::string> vars = {"x", "y"};
  Term x = testutil::mono({{"x", 1}});
  Term y2 = testutil::mono({{"y", 2}});
  CHECK(compare_terms_grlex(x, y2, vars) < 0);
  CHECK(compare_terms_grlex(y2, x, vars) > 0);
  CHECK(compare_terms_grlex(x, x, vars) == 0);
}

}  // TEST_SUITE
