#include <doctest.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "tropinv/infer_eq.hpp"
#include "tropinv/minilang.hpp"

using namespace tropinv;
using testutil::mono;
using testutil::poly;
using testutil::poly_of;
using testutil::reduces_to_zero;

namespace {

std::vector<std::string> texts_of(const std::vector<PolyEquality>& basis) {
  std::vector<std::string> out;
  for (const auto& e : basis) out.push_back(e.text());
  return out;
}

TraceSet collect(const std::string& corpus_file, int runs, unsigned long long seed, long long lo,
                 long long hi) {
  Program p = parse_program(testutil::corpus(corpus_file));
  TraceSet acc;
  for (const auto& in : gen_random_inputs(p, runs, seed, lo, hi)) {
    TraceSet t = run_traced(p, in, "L");
    if (acc.variables.empty()) {
      acc.location = t.location;
      acc.variables = t.variables;
    }
    for (auto& r : t.rows) acc.rows.push_back(std::move(r));
  }
  return acc;
}

}  // namespace

TEST_SUITE("infer_eq") {

TEST_CASE("two points pin the line through them") {
  TraceSet ts = testutil::make_traces({"x", "y"}, {{0, 0}, {1, 1}});
  auto basis = infer_equalities(ts, 1);
  REQUIRE(basis.size() == 1);
  CHECK(basis[0].text() == "y - x = 0");
  CHECK(basis[0].holds_on(ts.rows[0]));
  CHECK(basis[0].holds_on(ts.rows[1]));
}

TEST_CASE("a planted linear relation is recovered with canonical text") {
  // z = 3x - 2y + 7 over scattered points.
  std::vector<std::vector<long long>> rows;
  for (auto [x, y] : {std::pair{0LL, 0LL}, {1LL, 5LL}, {-3LL, 2LL}, {8LL, -1LL}, {2LL, 2LL},
                      {5LL, 9LL}})
    rows.push_back({x, y, 3 * x - 2 * y + 7});
  TraceSet ts = testutil::make_traces({"x", "y", "z"}, rows);
  CHECK(texts_of(infer_equalities(ts, 1)) == std::vector<std::string>{"z + 2*y - 3*x = 7"});
}

TEST_CASE("coefficients are scaled to coprime integers") {
  // y = x/2 forces a denominator that must clear to 2y - x = 0.
  TraceSet ts;
  ts.location = "L";
  ts.variables = {"x", "y"};
  for (long long x : {1, 3, -5, 7, 0}) {
    Valuation v;
    v.entries["x"] = BigRat(x);
    v.entries["y"] = BigRat(x) / BigRat(2);
    ts.rows.push_back(v);
  }
  CHECK(texts_of(infer_equalities(ts, 1)) == std::vector<std::string>{"2*y - x = 0"});
}

TEST_CASE("a degree-2 curve is recovered exactly") {
  // y = x^2 + 3x - 2 sampled on a range wide enough to fix the nullspace.
  std::vector<std::vector<long long>> rows;
  for (long long x = -12; x <= 12; ++x) rows.push_back({x, x * x + 3 * x - 2});
  TraceSet ts = testutil::make_traces({"x", "y"}, rows);
  auto basis = infer_equalities(ts, 2);
  REQUIRE(basis.size() == 1);
  CHECK(basis[0].text() == "x^2 - y + 3*x = 2");
  auto target = poly({"x", "y"}, {{mono({{"y", 1}}), 1},
                                  {mono({{"x", 2}}), -1},
                                  {mono({{"x", 1}}), -3},
                                  {mono({}), 2}});
  CHECK(reduces_to_zero(target, basis));
}

TEST_CASE("sqrt traces at degree 2 yield the documented loop equalities") {
  TraceSet ts = collect("sqrt.prog", 50, 1, 0, 100);
  auto basis = infer_equalities(ts, 2);
  CHECK(texts_of(basis) == std::vector<std::string>{
                               "t - 2*a = 1",
                               "x*t - 2*x*a - x = 0",
                               "a^2 - s + 2*a = -1",
                               "a*t - 2*s + 3*a = -2",
                               "s*t - 2*a*s - s = 0",
                               "t^2 - 4*s + 4*a = -3",
                           });
  std::vector<std::string> vars = ts.variables;
  // t = 2a + 1
  CHECK(reduces_to_zero(poly(vars, {{mono({{"t", 1}}), 1}, {mono({{"a", 1}}), -2}, {mono({}), -1}}),
                        basis));
  // 4s = t^2 + 2t + 1
  CHECK(reduces_to_zero(poly(vars, {{mono({{"s", 1}}), 4},
                                    {mono({{"t", 2}}), -1},
                                    {mono({{"t", 1}}), -2},
                                    {mono({}), -1}}),
                        basis));
  // s = (a + 1)^2
  CHECK(reduces_to_zero(poly(vars, {{mono({{"s", 1}}), 1},
                                    {mono({{"a", 2}}), -1},
                                    {mono({{"a", 1}}), -2},
                                    {mono({}), -1}}),
                        basis));
  // x = a is NOT an invariant and must not reduce.
  CHECK(!reduces_to_zero(poly(vars, {{mono({{"x", 1}}), 1}, {mono({{"a", 1}}), -1}}), basis));
  for (const auto& e : basis)
    for (const auto& r : ts.rows) CHECK(e.holds_on(r));
}

TEST_CASE("the basis does not depend on row order") {
  TraceSet ts = collect("sqrt.prog", 30, 5, 0, 80);
  auto want = texts_of(infer_equalities(ts, 2));
  std::mt19937 rng(17);
  for (int trial = 0; trial < 3; ++trial) {
    std::shuffle(ts.rows.begin(), ts.rows.end(), rng);
    CHECK(texts_of(infer_equalities(ts, 2)) == want);
  }
}

TEST_CASE("generic points admit no equalities") {
  TraceSet ts = testutil::make_traces(
      {"x", "y"}, {{0, 3}, {1, -7}, {2, 11}, {3, 2}, {4, 9}, {5, -1}, {6, 17}, {7, 4}});
  CHECK(infer_equalities(ts, 2).empty());
}

TEST_CASE("empty traces are rejected") {
  TraceSet ts;
  ts.location = "L";
  ts.variables = {"x"};
  CHECK_THROWS_AS(infer_equalities(ts, 1), TraceError);
}

TEST_CASE("every emitted equality holds on every generating row") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<long long> pick(-30, 30);
  for (int set = 0; set < 10; ++set) {
    std::vector<std::vector<long long>> rows;
    int n = 3 + static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) {
      long long x = pick(rng), y = pick(rng);
      rows.push_back({x, y, x + 2 * y - 1});  // plant one relation, leave the rest free
    }
    TraceSet ts = testutil::make_traces({"x", "y", "z"}, rows);
    auto basis = infer_equalities(ts, 2);
    CHECK(!basis.empty());
    for (const auto& e : basis)
      for (const auto& r : ts.rows) CHECK(e.holds_on(r));
    CHECK(reduces_to_zero(poly({"x", "y", "z"}, {{mono({{"z", 1}}), 1},
                                                 {mono({{"x", 1}}), -1},
                                                 {mono({{"y", 1}}), -2},
                                                 {mono({}), 1}}),
                          basis));
  }
}

}  // TEST_SUITE
