#include <doctest.h>

#include <cstdlib>
#include <string>

#include "tropinv/expr.hpp"
#include "tropinv/smt.hpp"

using namespace tropinv;

TEST_SUITE("smt") {

TEST_CASE("variable names stamp the step index and roundtrip") {
  CHECK(smt_name(VarRef{"x", VarRef::kPlain}) == "x");
  CHECK(smt_name(VarRef{"x", 3}) == "x__3");
  CHECK(smt_name(VarRef{"x", VarRef::kGhost}) == "x__in");
  for (const char* n : {"x", "x__3", "x__in", "y__0", "count__12"}) {
    VarRef v = parse_smt_name(n);
    CHECK(smt_name(v) == n);
  }
  CHECK(parse_smt_name("x__in").index == VarRef::kGhost);
  CHECK(parse_smt_name("x__3").index == 3);
  CHECK(parse_smt_name("x").index == VarRef::kPlain);
}

TEST_CASE("max folds to an ite chain with shifted arguments") {
  Expr f = parse_formula_text("max(0, x - 5) >= y - 5");
  CHECK(encode_at(f, 3) == "(>= (ite (> 0 (- x__3 5)) 0 (- x__3 5)) (- y__3 5))");
}

TEST_CASE("equalities and products encode at an index") {
  CHECK(encode_at(parse_formula_text("t = 2*a + 1"), 0) == "(= t__0 (+ (* 2 a__0) 1))");
  CHECK(encode_at(parse_formula_text("s = (a + 1) * (a + 1)"), 1) ==
        "(= s__1 (* (+ a__1 1) (+ a__1 1)))");
}

TEST_CASE("rational comparisons clear denominators by cross-multiplication") {
  Expr half = Expr::cmp(CmpOp::Ge, Expr::var("x"), Expr::constant(BigRat(1) / BigRat(2)));
  CHECK(encode(half) == "(>= (* 2 x) 1)");
}

TEST_CASE("a comparison in arithmetic position becomes an ite over 0/1") {
  Expr b = Expr::cmp(CmpOp::Eq, Expr::var("b", 2),
                     Expr::cmp(CmpOp::Gt, Expr::var("y", 2), Expr::constant(10)));
  CHECK(encode(b) == "(= b__2 (ite (> y__2 10) 1 0))");
}

TEST_CASE("negative literals use the SMT-LIB unary form") {
  CHECK(encode(parse_formula_text("x >= -1")) == "(>= x (- 1))");
}

TEST_CASE("connectives encode structurally") {
  CHECK(encode(parse_formula_text("x >= 0 && y <= 1 || !(z = 2)")) ==
        "(or (and (>= x 0) (<= y 1)) (not (= z 2)))");
}

TEST_CASE("a model environment reads missing variables as zero") {
  Model m;
  m[VarRef{"x", 0}] = BigRat(4);
  Env env = model_env(m);
  CHECK(*env(VarRef{"x", 0}) == BigRat(4));
  CHECK(*env(VarRef{"y", 0}) == BigRat(0));
  CHECK(eval_bool(parse_formula_text("x = 4 && y = 0"), [&](const VarRef& v) {
    return env(VarRef{v.name, 0});
  }));
}

TEST_CASE("the default solver command honors the environment override") {
  // The build pins a default; the env var, when set, wins.
  std::string def = default_solver_command();
  CHECK(!def.empty());
  setenv("TROPINV_SOLVER_CMD", "my-solver --flag", 1);
  CHECK(default_solver_command() == "my-solver --flag");
  unsetenv("TROPINV_SOLVER_CMD");
  CHECK(default_solver_command() == def);
}

}  // TEST_SUITE
