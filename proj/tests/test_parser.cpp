#include <doctest.h>

#include "ggv/parser.hpp"

using namespace ggv;

TEST_CASE("expression forms") {
  auto e = parse_expr("close (send o c)");
  CHECK(e->kind == EExpr::Kind::close);
  CHECK(e->a->kind == EExpr::Kind::send);
  CHECK(e->a->a->name == "o");
  CHECK(e->a->b->name == "c");

  e = parse_expr("lambda_un o: Dyn. o");
  CHECK(e->kind == EExpr::Kind::lam);
  CHECK(e->mult == Mult::un);
  CHECK(e->name == "o");
  CHECK(show(e->ann) == "Dyn");
  CHECK(e->a->kind == EExpr::Kind::var);

  e = parse_expr("let x, y = receive c in wait y");
  CHECK(e->kind == EExpr::Kind::let_pair);
  CHECK(e->x == "x");
  CHECK(e->y == "y");
  CHECK(e->a->kind == EExpr::Kind::receive);
  CHECK(e->b->kind == EExpr::Kind::wait);
}

TEST_CASE("application is left-associative, juxtaposition") {
  auto e = parse_expr("f x y");
  CHECK(e->kind == EExpr::Kind::app);
  CHECK(e->a->kind == EExpr::Kind::app);
  CHECK(e->a->a->name == "f");
  CHECK(e->a->b->name == "x");
  CHECK(e->b->name == "y");
}

TEST_CASE("let sugar") {
  auto e = parse_expr("let x : Unit = () in x");
  REQUIRE(e->kind == EExpr::Kind::app);
  CHECK(e->a->kind == EExpr::Kind::lam);
  CHECK(e->a->mult == Mult::lin);
  CHECK(show(e->a->ann) == "Unit");
  CHECK(e->b->kind == EExpr::Kind::unit_lit);

  // e1; e2 is let _ : Unit = e1 in e2
  e = parse_expr("(); 42");
  REQUIRE(e->kind == EExpr::Kind::app);
  CHECK(e->a->kind == EExpr::Kind::lam);
  CHECK(e->a->name == "_");
  CHECK(e->b->kind == EExpr::Kind::unit_lit);
}

TEST_CASE("pairs need multiplicities in typed programs") {
  auto e = parse_expr("(1, 2)@un");
  CHECK(e->kind == EExpr::Kind::pair);
  CHECK(e->mult == Mult::un);
  CHECK_THROWS_AS(parse_expr("(1, 2)"), ParseError);

  auto u = parse_untyped_expr("(1, 2)");
  CHECK(u->kind == EExpr::Kind::pair);
  CHECK(u->mult == Mult::un);
}

TEST_CASE("case syntax") {
  auto e = parse_expr("case c of { neg: c2. close c2, add: c2. wait c2 }");
  REQUIRE(e->kind == EExpr::Kind::case_);
  REQUIRE(e->branches.size() == 2);
  CHECK(e->branches[0].label == "neg");
  CHECK(e->branches[0].var == "c2");
  CHECK_THROWS_AS(parse_expr("case c of { a: x. x, a: y. y }"), ParseError);
}

TEST_CASE("arithmetic and if") {
  auto e = parse_expr("1 + 2 == 3");
  REQUIRE(e->kind == EExpr::Kind::arith);
  CHECK(e->op == ArithOp::eq);
  CHECK(e->args[0]->op == ArithOp::add);

  e = parse_expr("n - 1");
  REQUIRE(e->kind == EExpr::Kind::arith);
  CHECK(e->op == ArithOp::add);
  CHECK(e->args[1]->op == ArithOp::neg);

  e = parse_expr("if n == 0 then 1 else 2");
  CHECK(e->kind == EExpr::Kind::if_);

  e = parse_expr("-x");
  CHECK(e->op == ArithOp::neg);
}

TEST_CASE("type syntax") {
  CHECK(show(parse_type("Unit -un> Unit -lin> Unit")) == "Unit -un> Unit -lin> Unit");
  CHECK(parse_type("Unit -un> Unit -lin> Unit")->rhs->kind == TypeKind::fn); // right assoc
  CHECK(show(parse_type("Int *lin DC")) == "Int *lin DC");
  CHECK(show(parse_type("!Int.End!")) == "!Int.End!");
  CHECK(show(parse_type("?Dyn.DC -un> Unit")) == "?Dyn.DC -un> Unit");
  CHECK(parse_type("?Dyn.DC -un> Unit")->kind == TypeKind::fn);
  CHECK(show(parse_type("+{neg: !Int.?Int.End?, add: !Int.!Int.?Int.End?}")) ==
        "+{add: !Int.!Int.?Int.End?, neg: !Int.?Int.End?}");
  CHECK(show(parse_type("(Unit -un> Unit) -un> Unit")) == "(Unit -un> Unit) -un> Unit");
  CHECK_THROWS_AS(parse_type("+{}"), ParseError);
}

TEST_CASE("comments and spans") {
  auto e = parse_expr("-- a comment\n  f x -- trailing\n");
  CHECK(e->kind == EExpr::Kind::app);
  CHECK(e->span.line == 2);

  CHECK_THROWS_WITH_AS(parse_expr("send"), doctest::Contains("expected an expression"),
                       ParseError);
}

TEST_CASE("imports") {
  Program p = parse_program("import untyped \"srv.ugv\" as srv\nsrv ()");
  REQUIRE(p.imports.size() == 1);
  CHECK(p.imports[0].path == "srv.ugv");
  CHECK(p.imports[0].name == "srv");
  CHECK(p.body->kind == EExpr::Kind::app);
}

TEST_CASE("untyped surface") {
  auto e = parse_untyped_expr("lambda x. x x");
  CHECK(e->kind == EExpr::Kind::lam);
  CHECK(e->ann == nullptr);
  auto n = parse_untyped_expr("let cs, cc = new in close cs; wait cc");
  CHECK(n->kind == EExpr::Kind::let_pair);
  CHECK(n->a->session == nullptr);
  CHECK_THROWS_AS(parse_untyped_expr("lambda_un x: Unit. x"), ParseError);
  CHECK_THROWS_AS(parse_expr("lambda x. x"), ParseError);
}
