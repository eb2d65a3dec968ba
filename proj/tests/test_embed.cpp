#include <doctest.h>

#include "ggv/driver.hpp"
#include "ggv/runtime.hpp"

using namespace ggv;

namespace {

ITermPtr embed_src(const std::string& src, LabelAllocator& labels) {
  return embed(parse_untyped_expr(src, "<u>"), labels);
}

} // namespace

TEST_CASE("the embedding equations") {
  LabelAllocator labels;
  CHECK(show(embed_src("x", labels)) == "x");
  CHECK(show(embed_src("()", labels)).find("() : Unit =>") == 1); // (() : Unit =>ln Dyn)

  LabelAllocator l2;
  std::string new_term = show(embed_src("new", l2));
  CHECK(new_term == "(new : DC *lin DC =>ℓ1 Dyn)");

  LabelAllocator l3;
  std::string send_term = show(embed_src("send e f", l3));
  CHECK(send_term ==
        "((send e (f : Dyn =>ℓ1 !Dyn.DC)) : DC =>ℓ2 Dyn)");

  LabelAllocator l4;
  std::string lam_term = show(embed_src("lambda x. x", l4));
  CHECK(lam_term == "((λun x. x) : Dyn -un> Dyn =>ℓ1 Dyn)");

  LabelAllocator l5;
  std::string case_term = show(embed_src("case e of { l: x. x }", l5));
  CHECK(case_term.find("case (e : Dyn =>ℓ1 &{l: DC})") == 0);
  CHECK(case_term.find(": DC =>ℓ2 Dyn") != std::string::npos); // rebinding cast
}

TEST_CASE("embedded closed terms typecheck at Dyn") {
  for (const char* src : {
           "lambda x. x",
           "(lambda x. x x) (lambda x. x)",
           "let c, d = new in (close c; wait d)",
           "lambda c. let v, c2 = receive c in (send v c2, ())",
           "1 + 2",
           "if 1 then () else ()",
           "select l (lambda x. x)", // nonsense dynamically, still Dyn-typed
       }) {
    CAPTURE(src);
    CHECK_NOTHROW(check_embedding(parse_untyped_expr(src, "<u>")));
  }
}

TEST_CASE("embedded arithmetic blames rather than sticking") {
  LabelAllocator labels;
  ITermPtr t = load_untyped_source("(lambda x. x + 1) (lambda y. y)", "<u>", labels);
  Outcome out = run(t);
  CHECK(out.kind == Outcome::Kind::blamed);
}

TEST_CASE("the end-to-end dynamicity program") {
  const char* e2e =
      "let client = lambda cc. let v, cc2 = receive cc in wait cc2 in\n"
      "let server = lambda cs. let cs2 = send 42 cs in close cs2 in\n"
      "let p = new in\n"
      "let cs, cc = p in\n"
      "let f = fork (client cc) in\n"
      "server cs\n";
  LabelAllocator labels;
  ITermPtr t = load_untyped_source(e2e, "<e2e>", labels);

  std::vector<std::string> rules;
  RunOptions opts;
  opts.typecheck_each_step = true;
  opts.on_step = [&](int64_t, const std::string& rule, const Configuration&) {
    rules.push_back(rule);
  };
  Outcome out = run(t, opts);
  CHECK(out.kind == Outcome::Kind::quiescent);
  int syncs = 0;
  for (const auto& r : rules)
    if (r == "endpoint-collapse") syncs++;
  // one synchronization for send/receive and one for close/wait
  CHECK(syncs == 2);
  int collides = 0;
  for (const auto& r : rules)
    if (r == "endpoint-collide") collides++;
  CHECK(collides == 0);
}

TEST_CASE("mismatched endpoint casts collide") {
  // both sides try to receive on the two ends of one dynamic channel
  const char* bad =
      "let p = new in\n"
      "let a, b = p in\n"
      "let f = fork (let v, a2 = receive a in wait a2) in\n"
      "let w, b2 = receive b in wait b2\n";
  LabelAllocator labels;
  ITermPtr t = load_untyped_source(bad, "<bad>", labels);
  Outcome out = run(t);
  REQUIRE(out.kind == Outcome::Kind::blamed);
  // endpoint collide blames both labels as written, not complemented
  CHECK_FALSE(out.blames[0].p.negative);
  CHECK_FALSE(out.blames[0].q.negative);
}
