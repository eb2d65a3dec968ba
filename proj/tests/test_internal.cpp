#include <doctest.h>

#include "ggv/internal.hpp"
#include "ggv/parser.hpp"

using namespace ggv;

namespace {

const Span sp{};

ITermPtr cast(ITermPtr e, const char* from, const char* to, int label, bool neg = false) {
  return i_cast(sp, std::move(e), parse_type(from), parse_type(to), BlameLabel{label, neg});
}

} // namespace

TEST_CASE("value grammar") {
  CHECK(is_value(cast(i_int(sp, 42), "Int", "Dyn", 1)));          // un ground to Dyn
  CHECK_FALSE(is_value(cast(i_chan(sp, "c"), "DC", "!Dyn.DC", 1))); // DC on the left
  CHECK(is_value(i_cellref(sp, "a")));
  CHECK(is_value(cast(i_chan(sp, "c"), "End!", "DC", 1)));  // ground session to DC
  CHECK_FALSE(is_value(cast(i_chan(sp, "c"), "!Int.End!", "DC", 1))); // not ground
  CHECK(is_value(cast(i_lam(sp, Mult::un, "x", t_unit(), i_var(sp, "x")),
                      "Unit -un> Unit", "Unit -lin> Unit", 1))); // arrow cast
  CHECK(is_value(cast(i_chan(sp, "c"), "!Int.End!", "!Dyn.DC", 1))); // non-DC sessions
  CHECK_FALSE(is_value(cast(i_chan(sp, "c"), "End!", "Dyn", 1)));    // lin ground to Dyn
  CHECK_FALSE(is_value(cast(i_unit(sp), "Unit", "Unit", 1)));        // identity redex
}

TEST_CASE("flv collects endpoints, not references") {
  CHECK(flv(i_close(sp, i_chan(sp, "c"))) == std::set<std::string>{"c"});
  CHECK(flv(cast(i_cellref(sp, "a"), "Dyn", "End!", 1)).empty());
  ITermPtr send = i_send(sp, i_var(sp, "x"), i_chan(sp, "d"));
  CHECK(flv(cast(send, "End!", "DC", 1)) == std::set<std::string>{"d"});
}

TEST_CASE("substitution is simultaneous and respects binders") {
  // let x,y = (y,x) swap via simultaneous substitution
  ITermPtr body = i_pair(sp, Mult::un, i_var(sp, "x"), i_var(sp, "y"));
  ITermPtr out = subst(body, {{"x", i_var(sp, "y")}, {"y", i_var(sp, "x")}});
  CHECK(show(out) == "(y, x)un");

  ITermPtr lam = i_lam(sp, Mult::un, "x", t_unit(), i_var(sp, "x"));
  CHECK(subst(lam, {{"x", i_unit(sp)}}) == lam); // shadowed
}

TEST_CASE("tc_internal on casts") {
  TypeEnv env{{"c", parse_type("!Int.End!")}};
  TcResult r = tc_internal(env, i_send(sp, i_int(sp, 42), i_var(sp, "c")));
  CHECK(show(r.type) == "End!");
  CHECK(r.linear == std::set<std::string>{"c"});

  TypeEnv env2{{"c", parse_type("End!")}};
  TcResult r2 = tc_internal(env2, cast(i_var(sp, "c"), "End!", "DC", 1));
  CHECK(show(r2.type) == "DC");

  TypeEnv env3;
  CHECK_THROWS_WITH_AS(tc_internal(env3, cast(i_unit(sp), "Unit", "End!", 1)),
                       doctest::Contains("inconsistent cast"), TypeError);
  CHECK_THROWS_WITH_AS(tc_internal(env3, cast(i_int(sp, 1), "Unit", "Dyn", 1)),
                       doctest::Contains("cast source mismatch"), TypeError);
}

TEST_CASE("tc_config checks duality, splits, and cells") {
  Configuration cfg;
  cfg.channels.push_back({"c0", "c1", parse_session("End!"), parse_session("End?"), false});
  cfg.processes.push_back(Process::make_expr(i_close(sp, i_chan(sp, "c0"))));
  cfg.processes.push_back(Process::make_expr(i_wait(sp, i_chan(sp, "c1"))));
  CHECK_FALSE(tc_config(cfg).has_value());

  // same endpoint in two processes
  Configuration bad = cfg;
  bad.processes[1] = Process::make_expr(i_close(sp, i_chan(sp, "c0")));
  auto err = tc_config(bad);
  REQUIRE(err.has_value());
  CHECK(err->message.find("c0") != std::string::npos);

  // non-dual channel types
  Configuration nondual = cfg;
  nondual.channels[0].type2 = parse_session("End!");
  CHECK(tc_config(nondual).has_value());

  // a linear-process type is rejected
  Configuration linproc;
  linproc.channels.push_back({"c0", "c1", parse_session("End!"), parse_session("End?"), false});
  linproc.processes.push_back(Process::make_expr(i_chan(sp, "c0")));
  linproc.processes.push_back(Process::make_expr(i_wait(sp, i_chan(sp, "c1"))));
  CHECK(tc_config(linproc).has_value());

  // cells hold linear ground payloads
  Configuration with_cell = cfg;
  with_cell.processes[0] = Process::make_expr(
      i_close(sp, cast(i_cellref(sp, "a0"), "Dyn", "End!", 9)));
  with_cell.live_cells.push_back("a0");
  with_cell.processes.push_back(
      Process::make_cell("a0", cast(i_chan(sp, "c0"), "End!", "DC", 2), t_sess(s_dc()),
                         BlameLabel{2, false}));
  CHECK_FALSE(tc_config(with_cell).has_value());
}

TEST_CASE("safe_for follows the polarity rules") {
  BlameLabel p{1, false};
  // c : End! =>p DC is positively safe (End! <=+ DC)
  CHECK(safe_for(cast(i_chan(sp, "c"), "End!", "DC", 1), p));
  // a : Dyn =>p End! is not (Dyn <=+ End! fails)
  CHECK_FALSE(safe_for(cast(i_cellref(sp, "a"), "Dyn", "End!", 1), p));
  // unrelated labels recurse into the body
  ITermPtr nested = cast(cast(i_cellref(sp, "a"), "Dyn", "End!", 1), "End!", "DC", 2);
  CHECK_FALSE(safe_for(nested, p));
  CHECK(safe_for(cast(i_unit(sp), "Unit", "Dyn", 2), p));
  // negative side: the complement label checks neg_sub
  ITermPtr neg_cast = cast(i_unit(sp), "Unit", "Dyn", 1, true); // labelled p~
  CHECK_FALSE(safe_for(neg_cast, p)); // need neg_sub(Unit, Dyn), which fails
  CHECK(safe_for(cast(i_var(sp, "x"), "Dyn", "Unit", 1, true), p)); // Dyn <=- Unit

  Configuration cfg;
  cfg.processes.push_back(Process::make_blame_pair(p, BlameLabel{3, false}, {}));
  CHECK_FALSE(safe_for(cfg, p));
  CHECK(safe_for(cfg, BlameLabel{2, false}));
}

TEST_CASE("configuration pretty-printing uses the process notation") {
  Configuration cfg;
  cfg.channels.push_back({"c0", "c1", s_end_out(), s_end_in(), false});
  cfg.processes.push_back(Process::make_expr(i_close(sp, i_chan(sp, "c0"))));
  cfg.processes.push_back(Process::make_expr(i_wait(sp, i_chan(sp, "c1"))));
  CHECK(show(cfg) == "(νc0,c1)(⟨close c0⟩ | ⟨wait c1⟩)");
}
