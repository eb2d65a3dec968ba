#include <doctest.h>

#include "ggv/parser.hpp"
#include "ggv/relations.hpp"
#include "ggv/syntax.hpp"

using namespace ggv;

TEST_CASE("duality equations") {
  CHECK(show(dual(parse_session("!Unit.End!"))) == "?Unit.End?");
  CHECK(session_eq(dual(s_dc()), s_dc()));
  auto s = parse_session("&{l1: End!, l2: ?Int.End?}");
  CHECK(session_eq(dual(dual(s)), s));
  CHECK(show(dual(s)) == "+{l1: End?, l2: !Int.End!}");
}

TEST_CASE("multiplicity of a type") {
  CHECK(mult_of(t_dyn()) == Mult::un);
  CHECK(mult_of(t_sess(s_dc())) == Mult::lin);
  CHECK(mult_of(parse_type("Unit *un Unit")) == Mult::un);
  CHECK(mult_of(parse_type("Unit *lin Unit")) == Mult::lin);
  CHECK(mult_of(t_int()) == Mult::un);

  CHECK(mult_at_most(parse_type("End!"), Mult::lin));
  CHECK_FALSE(mult_at_most(parse_type("End!"), Mult::un));
  CHECK(mult_at_most(t_unit(), Mult::lin));
}

TEST_CASE("multiplicity ordering") {
  CHECK(mult_sub(Mult::un, Mult::un));
  CHECK(mult_sub(Mult::un, Mult::lin));
  CHECK(mult_sub(Mult::lin, Mult::lin));
  CHECK_FALSE(mult_sub(Mult::lin, Mult::un));
}

TEST_CASE("ground types") {
  CHECK(show(ground_of(parse_type("Int -un> Unit"))) == "Dyn -un> Dyn");
  CHECK(show(ground_of(parse_type("!Int.End!"))) == "!Dyn.DC");
  CHECK(type_eq(ground_of(t_unit()), t_unit()));
  CHECK(type_eq(ground_of(t_int()), t_int()));
  CHECK_THROWS_AS(ground_of(t_dyn()), InternalError);

  CHECK(show(ground_session_of(parse_session("?Int.!Int.End!"))) == "?Dyn.DC");
  CHECK(show(ground_session_of(parse_session("End?"))) == "End?");
  CHECK(show(ground_session_of(parse_session("+{neg: !Int.End?}"))) == "+{neg: DC}");
  CHECK_THROWS_AS(ground_session_of(s_dc()), InternalError);

  CHECK(is_ground(parse_type("Dyn *lin Dyn")));
  CHECK_FALSE(is_ground(parse_type("Int -un> Dyn")));
  CHECK(is_ground(parse_type("&{a: DC, b: DC}")));
  CHECK(is_ground(t_sess(s_dc())));
  CHECK_FALSE(is_ground(t_dyn()));

  // the runtime's factoring target grounds every session type to DC
  CHECK(show(factor_ground_of(parse_type("End!"))) == "DC");
  CHECK(show(factor_ground_of(parse_type("!Int.End!"))) == "DC");
  CHECK(show(factor_ground_of(parse_type("Int -lin> Unit"))) == "Dyn -lin> Dyn");
}

TEST_CASE("ground uniqueness within each stratum") {
  // ground session types over labels {a,b}
  std::vector<SessionPtr> ground_sessions = {
      parse_session("!Dyn.DC"), parse_session("?Dyn.DC"),
      parse_session("+{a: DC}"), parse_session("+{b: DC}"), parse_session("+{a: DC, b: DC}"),
      parse_session("&{a: DC}"), parse_session("&{b: DC}"), parse_session("&{a: DC, b: DC}"),
      s_end_out(), s_end_in()};
  std::vector<SessionPtr> sessions = {
      parse_session("!Int.End!"), parse_session("?Unit.DC"), parse_session("End!"),
      parse_session("+{a: End!, b: ?Int.End?}"), parse_session("&{b: DC}")};
  for (const auto& s : sessions) {
    int consistent_count = 0;
    for (const auto& g : ground_sessions)
      if (consistent_session(s, g)) consistent_count++;
    CHECK(consistent_count == 1);
    CHECK(consistent_session(s, ground_session_of(s)));
    CHECK(session_eq(ground_session_of(ground_session_of(s)), ground_session_of(s)));
  }

  // ground types proper, for non-session types
  std::vector<TypePtr> ground_types = {
      t_unit(), t_int(), t_sess(s_dc()),
      parse_type("Dyn -un> Dyn"), parse_type("Dyn -lin> Dyn"),
      parse_type("Dyn *un Dyn"), parse_type("Dyn *lin Dyn")};
  std::vector<TypePtr> types = {t_unit(), t_int(), parse_type("Int -lin> Unit"),
                                parse_type("(Unit *un Unit) *un Int")};
  for (const auto& t : types) {
    int consistent_count = 0;
    for (const auto& g : ground_types)
      if (consistent(t, g)) consistent_count++;
    CHECK(consistent_count == 1);
    CHECK(consistent(t, ground_of(t)));
    CHECK(type_eq(ground_of(ground_of(t)), ground_of(t)));
  }
}

TEST_CASE("blame label complement is an involution") {
  BlameLabel p{7, false};
  CHECK(p.complement().negative);
  CHECK(p.complement().complement() == p);
  CHECK(show(p) == "ℓ7");
  CHECK(show(p.complement()) == "ℓ7⁻");
}

TEST_CASE("branch maps are canonicalized") {
  auto a = parse_session("+{b: End!, a: End?}");
  auto b = parse_session("+{a: End?, b: End!}");
  CHECK(session_eq(a, b));
  CHECK(show(a) == "+{a: End?, b: End!}");
}
