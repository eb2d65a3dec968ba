#pragma once

// The enumeration universe for relation property tests: every type and
// session constructor exercised, nesting up to depth 3, labels {a, b},
// base types Unit and Int. Kept small enough that cubic properties finish
// in seconds.

#include <vector>

#include "ggv/parser.hpp"
#include "ggv/syntax.hpp"

namespace ggv::testing {

inline std::vector<SessionPtr> session_atoms() {
  return {s_end_out(), s_end_in(), s_dc()};
}

inline std::vector<TypePtr> type_atoms() {
  return {t_unit(), t_int(), t_dyn(), t_sess(s_end_out()), t_sess(s_end_in()), t_sess(s_dc())};
}

inline std::vector<SessionPtr> session_universe() {
  std::vector<SessionPtr> out = session_atoms();
  for (const auto& t : type_atoms())
    for (const auto& s : session_atoms()) {
      out.push_back(s_send(t, s));
      out.push_back(s_recv(t, s));
    }
  for (const auto& s : session_atoms()) {
    out.push_back(s_select({{"a", s}}));
    out.push_back(s_select({{"b", s}}));
    out.push_back(s_offer({{"a", s}}));
    out.push_back(s_offer({{"b", s}}));
    for (const auto& r : session_atoms()) {
      out.push_back(s_select({{"a", s}, {"b", r}}));
      out.push_back(s_offer({{"a", s}, {"b", r}}));
    }
  }
  // depth 2-3 representatives covering every rule constructor in nesting
  for (const char* src : {
           "!(!Int.End!).End?", "?(Dyn -un> Dyn).DC", "!Dyn.!Dyn.End!", "?Int.?Int.End?",
           "+{a: !Int.End!, b: DC}", "&{a: ?Dyn.DC}", "+{a: +{a: End!}}",
           "&{a: &{a: End?, b: DC}}", "!(Unit *lin Dyn).+{b: End!}",
           "?(Int -lin> Int).&{a: DC, b: !Unit.End!}", "!Dyn.DC", "?Dyn.DC",
           "+{a: DC, b: DC}", "&{a: DC, b: DC}", "+{a: DC}", "&{b: DC}",
       })
    out.push_back(parse_session(src));
  return out;
}

inline std::vector<TypePtr> type_universe() {
  std::vector<TypePtr> out = type_atoms();
  const auto atoms = type_atoms();
  for (Mult m : {Mult::un, Mult::lin})
    for (const auto& a : atoms)
      for (const auto& b : atoms) {
        out.push_back(t_fn(m, a, b));
        out.push_back(t_prod(m, a, b));
      }
  for (const auto& s : session_universe()) out.push_back(t_sess(s));
  for (const char* src : {
           "(Dyn -un> Dyn) -un> Unit", "(Int -un> Int) -lin> Dyn",
           "Dyn -un> Int -lin> DC", "Unit -lin> Unit -un> Unit",
           "(Unit *un Int) *un Int", "(End! *lin Dyn) *lin Int",
           "Dyn *lin (Dyn -lin> Dyn)", "Int -un> (Int *un Int)",
           "(!Int.End!) -lin> ?Dyn.DC", "(&{a: DC}) *lin Unit",
           "((Unit -un> Unit) -un> Unit) -un> Unit", "Int *un (Int *un (Int *un Int))",
       })
    out.push_back(parse_type(src));
  return out;
}

inline std::vector<SessionPtr> ground_session_universe() {
  return {s_send(t_dyn(), s_dc()),
          s_recv(t_dyn(), s_dc()),
          s_select({{"a", s_dc()}}),
          s_select({{"b", s_dc()}}),
          s_select({{"a", s_dc()}, {"b", s_dc()}}),
          s_offer({{"a", s_dc()}}),
          s_offer({{"b", s_dc()}}),
          s_offer({{"a", s_dc()}, {"b", s_dc()}}),
          s_end_out(),
          s_end_in()};
}

// The ground types proper (the ground-session stratum is separate).
inline std::vector<TypePtr> ground_type_universe() {
  return {t_unit(),
          t_int(),
          t_sess(s_dc()),
          t_fn(Mult::un, t_dyn(), t_dyn()),
          t_fn(Mult::lin, t_dyn(), t_dyn()),
          t_prod(Mult::un, t_dyn(), t_dyn()),
          t_prod(Mult::lin, t_dyn(), t_dyn())};
}

} // namespace ggv::testing
