#include <doctest.h>

#include <functional>
#include <vector>

#include "ggv/relations.hpp"
#include "universe.hpp"

using namespace ggv;
using ggv::testing::ground_session_universe;
using ggv::testing::ground_type_universe;
using ggv::testing::session_universe;
using ggv::testing::type_universe;

namespace {

using RelFn = bool (*)(const TypePtr&, const TypePtr&);

// boolean relation matrices over the universe, packed for the cubic checks
struct Matrix {
  size_t n;
  std::vector<std::vector<uint64_t>> rows;

  Matrix(size_t n0) : n(n0), rows(n0, std::vector<uint64_t>((n0 + 63) / 64, 0)) {}

  void set(size_t i, size_t j) { rows[i][j / 64] |= uint64_t{1} << (j % 64); }
  bool get(size_t i, size_t j) const {
    return rows[i][j / 64] >> (j % 64) & 1;
  }
  bool row_subset(size_t i, size_t j) const { // row j subset of row i
    for (size_t w = 0; w < rows[i].size(); w++)
      if (rows[j][w] & ~rows[i][w]) return false;
    return true;
  }
};

Matrix build(const std::vector<TypePtr>& u, RelFn f) {
  Matrix m(u.size());
  for (size_t i = 0; i < u.size(); i++)
    for (size_t j = 0; j < u.size(); j++)
      if (f(u[i], u[j])) m.set(i, j);
  return m;
}

bool transitive(const Matrix& m) {
  for (size_t i = 0; i < m.n; i++)
    for (size_t j = 0; j < m.n; j++)
      if (m.get(i, j) && !m.row_subset(i, j)) return false;
  return true;
}

// constructive witnesses for the consistent-subtyping factorizations:
// witness1 gives M with T1 ~ M and M <= T2; witness2 gives M with T1 <= M
// and M ~ T2. Both assume consistent_sub(T1, T2).
TypePtr witness1(const TypePtr& t1, const TypePtr& t2);
TypePtr witness2(const TypePtr& t1, const TypePtr& t2);
SessionPtr switness1(const SessionPtr& s1, const SessionPtr& s2);
SessionPtr switness2(const SessionPtr& s1, const SessionPtr& s2);

SessionPtr switness1(const SessionPtr& s1, const SessionPtr& s2) {
  if (s2->kind == SessKind::dc) return s_dc();
  if (s1->kind == SessKind::dc) return s2;
  switch (s1->kind) {
    case SessKind::send:
      return s_send(witness2(s2->carried, s1->carried), switness1(s1->rest, s2->rest));
    case SessKind::recv:
      return s_recv(witness1(s1->carried, s2->carried), switness1(s1->rest, s2->rest));
    case SessKind::select: {
      Branches bs;
      for (const auto& [l, s] : s1->branches) {
        SessionPtr rhs;
        for (const auto& [l2, r] : s2->branches)
          if (l2 == l) rhs = r;
        bs.emplace_back(l, rhs ? switness1(s, rhs) : s);
      }
      return s_select(std::move(bs));
    }
    case SessKind::offer: {
      Branches bs;
      for (const auto& [l, s] : s1->branches) {
        SessionPtr rhs;
        for (const auto& [l2, r] : s2->branches)
          if (l2 == l) rhs = r;
        bs.emplace_back(l, switness1(s, rhs));
      }
      return s_offer(std::move(bs));
    }
    default:
      return s1;
  }
}

SessionPtr switness2(const SessionPtr& s1, const SessionPtr& s2) {
  if (s1->kind == SessKind::dc) return s_dc();
  if (s2->kind == SessKind::dc) return s1;
  switch (s2->kind) {
    case SessKind::send:
      return s_send(witness1(s2->carried, s1->carried), switness2(s1->rest, s2->rest));
    case SessKind::recv:
      return s_recv(witness2(s1->carried, s2->carried), switness2(s1->rest, s2->rest));
    case SessKind::select: {
      Branches bs;
      for (const auto& [l, r] : s2->branches) {
        SessionPtr lhs;
        for (const auto& [l2, s] : s1->branches)
          if (l2 == l) lhs = s;
        bs.emplace_back(l, switness2(lhs, r));
      }
      return s_select(std::move(bs));
    }
    case SessKind::offer: {
      Branches bs;
      for (const auto& [l, r] : s2->branches) {
        SessionPtr lhs;
        for (const auto& [l2, s] : s1->branches)
          if (l2 == l) lhs = s;
        bs.emplace_back(l, lhs ? switness2(lhs, r) : r);
      }
      return s_offer(std::move(bs));
    }
    default:
      return s2;
  }
}

TypePtr witness1(const TypePtr& t1, const TypePtr& t2) {
  if (t2->kind == TypeKind::dyn) return t_dyn();
  if (t1->kind == TypeKind::dyn) return t2;
  if (t1->kind == TypeKind::sess && t2->kind == TypeKind::sess)
    return t_sess(switness1(t1->sess, t2->sess));
  switch (t1->kind) {
    case TypeKind::fn:
      return t_fn(t1->mult, witness2(t2->lhs, t1->lhs), witness1(t1->rhs, t2->rhs));
    case TypeKind::prod:
      return t_prod(t1->mult, witness1(t1->lhs, t2->lhs), witness1(t1->rhs, t2->rhs));
    default:
      return t1;
  }
}

TypePtr witness2(const TypePtr& t1, const TypePtr& t2) {
  if (t1->kind == TypeKind::dyn) return t_dyn();
  if (t2->kind == TypeKind::dyn) return t1;
  if (t1->kind == TypeKind::sess && t2->kind == TypeKind::sess)
    return t_sess(switness2(t1->sess, t2->sess));
  switch (t2->kind) {
    case TypeKind::fn:
      return t_fn(t2->mult, witness1(t2->lhs, t1->lhs), witness2(t1->rhs, t2->rhs));
    case TypeKind::prod:
      return t_prod(t2->mult, witness2(t1->lhs, t2->lhs), witness2(t1->rhs, t2->rhs));
    default:
      return t2;
  }
}

} // namespace

TEST_CASE("examples from the figures") {
  auto T = [](const char* s) { return parse_type(s); };

  CHECK(sub(T("+{neg: End!, add: End!}"), T("+{neg: End!}")));
  CHECK_FALSE(sub(T("Dyn"), T("Unit")));
  CHECK(sub(T("Unit -un> Unit"), T("Unit -lin> Unit")));

  CHECK(consistent_sub(T("+{l1: !Dyn.DC, l2: ?Dyn.DC}"), T("+{l1: DC}")));
  CHECK(consistent_sub(T("&{l1: DC}"), T("&{l1: !Dyn.DC, l2: ?Dyn.DC}")));
  CHECK_FALSE(consistent_sub(T("?Unit.DC"), T("End!")));

  CHECK(consistent(T("Int -un> Int"), T("Dyn")));
  CHECK_FALSE(consistent(T("Int -un> Int"), T("Int *un Int")));
  CHECK_FALSE(consistent(T("?Unit.DC"), T("End!")));

  CHECK(pos_sub(T("!Int.End!"), T("DC")));
  CHECK(neg_sub(T("Dyn"), T("Int -lin> Int")));
  CHECK_FALSE(pos_sub(T("Dyn"), T("Unit")));

  CHECK(precision(T("!Int.End!"), T("DC")));
  CHECK_FALSE(precision(T("Unit -un> Unit"), T("Unit -lin> Unit")));
  CHECK_FALSE(precision(T("+{a: End!}"), T("+{a: End!, b: End!}")));

  // matching
  CHECK(show(t_sess(*match_select(T("DC"), "l"))) == "+{l: DC}");
  auto sent = match_send(T("DC"));
  REQUIRE(sent);
  CHECK(show(t_sess(s_send(sent->carried, sent->rest))) == "!Dyn.DC");
  auto padded = match_case(T("&{l1: End!}"), {"l1", "l2"});
  REQUIRE(padded);
  CHECK(show(*padded) == "&{l1: End!, l2: DC}");
  CHECK_FALSE(match_fun(T("Unit")));
  CHECK_FALSE(match_send(T("End!")));
  CHECK_FALSE(match_case(T("&{l1: End!, l3: End!}"), {"l1", "l2"}));

  // join / meet
  CHECK(show(*join(T("Dyn"), T("End!"))) == "End!");
  CHECK(show(*join(T("Unit -lin> Unit"), T("Unit -un> Unit"))) == "Unit -lin> Unit");
  CHECK_FALSE(join(T("+{a: End!}"), T("+{b: End!}")).has_value());
  CHECK(show(*join(T("+{a: End!, b: End!}"), T("+{b: End!, c: End!}"))) == "+{b: End!}");
  CHECK(show(*join(T("&{a: End!}"), T("&{b: End!}"))) == "&{a: End!, b: End!}");
  CHECK_FALSE(join(T("&{a: End!}"), T("&{a: End?}")).has_value());
  CHECK(show(*meet(T("Dyn"), T("Int"))) == "Int");
  CHECK(show(*meet(T("+{a: End!}"), T("+{b: End!}"))) == "+{a: End!, b: End!}");
  CHECK(show(*meet(T("Unit -lin> Unit"), T("Unit -un> Unit"))) == "Unit -un> Unit");
  CHECK_FALSE(meet(T("Unit"), T("Int")).has_value());
}

TEST_CASE("reflexivity and transitivity over the universe") {
  const auto u = type_universe();
  Matrix m_sub = build(u, sub);
  Matrix m_csub = build(u, consistent_sub);
  Matrix m_pos = build(u, pos_sub);
  Matrix m_neg = build(u, neg_sub);
  Matrix m_prec = build(u, precision);

  for (size_t i = 0; i < u.size(); i++) {
    CAPTURE(show(u[i]));
    CHECK(m_sub.get(i, i));
    CHECK(m_csub.get(i, i));
    CHECK(m_pos.get(i, i));
    CHECK(m_neg.get(i, i));
    CHECK(m_prec.get(i, i));
  }

  CHECK(transitive(m_sub));
  CHECK(transitive(m_pos));
  CHECK(transitive(m_neg));
  CHECK(transitive(m_prec));
  CHECK_FALSE(transitive(m_csub));

  // the canonical witness of non-transitivity
  auto fn = parse_type("Unit -un> Unit");
  auto prod = parse_type("Unit *un Unit");
  CHECK(consistent_sub(fn, t_dyn()));
  CHECK(consistent_sub(t_dyn(), prod));
  CHECK_FALSE(consistent_sub(fn, prod));
}

TEST_CASE("3/4 tangram and the subtyping hierarchy") {
  const auto u = type_universe();
  for (size_t i = 0; i < u.size(); i++)
    for (size_t j = 0; j < u.size(); j++) {
      const auto& t = u[i];
      const auto& v = u[j];
      if (sub(t, v)) {
        CAPTURE(show(t));
        CAPTURE(show(v));
        CHECK(pos_sub(t, v));
        CHECK(neg_sub(t, v));
      }
      bool prec_tv = precision(t, v);
      bool split = pos_sub(t, v) && neg_sub(v, t);
      if (prec_tv != split) {
        CAPTURE(show(t));
        CAPTURE(show(v));
        CHECK(prec_tv == split);
      }
      if (pos_sub(t, v)) CHECK(consistent_sub(t, v));
      if (neg_sub(t, v)) CHECK(consistent_sub(t, v));
    }
}

TEST_CASE("duality inversion") {
  const auto u = session_universe();
  for (const auto& s : u)
    for (const auto& r : u) {
      CAPTURE(show(s));
      CAPTURE(show(r));
      CHECK(sub_session(s, r) == sub_session(dual(r), dual(s)));
      CHECK(consistent_sub_session(dual(s), r) == consistent_sub_session(dual(r), s));
    }
}

TEST_CASE("ground restriction: consistent subtyping is subtyping") {
  for (const auto& g : ground_type_universe())
    for (const auto& h : ground_type_universe()) {
      CAPTURE(show(g));
      CAPTURE(show(h));
      CHECK(consistent_sub(g, h) == sub(g, h));
    }
  for (const auto& gs : ground_session_universe())
    for (const auto& gr : ground_session_universe())
      CHECK(consistent_sub_session(gs, gr) == sub_session(gs, gr));
}

TEST_CASE("matching soundness: T |> U implies T <~ U") {
  for (const auto& t : type_universe()) {
    CAPTURE(show(t));
    if (auto f = match_fun(t)) CHECK(consistent_sub(t, t_fn(f->mult, f->dom, f->cod)));
    if (auto p = match_prod(t)) CHECK(consistent_sub(t, t_prod(p->mult, p->fst, p->snd)));
    if (auto s = match_send(t)) CHECK(consistent_sub(t, t_sess(s_send(s->carried, s->rest))));
    if (auto r = match_recv(t)) CHECK(consistent_sub(t, t_sess(s_recv(r->carried, r->rest))));
    for (const char* l : {"a", "b"})
      if (auto sel = match_select(t, l)) CHECK(consistent_sub(t, t_sess(*sel)));
    for (const std::set<std::string>& ls :
         {std::set<std::string>{"a"}, {"b"}, {"a", "b"}})
      if (auto c = match_case(t, ls)) CHECK(consistent_sub(t, t_sess(*c)));
  }
}

TEST_CASE("join and meet bound their arguments") {
  const auto u = type_universe();
  for (const auto& t1 : u)
    for (const auto& t2 : u) {
      if (auto j = join(t1, t2)) {
        CAPTURE(show(t1));
        CAPTURE(show(t2));
        CAPTURE(show(*j));
        CHECK(neg_sub(t1, *j));
        CHECK(neg_sub(t2, *j));
      }
      if (auto m = meet(t1, t2)) {
        CAPTURE(show(t1));
        CAPTURE(show(t2));
        CHECK(pos_sub(*m, t1));
        CHECK(pos_sub(*m, t2));
      }
    }
}

TEST_CASE("join is the least upper bound for negative subtyping") {
  const auto u = type_universe();
  Matrix m_neg = build(u, neg_sub);

  for (size_t i = 0; i < u.size(); i++)
    for (size_t j = 0; j < u.size(); j++) {
      auto jj = join(u[i], u[j]);
      // common upper bounds = row(i) & row(j)
      bool any_common = false;
      for (size_t w = 0; w < m_neg.rows[i].size(); w++)
        if (m_neg.rows[i][w] & m_neg.rows[j][w]) any_common = true;
      if (!jj) {
        // no common upper bound may exist in the universe
        if (any_common) {
          for (size_t k = 0; k < u.size(); k++)
            if (m_neg.get(i, k) && m_neg.get(j, k)) {
              CAPTURE(show(u[i]));
              CAPTURE(show(u[j]));
              CAPTURE(show(u[k]));
              CHECK_FALSE("join undefined despite a common negative upper bound");
            }
        }
        continue;
      }
      for (size_t k = 0; k < u.size(); k++)
        if (m_neg.get(i, k) && m_neg.get(j, k)) {
          CAPTURE(show(u[i]));
          CAPTURE(show(u[j]));
          CAPTURE(show(u[k]));
          CHECK(neg_sub(*jj, u[k]));
        }
    }
}

TEST_CASE("meet is the greatest lower bound for positive subtyping") {
  const auto u = type_universe();
  Matrix m_pos = build(u, pos_sub);
  for (size_t i = 0; i < u.size(); i++)
    for (size_t j = 0; j < u.size(); j++) {
      auto mm = meet(u[i], u[j]);
      for (size_t k = 0; k < u.size(); k++) {
        if (m_pos.get(k, i) && m_pos.get(k, j)) {
          CAPTURE(show(u[i]));
          CAPTURE(show(u[j]));
          CAPTURE(show(u[k]));
          REQUIRE(mm.has_value());
          CHECK(pos_sub(u[k], *mm));
        }
      }
    }
}

TEST_CASE("consistent subtyping factors through subtyping") {
  const auto u = type_universe();
  for (const auto& t1 : u)
    for (const auto& t2 : u) {
      if (consistent_sub(t1, t2)) {
        TypePtr w1 = witness1(t1, t2);
        TypePtr w2 = witness2(t1, t2);
        CAPTURE(show(t1));
        CAPTURE(show(t2));
        CAPTURE(show(w1));
        CHECK(consistent(t1, w1));
        CHECK(sub(w1, t2));
        CHECK(sub(t1, w2));
        CHECK(consistent(w2, t2));
      }
    }
  // and conversely, any factoring implies consistent subtyping
  for (const auto& t1 : u)
    for (const auto& t2 : u)
      for (const auto& mid : {t_dyn(), t_unit(), parse_type("!Dyn.DC")})
        if (consistent(t1, mid) && sub(mid, t2)) CHECK(consistent_sub(t1, t2));
}

TEST_CASE("duality is an involution and sessions are linear, universe-wide") {
  for (const auto& s : session_universe()) {
    CAPTURE(show(s));
    CHECK(session_eq(dual(dual(s)), s));
    CHECK(mult_of(t_sess(s)) == Mult::lin);
  }
  for (const auto& g : ground_type_universe()) CHECK(type_eq(ground_of(g), g));
  for (const auto& gs : ground_session_universe())
    CHECK(session_eq(ground_session_of(gs), gs));
}
