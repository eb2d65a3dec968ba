#include "ggv/relations.hpp"

#include <algorithm>
#include <map>

namespace ggv {

namespace {

// All five structural relations share the same skeleton; they differ in the
// axioms for the dynamic types, the treatment of multiplicities, and whether
// choice types admit width. `flip` handles contravariant positions.
enum class Rel { sub, csub, pos, neg, prec };

Rel flip(Rel r) {
  switch (r) {
    case Rel::pos: return Rel::neg;
    case Rel::neg: return Rel::pos;
    default: return r; // sub, csub, prec are their own flips
  }
}

bool rel_type(Rel r, const TypePtr& t, const TypePtr& u);

bool rel_mult(Rel r, Mult m, Mult n) {
  if (r == Rel::prec) return m == n;
  return mult_sub(m, n);
}

bool rel_session(Rel r, const SessionPtr& s, const SessionPtr& u) {
  // dynamic session axioms
  switch (r) {
    case Rel::sub:
      if (s->kind == SessKind::dc || u->kind == SessKind::dc)
        return s->kind == SessKind::dc && u->kind == SessKind::dc;
      break;
    case Rel::csub:
      if (s->kind == SessKind::dc || u->kind == SessKind::dc) return true;
      break;
    case Rel::pos:
      if (u->kind == SessKind::dc) return true; // S <=+ DC
      if (s->kind == SessKind::dc) return false;
      break;
    case Rel::neg:
      if (s->kind == SessKind::dc) return true; // DC <=- S
      if (u->kind == SessKind::dc) return false;
      break;
    case Rel::prec:
      if (u->kind == SessKind::dc) return true; // S [= DC
      if (s->kind == SessKind::dc) return false;
      break;
  }
  if (s->kind != u->kind) return false;
  switch (s->kind) {
    case SessKind::send:
      if (r == Rel::prec) {
        // naive is covariant everywhere
        return rel_type(r, s->carried, u->carried) && rel_session(r, s->rest, u->rest);
      }
      return rel_type(flip(r), u->carried, s->carried) && rel_session(r, s->rest, u->rest);
    case SessKind::recv:
      return rel_type(r, s->carried, u->carried) && rel_session(r, s->rest, u->rest);
    case SessKind::select:
    case SessKind::offer: {
      const bool is_select = s->kind == SessKind::select;
      // width: select shrinks (J subset I), offer grows (I subset J); naive
      // requires identical label sets.
      const auto& big = is_select ? s->branches : u->branches;
      const auto& small = is_select ? u->branches : s->branches;
      if (r == Rel::prec && s->branches.size() != u->branches.size()) return false;
      size_t bi = 0;
      for (const auto& [l, _] : small) {
        while (bi < big.size() && big[bi].first < l) bi++;
        if (bi == big.size() || big[bi].first != l) return false;
      }
      if (r == Rel::prec && small.size() != big.size()) return false;
      // componentwise on the common labels, left-to-right orientation
      std::map<std::string, SessionPtr> rhs;
      for (const auto& [l, x] : u->branches) rhs[l] = x;
      for (const auto& [l, x] : s->branches) {
        auto it = rhs.find(l);
        if (it == rhs.end()) continue; // select-only surplus on the left
        if (!rel_session(r, x, it->second)) return false;
      }
      return true;
    }
    case SessKind::end_out:
    case SessKind::end_in:
      return true;
    case SessKind::dc:
      return true; // handled above
  }
  return false;
}

bool rel_type(Rel r, const TypePtr& t, const TypePtr& u) {
  // dynamic type axioms
  switch (r) {
    case Rel::sub:
      if (t->kind == TypeKind::dyn || u->kind == TypeKind::dyn)
        return t->kind == TypeKind::dyn && u->kind == TypeKind::dyn;
      break;
    case Rel::csub:
      if (t->kind == TypeKind::dyn || u->kind == TypeKind::dyn) return true;
      break;
    case Rel::pos:
      if (u->kind == TypeKind::dyn) return true; // T <=+ Dyn
      if (t->kind == TypeKind::dyn) return false;
      break;
    case Rel::neg:
      if (t->kind == TypeKind::dyn) return true; // Dyn <=- T
      if (u->kind == TypeKind::dyn) return false;
      break;
    case Rel::prec:
      if (u->kind == TypeKind::dyn) return true; // T [= Dyn
      if (t->kind == TypeKind::dyn) return false;
      break;
  }
  if (t->kind != u->kind) return false;
  switch (t->kind) {
    case TypeKind::unit:
    case TypeKind::int_:
      return true;
    case TypeKind::fn:
      if (!rel_mult(r, t->mult, u->mult)) return false;
      if (r == Rel::prec)
        return rel_type(r, t->lhs, u->lhs) && rel_type(r, t->rhs, u->rhs);
      return rel_type(flip(r), u->lhs, t->lhs) && rel_type(r, t->rhs, u->rhs);
    case TypeKind::prod:
      return rel_mult(r, t->mult, u->mult) && rel_type(r, t->lhs, u->lhs) &&
             rel_type(r, t->rhs, u->rhs);
    case TypeKind::sess:
      return rel_session(r, t->sess, u->sess);
    case TypeKind::dyn:
      return true; // handled above
  }
  return false;
}

} // namespace

bool sub(const TypePtr& t, const TypePtr& u) { return rel_type(Rel::sub, t, u); }
bool sub_session(const SessionPtr& s, const SessionPtr& r) {
  return rel_session(Rel::sub, s, r);
}

bool consistent_sub(const TypePtr& t, const TypePtr& u) {
  return rel_type(Rel::csub, t, u);
}
bool consistent_sub_session(const SessionPtr& s, const SessionPtr& r) {
  return rel_session(Rel::csub, s, r);
}

bool consistent(const TypePtr& t, const TypePtr& u) {
  return consistent_sub(t, u) && consistent_sub(u, t);
}
bool consistent_session(const SessionPtr& s, const SessionPtr& r) {
  return consistent_sub_session(s, r) && consistent_sub_session(r, s);
}

bool pos_sub(const TypePtr& t, const TypePtr& u) { return rel_type(Rel::pos, t, u); }
bool neg_sub(const TypePtr& t, const TypePtr& u) { return rel_type(Rel::neg, t, u); }
bool pos_sub_session(const SessionPtr& s, const SessionPtr& r) {
  return rel_session(Rel::pos, s, r);
}
bool neg_sub_session(const SessionPtr& s, const SessionPtr& r) {
  return rel_session(Rel::neg, s, r);
}

bool precision(const TypePtr& t, const TypePtr& u) { return rel_type(Rel::prec, t, u); }
bool precision_session(const SessionPtr& s, const SessionPtr& r) {
  return rel_session(Rel::prec, s, r);
}

std::optional<FnShape> match_fun(const TypePtr& t) {
  if (t->kind == TypeKind::fn) return FnShape{t->mult, t->lhs, t->rhs};
  if (t->kind == TypeKind::dyn) return FnShape{Mult::lin, t_dyn(), t_dyn()};
  return std::nullopt;
}

std::optional<ProdShape> match_prod(const TypePtr& t) {
  if (t->kind == TypeKind::prod) return ProdShape{t->mult, t->lhs, t->rhs};
  if (t->kind == TypeKind::dyn) return ProdShape{Mult::lin, t_dyn(), t_dyn()};
  return std::nullopt;
}

static bool matches_any_session(const TypePtr& t) {
  return t->kind == TypeKind::dyn ||
         (t->kind == TypeKind::sess && t->sess->kind == SessKind::dc);
}

std::optional<CommShape> match_send(const TypePtr& t) {
  if (t->kind == TypeKind::sess && t->sess->kind == SessKind::send)
    return CommShape{t->sess->carried, t->sess->rest};
  if (matches_any_session(t)) return CommShape{t_dyn(), s_dc()};
  return std::nullopt;
}

std::optional<CommShape> match_recv(const TypePtr& t) {
  if (t->kind == TypeKind::sess && t->sess->kind == SessKind::recv)
    return CommShape{t->sess->carried, t->sess->rest};
  if (matches_any_session(t)) return CommShape{t_dyn(), s_dc()};
  return std::nullopt;
}

std::optional<SessionPtr> match_select(const TypePtr& t, const std::string& label) {
  if (t->kind == TypeKind::sess && t->sess->kind == SessKind::select) {
    for (const auto& [l, s] : t->sess->branches)
      if (l == label) return s_select({{label, s}});
    return std::nullopt;
  }
  if (matches_any_session(t)) return s_select({{label, s_dc()}});
  return std::nullopt;
}

std::optional<SessionPtr> match_case(const TypePtr& t, const std::set<std::string>& labels) {
  if (labels.empty()) return std::nullopt;
  if (t->kind == TypeKind::sess && t->sess->kind == SessKind::offer) {
    Branches bs;
    for (const auto& [l, s] : t->sess->branches) {
      if (!labels.count(l)) return std::nullopt; // I must be a subset of J
      bs.emplace_back(l, s);
    }
    for (const auto& l : labels) {
      bool present = std::any_of(bs.begin(), bs.end(),
                                 [&](const auto& b) { return b.first == l; });
      if (!present) bs.emplace_back(l, s_dc());
    }
    return s_offer(std::move(bs));
  }
  if (matches_any_session(t)) {
    Branches bs;
    for (const auto& l : labels) bs.emplace_back(l, s_dc());
    return s_offer(std::move(bs));
  }
  return std::nullopt;
}

namespace {

// join and meet are mutually recursive through contravariant positions.
std::optional<TypePtr> lattice_type(bool joining, const TypePtr& t, const TypePtr& u);

std::optional<SessionPtr> lattice_session(bool joining, const SessionPtr& s,
                                          const SessionPtr& r) {
  if (s->kind == SessKind::dc) return r;
  if (r->kind == SessKind::dc) return s;
  if (s->kind != r->kind) return std::nullopt;
  switch (s->kind) {
    case SessKind::send: {
      auto carried = lattice_type(!joining, s->carried, r->carried);
      auto rest = lattice_session(joining, s->rest, r->rest);
      if (!carried || !rest) return std::nullopt;
      return s_send(*carried, *rest);
    }
    case SessKind::recv: {
      auto carried = lattice_type(joining, s->carried, r->carried);
      auto rest = lattice_session(joining, s->rest, r->rest);
      if (!carried || !rest) return std::nullopt;
      return s_recv(*carried, *rest);
    }
    case SessKind::select:
    case SessKind::offer: {
      // join of select / meet of offer: common labels whose residual
      // join/meet exists; join of offer / meet of select: union of labels,
      // common residuals must exist.
      const bool common_only = (s->kind == SessKind::select) == joining;
      std::map<std::string, SessionPtr> left, right;
      for (const auto& [l, x] : s->branches) left[l] = x;
      for (const auto& [l, x] : r->branches) right[l] = x;
      Branches out;
      for (const auto& [l, x] : left) {
        auto it = right.find(l);
        if (it == right.end()) {
          if (!common_only) out.emplace_back(l, x);
          continue;
        }
        auto both = lattice_session(joining, x, it->second);
        if (!both) {
          if (common_only) continue; // dropped
          return std::nullopt;       // union form requires all common to exist
        }
        out.emplace_back(l, *both);
      }
      if (!common_only)
        for (const auto& [l, x] : right)
          if (!left.count(l)) out.emplace_back(l, x);
      if (out.empty()) return std::nullopt; // ill-formed +{} / &{}
      return s->kind == SessKind::select ? s_select(std::move(out))
                                         : s_offer(std::move(out));
    }
    case SessKind::end_out: return s_end_out();
    case SessKind::end_in: return s_end_in();
    case SessKind::dc: return s_dc();
  }
  return std::nullopt;
}

std::optional<TypePtr> lattice_type(bool joining, const TypePtr& t, const TypePtr& u) {
  if (t->kind == TypeKind::dyn) return u;
  if (u->kind == TypeKind::dyn) return t;
  if (t->kind == TypeKind::sess && u->kind == TypeKind::sess) {
    auto s = lattice_session(joining, t->sess, u->sess);
    if (!s) return std::nullopt;
    return t_sess(*s);
  }
  if (t->kind != u->kind) return std::nullopt;
  switch (t->kind) {
    case TypeKind::unit: return t_unit();
    case TypeKind::int_: return t_int();
    case TypeKind::fn: {
      auto dom = lattice_type(!joining, t->lhs, u->lhs);
      auto cod = lattice_type(joining, t->rhs, u->rhs);
      if (!dom || !cod) return std::nullopt;
      Mult m = joining ? mult_join(t->mult, u->mult) : mult_meet(t->mult, u->mult);
      return t_fn(m, *dom, *cod);
    }
    case TypeKind::prod: {
      auto fst = lattice_type(joining, t->lhs, u->lhs);
      auto snd = lattice_type(joining, t->rhs, u->rhs);
      if (!fst || !snd) return std::nullopt;
      Mult m = joining ? mult_join(t->mult, u->mult) : mult_meet(t->mult, u->mult);
      return t_prod(m, *fst, *snd);
    }
    default:
      return std::nullopt;
  }
}

} // namespace

std::optional<TypePtr> join(const TypePtr& t, const TypePtr& u) {
  return lattice_type(true, t, u);
}
std::optional<TypePtr> meet(const TypePtr& t, const TypePtr& u) {
  return lattice_type(false, t, u);
}
std::optional<SessionPtr> join_session(const SessionPtr& s, const SessionPtr& r) {
  return lattice_session(true, s, r);
}
std::optional<SessionPtr> meet_session(const SessionPtr& s, const SessionPtr& r) {
  return lattice_session(false, s, r);
}

} // namespace ggv
