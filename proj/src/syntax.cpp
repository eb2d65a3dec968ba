#include "ggv/syntax.hpp"

#include <algorithm>

namespace ggv {

const char* show(Mult m) { return m == Mult::un ? "un" : "lin"; }

bool mult_sub(Mult m, Mult n) {
  return m == Mult::un || n == Mult::lin;
}

Mult mult_join(Mult m, Mult n) {
  return (m == Mult::lin || n == Mult::lin) ? Mult::lin : Mult::un;
}

Mult mult_meet(Mult m, Mult n) {
  return (m == Mult::un || n == Mult::un) ? Mult::un : Mult::lin;
}

TypePtr t_unit() {
  static const TypePtr t = std::make_shared<Type>(Type{TypeKind::unit, Mult::un, nullptr, nullptr, nullptr});
  return t;
}

TypePtr t_int() {
  static const TypePtr t = std::make_shared<Type>(Type{TypeKind::int_, Mult::un, nullptr, nullptr, nullptr});
  return t;
}

TypePtr t_dyn() {
  static const TypePtr t = std::make_shared<Type>(Type{TypeKind::dyn, Mult::un, nullptr, nullptr, nullptr});
  return t;
}

TypePtr t_fn(Mult m, TypePtr dom, TypePtr cod) {
  auto t = std::make_shared<Type>();
  t->kind = TypeKind::fn;
  t->mult = m;
  t->lhs = std::move(dom);
  t->rhs = std::move(cod);
  return t;
}

TypePtr t_prod(Mult m, TypePtr fst, TypePtr snd) {
  auto t = std::make_shared<Type>();
  t->kind = TypeKind::prod;
  t->mult = m;
  t->lhs = std::move(fst);
  t->rhs = std::move(snd);
  return t;
}

TypePtr t_sess(SessionPtr s) {
  auto t = std::make_shared<Type>();
  t->kind = TypeKind::sess;
  t->sess = std::move(s);
  return t;
}

SessionPtr s_send(TypePtr carried, SessionPtr rest) {
  auto s = std::make_shared<Session>();
  s->kind = SessKind::send;
  s->carried = std::move(carried);
  s->rest = std::move(rest);
  return s;
}

SessionPtr s_recv(TypePtr carried, SessionPtr rest) {
  auto s = std::make_shared<Session>();
  s->kind = SessKind::recv;
  s->carried = std::move(carried);
  s->rest = std::move(rest);
  return s;
}

static Branches canon(Branches bs, const char* what) {
  if (bs.empty()) throw InternalError(std::string(what) + ": empty label set");
  std::sort(bs.begin(), bs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (size_t i = 1; i < bs.size(); i++)
    if (bs[i].first == bs[i - 1].first)
      throw InternalError(std::string(what) + ": duplicate label " + bs[i].first);
  return bs;
}

SessionPtr s_select(Branches bs) {
  auto s = std::make_shared<Session>();
  s->kind = SessKind::select;
  s->branches = canon(std::move(bs), "select");
  return s;
}

SessionPtr s_offer(Branches bs) {
  auto s = std::make_shared<Session>();
  s->kind = SessKind::offer;
  s->branches = canon(std::move(bs), "offer");
  return s;
}

SessionPtr s_end_out() {
  static const SessionPtr s = std::make_shared<Session>(Session{SessKind::end_out, nullptr, nullptr, {}});
  return s;
}

SessionPtr s_end_in() {
  static const SessionPtr s = std::make_shared<Session>(Session{SessKind::end_in, nullptr, nullptr, {}});
  return s;
}

SessionPtr s_dc() {
  static const SessionPtr s = std::make_shared<Session>(Session{SessKind::dc, nullptr, nullptr, {}});
  return s;
}

bool session_eq(const SessionPtr& a, const SessionPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case SessKind::send:
    case SessKind::recv:
      return type_eq(a->carried, b->carried) && session_eq(a->rest, b->rest);
    case SessKind::select:
    case SessKind::offer: {
      if (a->branches.size() != b->branches.size()) return false;
      for (size_t i = 0; i < a->branches.size(); i++) {
        if (a->branches[i].first != b->branches[i].first) return false;
        if (!session_eq(a->branches[i].second, b->branches[i].second)) return false;
      }
      return true;
    }
    case SessKind::end_out:
    case SessKind::end_in:
    case SessKind::dc:
      return true;
  }
  return false;
}

bool type_eq(const TypePtr& a, const TypePtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TypeKind::unit:
    case TypeKind::int_:
    case TypeKind::dyn:
      return true;
    case TypeKind::fn:
    case TypeKind::prod:
      return a->mult == b->mult && type_eq(a->lhs, b->lhs) && type_eq(a->rhs, b->rhs);
    case TypeKind::sess:
      return session_eq(a->sess, b->sess);
  }
  return false;
}

SessionPtr dual(const SessionPtr& s) {
  switch (s->kind) {
    case SessKind::send: return s_recv(s->carried, dual(s->rest));
    case SessKind::recv: return s_send(s->carried, dual(s->rest));
    case SessKind::select: {
      Branches bs;
      for (const auto& [l, r] : s->branches) bs.emplace_back(l, dual(r));
      return s_offer(std::move(bs));
    }
    case SessKind::offer: {
      Branches bs;
      for (const auto& [l, r] : s->branches) bs.emplace_back(l, dual(r));
      return s_select(std::move(bs));
    }
    case SessKind::end_out: return s_end_in();
    case SessKind::end_in: return s_end_out();
    case SessKind::dc: return s_dc();
  }
  throw InternalError("dual: bad session");
}

Mult mult_of(const TypePtr& t) {
  switch (t->kind) {
    case TypeKind::unit:
    case TypeKind::int_:
    case TypeKind::dyn:
      return Mult::un;
    case TypeKind::sess:
      return Mult::lin; // every session type, including DC
    case TypeKind::fn:
    case TypeKind::prod:
      return t->mult;
  }
  throw InternalError("mult_of: bad type");
}

bool is_lin(const TypePtr& t) { return mult_of(t) == Mult::lin; }
bool is_un(const TypePtr& t) { return mult_of(t) == Mult::un; }

bool mult_at_most(const TypePtr& t, Mult n) { return mult_sub(mult_of(t), n); }

bool is_ground_session(const SessionPtr& s) {
  switch (s->kind) {
    case SessKind::send:
    case SessKind::recv:
      return s->carried->kind == TypeKind::dyn && s->rest->kind == SessKind::dc;
    case SessKind::select:
    case SessKind::offer:
      return std::all_of(s->branches.begin(), s->branches.end(),
                         [](const auto& b) { return b.second->kind == SessKind::dc; });
    case SessKind::end_out:
    case SessKind::end_in:
      return true;
    case SessKind::dc:
      return false; // DC is a ground type, not a ground session type
  }
  return false;
}

bool is_ground(const TypePtr& t) {
  switch (t->kind) {
    case TypeKind::unit:
    case TypeKind::int_:
      return true;
    case TypeKind::dyn:
      return false;
    case TypeKind::fn:
    case TypeKind::prod:
      return t->lhs->kind == TypeKind::dyn && t->rhs->kind == TypeKind::dyn;
    case TypeKind::sess:
      return t->sess->kind == SessKind::dc || is_ground_session(t->sess);
  }
  return false;
}

SessionPtr ground_session_of(const SessionPtr& s) {
  switch (s->kind) {
    case SessKind::send: return s_send(t_dyn(), s_dc());
    case SessKind::recv: return s_recv(t_dyn(), s_dc());
    case SessKind::select: {
      Branches bs;
      for (const auto& [l, _] : s->branches) bs.emplace_back(l, s_dc());
      return s_select(std::move(bs));
    }
    case SessKind::offer: {
      Branches bs;
      for (const auto& [l, _] : s->branches) bs.emplace_back(l, s_dc());
      return s_offer(std::move(bs));
    }
    case SessKind::end_out: return s_end_out();
    case SessKind::end_in: return s_end_in();
    case SessKind::dc:
      throw InternalError("ground_session_of: DC has no associated ground session type");
  }
  throw InternalError("ground_session_of: bad session");
}

TypePtr ground_of(const TypePtr& t) {
  switch (t->kind) {
    case TypeKind::unit: return t_unit();
    case TypeKind::int_: return t_int();
    case TypeKind::dyn:
      throw InternalError("ground_of: Dyn has no associated ground type");
    case TypeKind::fn: return t_fn(t->mult, t_dyn(), t_dyn());
    case TypeKind::prod: return t_prod(t->mult, t_dyn(), t_dyn());
    case TypeKind::sess:
      if (t->sess->kind == SessKind::dc) return t_sess(s_dc());
      return t_sess(ground_session_of(t->sess));
  }
  throw InternalError("ground_of: bad type");
}

TypePtr factor_ground_of(const TypePtr& t) {
  if (t->kind == TypeKind::sess) return t_sess(s_dc());
  return ground_of(t);
}

static void show_type(const TypePtr& t, std::string& out, bool atom);

static void show_session(const SessionPtr& s, std::string& out) {
  switch (s->kind) {
    case SessKind::send:
    case SessKind::recv:
      out += s->kind == SessKind::send ? '!' : '?';
      show_type(s->carried, out, true);
      out += '.';
      show_session(s->rest, out);
      return;
    case SessKind::select:
    case SessKind::offer: {
      out += s->kind == SessKind::select ? "+{" : "&{";
      bool first = true;
      for (const auto& [l, r] : s->branches) {
        if (!first) out += ", ";
        first = false;
        out += l;
        out += ": ";
        show_session(r, out);
      }
      out += '}';
      return;
    }
    case SessKind::end_out: out += "End!"; return;
    case SessKind::end_in: out += "End?"; return;
    case SessKind::dc: out += "DC"; return;
  }
}

static void show_type(const TypePtr& t, std::string& out, bool atom) {
  switch (t->kind) {
    case TypeKind::unit: out += "Unit"; return;
    case TypeKind::int_: out += "Int"; return;
    case TypeKind::dyn: out += "Dyn"; return;
    case TypeKind::fn: {
      if (atom) out += '(';
      show_type(t->lhs, out, t->lhs->kind == TypeKind::fn); // arrows are right-associative
      out += t->mult == Mult::un ? " -un> " : " -lin> ";
      show_type(t->rhs, out, false);
      if (atom) out += ')';
      return;
    }
    case TypeKind::prod: {
      if (atom) out += '(';
      show_type(t->lhs, out,
                t->lhs->kind == TypeKind::fn || t->lhs->kind == TypeKind::prod);
      out += t->mult == Mult::un ? " *un " : " *lin ";
      show_type(t->rhs, out, t->rhs->kind == TypeKind::fn); // products bind tighter
      if (atom) out += ')';
      return;
    }
    case TypeKind::sess:
      // session types are self-delimiting in every surrounding position
      show_session(t->sess, out);
      return;
  }
}

std::string show(const TypePtr& t) {
  std::string out;
  show_type(t, out, false);
  return out;
}

std::string show(const SessionPtr& s) {
  std::string out;
  show_session(s, out);
  return out;
}

std::string show(const BlameLabel& p) {
  std::string out = "ℓ" + std::to_string(p.id);
  if (p.negative) out += "⁻";
  return out;
}

} // namespace ggv
