#pragma once

// Types, session types, multiplicities, duality and ground-type machinery.

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ggv {

enum class Mult { un, lin };

const char* show(Mult m);

// Multiplicity ordering: un <= un, un <= lin, lin <= lin.
bool mult_sub(Mult m, Mult n);
Mult mult_join(Mult m, Mult n);
Mult mult_meet(Mult m, Mult n);

struct Type;
struct Session;
using TypePtr = std::shared_ptr<const Type>;
using SessionPtr = std::shared_ptr<const Session>;

enum class SessKind { send, recv, select, offer, end_out, end_in, dc };

using Branches = std::vector<std::pair<std::string, SessionPtr>>;

// Branch maps are kept in sorted label order so structural equality is
// order-insensitive. Construct via the s_* helpers only.
struct Session {
  SessKind kind;
  TypePtr carried;   // send/recv
  SessionPtr rest;   // send/recv
  Branches branches; // select/offer, sorted by label, non-empty
};

enum class TypeKind { unit, int_, dyn, fn, prod, sess };

struct Type {
  TypeKind kind;
  Mult mult = Mult::un; // fn/prod annotation
  TypePtr lhs, rhs;     // fn: dom/cod, prod: fst/snd
  SessionPtr sess;      // sess
};

TypePtr t_unit();
TypePtr t_int();
TypePtr t_dyn();
TypePtr t_fn(Mult m, TypePtr dom, TypePtr cod);
TypePtr t_prod(Mult m, TypePtr fst, TypePtr snd);
TypePtr t_sess(SessionPtr s);

SessionPtr s_send(TypePtr carried, SessionPtr rest);
SessionPtr s_recv(TypePtr carried, SessionPtr rest);
SessionPtr s_select(Branches bs);
SessionPtr s_offer(Branches bs);
SessionPtr s_end_out(); // end_!
SessionPtr s_end_in();  // end_?
SessionPtr s_dc();

bool type_eq(const TypePtr& a, const TypePtr& b);
bool session_eq(const SessionPtr& a, const SessionPtr& b);

// Duality: swaps send/recv, select/offer, end_!/end_?; DC is self-dual.
SessionPtr dual(const SessionPtr& s);

// Multiplicity of a type: Unit/Int/Dyn are un, sessions (including DC) lin,
// functions and products carry their annotation.
Mult mult_of(const TypePtr& t);
bool is_lin(const TypePtr& t);
bool is_un(const TypePtr& t);

// true iff mult_of(t) <= n
bool mult_at_most(const TypePtr& t, Mult n);

// Ground grammar: Unit, Int, DC, Dyn ->m Dyn, Dyn *m Dyn, and ground sessions
// !Dyn.DC, ?Dyn.DC, +{l:DC}, &{l:DC}, End!, End?.
bool is_ground(const TypePtr& t);
bool is_ground_session(const SessionPtr& s);

// The unique ground session consistent with s. Rejects s = DC.
SessionPtr ground_session_of(const SessionPtr& s);

// The unique ground type consistent with t, where embedded session types
// ground pointwise to their ground session. Rejects t = Dyn.
TypePtr ground_of(const TypePtr& t);

// Factoring target for casts to/from Dyn: like ground_of but every session
// type grounds to DC, matching the ground-type grammar used by reduction.
TypePtr factor_ground_of(const TypePtr& t);

std::string show(const TypePtr& t);
std::string show(const SessionPtr& s);

// Labeled, polarized cast identifier. Complement flips polarity and is an
// involution.
struct BlameLabel {
  int id = 0;
  bool negative = false;

  BlameLabel complement() const { return {id, !negative}; }
  bool operator==(const BlameLabel& o) const {
    return id == o.id && negative == o.negative;
  }
  bool operator!=(const BlameLabel& o) const { return !(*this == o); }
  bool same_cast(const BlameLabel& o) const { return id == o.id; }
};

std::string show(const BlameLabel& p);

// Internal contract violations (not user-facing type errors).
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

} // namespace ggv
