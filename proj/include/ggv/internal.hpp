#pragma once

// GGV_i: the internal cast calculus. Terms, value classification, free
// linear names, the algorithmic internal typechecker for expressions and
// configurations, and the blame-safety predicate.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ggv/ast.hpp"
#include "ggv/typecheck.hpp"

namespace ggv {

struct ITerm;
using ITermPtr = std::shared_ptr<const ITerm>;

struct ICaseBranch {
  std::string label;
  std::string var;
  ITermPtr body;
};

// Lam keeps its domain and New its session (used by tc_internal and the
// runtime's channel-type map); the printer omits both.
struct ITerm {
  enum class Kind {
    var, unit_lit, int_lit, lam, app, pair, let_pair, fork, new_chan,
    send, receive, select, case_, close, wait, arith, if_,
    cast, chan, cellref
  };

  Kind kind;
  Span span;

  std::string name;           // var/chan/cellref name; lam binder; select label
  std::string x, y;           // let_pair binders
  int64_t int_value = 0;
  Mult mult = Mult::un;       // lam, pair
  TypePtr ann;                // lam domain
  SessionPtr session;         // new
  ITermPtr a, b, c;
  std::vector<ICaseBranch> branches;
  ArithOp op = ArithOp::add;
  std::vector<ITermPtr> args;
  TypePtr from, to;           // cast
  BlameLabel label;           // cast

  ITerm() : label{0, false} {}
};

ITermPtr i_var(Span sp, std::string name);
ITermPtr i_unit(Span sp);
ITermPtr i_int(Span sp, int64_t v);
ITermPtr i_lam(Span sp, Mult m, std::string x, TypePtr ann, ITermPtr body);
ITermPtr i_app(Span sp, ITermPtr f, ITermPtr a);
ITermPtr i_pair(Span sp, Mult m, ITermPtr a, ITermPtr b);
ITermPtr i_let_pair(Span sp, std::string x, std::string y, ITermPtr bound, ITermPtr body);
ITermPtr i_fork(Span sp, ITermPtr a);
ITermPtr i_new(Span sp, SessionPtr s);
ITermPtr i_send(Span sp, ITermPtr payload, ITermPtr chan);
ITermPtr i_receive(Span sp, ITermPtr chan);
ITermPtr i_select(Span sp, std::string label, ITermPtr chan);
ITermPtr i_case(Span sp, ITermPtr scrutinee, std::vector<ICaseBranch> branches);
ITermPtr i_close(Span sp, ITermPtr chan);
ITermPtr i_wait(Span sp, ITermPtr chan);
ITermPtr i_arith(Span sp, ArithOp op, std::vector<ITermPtr> args);
ITermPtr i_if(Span sp, ITermPtr cond, ITermPtr then_t, ITermPtr else_t);
ITermPtr i_cast(Span sp, ITermPtr body, TypePtr from, TypePtr to, BlameLabel p);
ITermPtr i_chan(Span sp, std::string name);
ITermPtr i_cellref(Span sp, std::string name);

// Blame-calculus display notation: lambdas and new lose their annotations,
// casts print as (e : T =>l1 U).
std::string show(const ITermPtr& e);

// GGV_i value grammar, including `v : G =>p Dyn` for unrestricted ground G,
// `v : GS =>p DC`, arrow-to-arrow casts, non-DC session casts, and references.
bool is_value(const ITermPtr& e);

// Free channel-endpoint names. References are unrestricted and excluded.
std::set<std::string> flv(const ITermPtr& e);

// Simultaneous capture-avoiding substitution of closed values for variables.
ITermPtr subst(const ITermPtr& e, const std::map<std::string, ITermPtr>& sub);

// Algorithmic internal typing (linear-set style). Casts check the body
// against `from` up to subtyping and require from <~ to.
TcResult tc_internal(TypeEnv& env, const ITermPtr& e);

// ---- configurations ----

struct ChannelPair {
  std::string end1, end2;
  SessionPtr type1, type2; // current session of each end; kept dual
  bool consumed = false;   // close/wait already happened
};

struct Process {
  enum class Kind { expr, cell, locked_cell, blame_pair, blame_gc };

  Kind kind;
  ITermPtr term;                  // expr
  std::string cell_name;          // cell / locked_cell
  ITermPtr cell_payload;          // cell: value w of ground type
  TypePtr cell_ground;            // cell: G with lin(G)
  BlameLabel cell_label{0, false};
  BlameLabel blame_p{0, false}, blame_q{0, false}; // blame_pair(p,q) / blame_gc(p)
  std::set<std::string> blame_linears;

  static Process make_expr(ITermPtr t);
  static Process make_cell(std::string name, ITermPtr payload, TypePtr ground, BlameLabel p);
  static Process make_locked(std::string name, BlameLabel p);
  static Process make_blame_pair(BlameLabel p, BlameLabel q, std::set<std::string> linears);
  static Process make_blame_gc(BlameLabel p, std::set<std::string> linears);
};

// Normal form: all binders hoisted to the top, parallel composition flat.
struct Configuration {
  std::vector<ChannelPair> channels;
  std::vector<std::string> live_cells; // nu-bound references not yet collected
  std::vector<Process> processes;
  int64_t next_channel = 0; // pairs are (c{2k}, c{2k+1})
  int64_t next_cell = 0;

  const ChannelPair* pair_of(const std::string& endpoint) const;
  SessionPtr endpoint_type(const std::string& endpoint) const;
  std::string peer(const std::string& endpoint) const;
};

Configuration initial_config(const ITermPtr& term);

std::string show(const Configuration& cfg);

struct ConfigTypeError {
  std::string message;
};

// Checks the whole configuration: dual channel pairs, disjoint linear split
// across processes, each expression process unrestricted, cell payloads at
// their linear ground type, blame processes holding exactly their recorded
// linear names.
std::optional<ConfigTypeError> tc_config(const Configuration& cfg);

// Blame safety: every cast labeled p must be positively safe, every cast
// labeled complement(p) negatively safe; blame on p is unsafe.
bool safe_for(const ITermPtr& e, const BlameLabel& p);
bool safe_for(const Configuration& cfg, const BlameLabel& p);

// All cast labels occurring in a term (as written, with polarity).
std::vector<BlameLabel> cast_labels(const ITermPtr& e);

// Canonical-forms check on every value subterm: casts to Dyn carry an
// unrestricted ground source, casts to DC a ground session source.
// Returns descriptions of violations (empty when canonical).
std::vector<std::string> canonical_violations(const Configuration& cfg);

} // namespace ggv
