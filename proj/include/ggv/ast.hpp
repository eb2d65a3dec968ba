#pragma once

// Surface AST shared by the typed (.ggv) and untyped (.ugv) front ends.
// Untyped programs reuse the same nodes with null annotations and all
// multiplicities un.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ggv/syntax.hpp"

namespace ggv {

struct Span {
  std::string file;
  int line = 0, col = 0;

  std::string str() const {
    if (file.empty() && line == 0) return "<builtin>";
    return file + ":" + std::to_string(line) + ":" + std::to_string(col);
  }
};

enum class ArithOp { add, neg, eq };

const char* show(ArithOp op);

struct EExpr;
using EExprPtr = std::shared_ptr<const EExpr>;

struct ECaseBranch {
  std::string label;
  std::string var;
  EExprPtr body;
};

struct EExpr {
  enum class Kind {
    var, unit_lit, int_lit, lam, app, pair, let_pair, fork, new_chan,
    send, receive, select, case_, close, wait, arith, if_
  };

  Kind kind;
  Span span;

  std::string name;           // var; lam binder; select label
  int64_t int_value = 0;      // int_lit
  Mult mult = Mult::un;       // lam, pair
  TypePtr ann;                // lam annotation (null in untyped programs)
  SessionPtr session;         // new annotation (null in untyped programs)
  std::string x, y;           // let_pair binders
  EExprPtr a, b, c;           // children (app: fn/arg; send: payload/chan; if: cond/then/else)
  std::vector<ECaseBranch> branches;
  ArithOp op = ArithOp::add;  // arith
  std::vector<EExprPtr> args; // arith operands (1 for neg, 2 otherwise)
};

EExprPtr e_var(Span sp, std::string name);
EExprPtr e_unit(Span sp);
EExprPtr e_int(Span sp, int64_t v);
EExprPtr e_lam(Span sp, Mult m, std::string x, TypePtr ann, EExprPtr body);
EExprPtr e_app(Span sp, EExprPtr f, EExprPtr a);
EExprPtr e_pair(Span sp, Mult m, EExprPtr a, EExprPtr b);
EExprPtr e_let_pair(Span sp, std::string x, std::string y, EExprPtr bound, EExprPtr body);
EExprPtr e_fork(Span sp, EExprPtr a);
EExprPtr e_new(Span sp, SessionPtr s);
EExprPtr e_send(Span sp, EExprPtr payload, EExprPtr chan);
EExprPtr e_receive(Span sp, EExprPtr chan);
EExprPtr e_select(Span sp, std::string label, EExprPtr chan);
EExprPtr e_case(Span sp, EExprPtr scrutinee, std::vector<ECaseBranch> branches);
EExprPtr e_close(Span sp, EExprPtr chan);
EExprPtr e_wait(Span sp, EExprPtr chan);
EExprPtr e_arith(Span sp, ArithOp op, std::vector<EExprPtr> args);
EExprPtr e_if(Span sp, EExprPtr cond, EExprPtr then_e, EExprPtr else_e);

std::string show(const EExprPtr& e);

// true iff e carries no Lam/New annotations (well-formed untyped program).
bool is_annotation_free(const EExprPtr& e);

} // namespace ggv
