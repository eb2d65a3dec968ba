#include "ggv/typecheck.hpp"

#include <algorithm>

namespace ggv {

namespace {

using NameSet = std::set<std::string>;

std::string names(const NameSet& s) {
  std::string out;
  for (const auto& n : s) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

// Assert X, Y disjoint: a shared name would use the same linear variable twice.
void assert_disjoint(const Span& sp, const NameSet& x, const NameSet& y) {
  for (const auto& n : x)
    if (y.count(n)) throw TypeError(sp, "linear variable " + n + " used twice");
}

NameSet set_union(NameSet a, const NameSet& b) {
  a.insert(b.begin(), b.end());
  return a;
}

} // namespace

TcResult tcexp(TypeEnv& env, const EExprPtr& e) {
  switch (e->kind) {
    case EExpr::Kind::var: {
      const TypePtr* t = env.lookup(e->name);
      if (!t) throw TypeError(e->span, "unbound variable " + e->name);
      if (is_lin(*t)) return {*t, {e->name}};
      return {*t, {}};
    }

    case EExpr::Kind::unit_lit:
      return {t_unit(), {}};

    case EExpr::Kind::int_lit:
      return {t_int(), {}};

    case EExpr::Kind::lam: {
      if (!e->ann) throw TypeError(e->span, "lambda is missing its type annotation");
      env.push(e->name, e->ann);
      TcResult body = tcexp(env, e->a);
      env.pop();
      bool lin_arg = is_lin(e->ann);
      if (lin_arg && e->mult == Mult::un) {
        if (body.linear != NameSet{e->name}) {
          NameSet extra = body.linear;
          extra.erase(e->name);
          if (!extra.empty())
            throw TypeError(e->span, "linear variable(s) " + names(extra) +
                                         " escape an unrestricted lambda");
          throw TypeError(e->span, "linear variable " + e->name + " unused");
        }
        return {t_fn(Mult::un, e->ann, body.type), {}};
      }
      if (lin_arg && e->mult == Mult::lin) {
        if (!body.linear.count(e->name))
          throw TypeError(e->span, "linear variable " + e->name + " unused");
        body.linear.erase(e->name);
        return {t_fn(Mult::lin, e->ann, body.type), std::move(body.linear)};
      }
      if (!lin_arg && e->mult == Mult::un) {
        if (!body.linear.empty())
          throw TypeError(e->span, "linear variable(s) " + names(body.linear) +
                                       " escape an unrestricted lambda");
        return {t_fn(Mult::un, e->ann, body.type), {}};
      }
      // un argument, lin lambda
      return {t_fn(Mult::lin, e->ann, body.type), std::move(body.linear)};
    }

    case EExpr::Kind::app: {
      TcResult fn = tcexp(env, e->a);
      TcResult arg = tcexp(env, e->b);
      assert_disjoint(e->span, fn.linear, arg.linear);
      auto shape = match_fun(fn.type);
      if (!shape)
        throw TypeError(e->a->span, "no match: " + show(fn.type) + " is not a function shape");
      if (!consistent_sub(arg.type, shape->dom))
        throw TypeError(e->b->span, "inconsistent argument: " + show(arg.type) +
                                        " is not a consistent subtype of " + show(shape->dom));
      return {shape->cod, set_union(std::move(fn.linear), arg.linear)};
    }

    case EExpr::Kind::pair: {
      TcResult fst = tcexp(env, e->a);
      TcResult snd = tcexp(env, e->b);
      assert_disjoint(e->span, fst.linear, snd.linear);
      if (e->mult == Mult::un) {
        if (!is_un(fst.type))
          throw TypeError(e->a->span, "linear component " + show(fst.type) + " in an @un pair");
        if (!is_un(snd.type))
          throw TypeError(e->b->span, "linear component " + show(snd.type) + " in an @un pair");
      }
      return {t_prod(e->mult, fst.type, snd.type),
              set_union(std::move(fst.linear), snd.linear)};
    }

    case EExpr::Kind::let_pair: {
      TcResult bound = tcexp(env, e->a);
      auto shape = match_prod(bound.type);
      if (!shape)
        throw TypeError(e->a->span, "no match: " + show(bound.type) + " is not a product shape");
      env.push(e->x, shape->fst);
      env.push(e->y, shape->snd);
      TcResult body = tcexp(env, e->b);
      env.pop();
      env.pop();
      if (is_lin(shape->fst)) {
        if (!body.linear.count(e->x))
          throw TypeError(e->span, "linear variable " + e->x + " unused");
        body.linear.erase(e->x);
      }
      if (is_lin(shape->snd)) {
        if (!body.linear.count(e->y))
          throw TypeError(e->span, "linear variable " + e->y + " unused");
        body.linear.erase(e->y);
      }
      assert_disjoint(e->span, bound.linear, body.linear);
      return {body.type, set_union(std::move(bound.linear), body.linear)};
    }

    case EExpr::Kind::fork: {
      TcResult body = tcexp(env, e->a);
      if (!consistent(body.type, t_unit()))
        throw TypeError(e->span, "fork body has type " + show(body.type) +
                                     ", which is not consistent with Unit");
      return {t_unit(), std::move(body.linear)};
    }

    case EExpr::Kind::new_chan: {
      if (!e->session) throw TypeError(e->span, "new is missing its session annotation");
      return {t_prod(Mult::lin, t_sess(e->session), t_sess(dual(e->session))), {}};
    }

    case EExpr::Kind::send: {
      TcResult payload = tcexp(env, e->a);
      TcResult chan = tcexp(env, e->b);
      assert_disjoint(e->span, payload.linear, chan.linear);
      auto shape = match_send(chan.type);
      if (!shape)
        throw TypeError(e->b->span, "no match: " + show(chan.type) + " is not a send shape");
      if (!consistent_sub(payload.type, shape->carried))
        throw TypeError(e->a->span, "inconsistent argument: " + show(payload.type) +
                                        " is not a consistent subtype of " + show(shape->carried));
      return {t_sess(shape->rest), set_union(std::move(payload.linear), chan.linear)};
    }

    case EExpr::Kind::receive: {
      TcResult chan = tcexp(env, e->a);
      auto shape = match_recv(chan.type);
      if (!shape)
        throw TypeError(e->a->span, "no match: " + show(chan.type) + " is not a receive shape");
      return {t_prod(Mult::lin, shape->carried, t_sess(shape->rest)), std::move(chan.linear)};
    }

    case EExpr::Kind::select: {
      TcResult chan = tcexp(env, e->a);
      auto matched = match_select(chan.type, e->name);
      if (!matched)
        throw TypeError(e->a->span, "no match: " + show(chan.type) +
                                        " has no selectable branch " + e->name);
      return {t_sess((*matched)->branches.front().second), std::move(chan.linear)};
    }

    case EExpr::Kind::case_: {
      TcResult scrut = tcexp(env, e->a);
      std::set<std::string> labels;
      for (const auto& br : e->branches) labels.insert(br.label);
      auto matched = match_case(scrut.type, labels);
      if (!matched)
        throw TypeError(e->a->span, "no match: " + show(scrut.type) +
                                        " cannot offer the case labels {" + names(labels) + "}");
      TypePtr joined;
      NameSet common;
      bool first = true;
      for (const auto& br : e->branches) {
        SessionPtr residual;
        for (const auto& [l, s] : (*matched)->branches)
          if (l == br.label) residual = s;
        env.push(br.var, t_sess(residual));
        TcResult body = tcexp(env, br.body);
        env.pop();
        if (!body.linear.count(br.var))
          throw TypeError(br.body->span, "linear variable " + br.var + " unused");
        body.linear.erase(br.var);
        if (first) {
          joined = body.type;
          common = std::move(body.linear);
          first = false;
        } else {
          if (body.linear != common)
            throw TypeError(e->span, "branch linear-variable sets differ: {" + names(common) +
                                         "} vs {" + names(body.linear) + "}");
          auto j = join(joined, body.type);
          if (!j)
            throw TypeError(e->span, "join failure: " + show(joined) + " and " +
                                         show(body.type) + " have no join");
          joined = *j;
        }
      }
      assert_disjoint(e->span, scrut.linear, common);
      return {joined, set_union(std::move(scrut.linear), common)};
    }

    case EExpr::Kind::close: {
      TcResult chan = tcexp(env, e->a);
      if (!consistent(chan.type, t_sess(s_end_out())))
        throw TypeError(e->a->span, "close expects a channel consistent with End!, got " +
                                        show(chan.type));
      return {t_unit(), std::move(chan.linear)};
    }

    case EExpr::Kind::wait: {
      TcResult chan = tcexp(env, e->a);
      if (!consistent(chan.type, t_sess(s_end_in())))
        throw TypeError(e->a->span, "wait expects a channel consistent with End?, got " +
                                        show(chan.type));
      return {t_unit(), std::move(chan.linear)};
    }

    case EExpr::Kind::arith: {
      NameSet used;
      for (const auto& arg : e->args) {
        TcResult r = tcexp(env, arg);
        if (!consistent(r.type, t_int()))
          throw TypeError(arg->span, "arithmetic operand has type " + show(r.type) +
                                         ", which is not consistent with Int");
        assert_disjoint(e->span, used, r.linear);
        used = set_union(std::move(used), r.linear);
      }
      return {t_int(), std::move(used)};
    }

    case EExpr::Kind::if_: {
      TcResult cond = tcexp(env, e->a);
      if (!consistent(cond.type, t_int()))
        throw TypeError(e->a->span, "if condition has type " + show(cond.type) +
                                        ", which is not consistent with Int");
      TcResult then_r = tcexp(env, e->b);
      TcResult else_r = tcexp(env, e->c);
      if (then_r.linear != else_r.linear)
        throw TypeError(e->span, "branch linear-variable sets differ: {" + names(then_r.linear) +
                                     "} vs {" + names(else_r.linear) + "}");
      auto j = join(then_r.type, else_r.type);
      if (!j)
        throw TypeError(e->span, "join failure: " + show(then_r.type) + " and " +
                                     show(else_r.type) + " have no join");
      assert_disjoint(e->span, cond.linear, then_r.linear);
      return {*j, set_union(std::move(cond.linear), then_r.linear)};
    }
  }
  throw InternalError("tcexp: bad expression");
}

TypePtr check_program(const EExprPtr& e, const TypeEnv& imports) {
  TypeEnv env = imports;
  TcResult r = tcexp(env, e);
  if (!r.linear.empty())
    throw TypeError(e->span, "program leaves linear variable(s) " + names(r.linear) + " unused");
  if (!is_un(r.type))
    throw TypeError(e->span, "result type " + show(r.type) + " is linear");
  return r.type;
}

} // namespace ggv
