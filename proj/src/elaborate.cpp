#include "ggv/elaborate.hpp"

#include "ggv/relations.hpp"

namespace ggv {

ITermPtr smart_cast(const ITermPtr& e, const TypePtr& from, const TypePtr& to, BlameLabel p) {
  if (sub(from, to)) return e;
  if (!consistent_sub(from, to))
    throw InternalError("smart_cast: " + show(from) + " is not a consistent subtype of " +
                        show(to));
  return i_cast(e->span, e, from, to, p);
}

ITermPtr smart_cast(const ITermPtr& e, const TypePtr& from, const TypePtr& to,
                    LabelAllocator& labels) {
  if (sub(from, to)) return e;
  if (!consistent_sub(from, to))
    throw InternalError("smart_cast: " + show(from) + " is not a consistent subtype of " +
                        show(to));
  return i_cast(e->span, e, from, to, labels.fresh(e->span, from, to));
}

namespace {

// Mirrors the type side of tcexp; the linear bookkeeping has already been
// validated by the caller.
Elaborated ci(TypeEnv& env, const EExprPtr& e, LabelAllocator& labels) {
  switch (e->kind) {
    case EExpr::Kind::var: {
      const TypePtr* t = env.lookup(e->name);
      if (!t) throw InternalError("insert_casts: unbound " + e->name);
      return {i_var(e->span, e->name), *t};
    }
    case EExpr::Kind::unit_lit:
      return {i_unit(e->span), t_unit()};
    case EExpr::Kind::int_lit:
      return {i_int(e->span, e->int_value), t_int()};

    case EExpr::Kind::lam: {
      env.push(e->name, e->ann);
      Elaborated body = ci(env, e->a, labels);
      env.pop();
      return {i_lam(e->span, e->mult, e->name, e->ann, body.term),
              t_fn(e->mult, e->ann, body.type)};
    }

    case EExpr::Kind::app: {
      Elaborated fn = ci(env, e->a, labels);
      Elaborated arg = ci(env, e->b, labels);
      auto shape = match_fun(fn.type);
      TypePtr matched = t_fn(shape->mult, shape->dom, shape->cod);
      ITermPtr fn_term = smart_cast(fn.term, fn.type, matched, labels);
      ITermPtr arg_term = smart_cast(arg.term, arg.type, shape->dom, labels);
      return {i_app(e->span, fn_term, arg_term), shape->cod};
    }

    case EExpr::Kind::pair: {
      Elaborated fst = ci(env, e->a, labels);
      Elaborated snd = ci(env, e->b, labels);
      return {i_pair(e->span, e->mult, fst.term, snd.term),
              t_prod(e->mult, fst.type, snd.type)};
    }

    case EExpr::Kind::let_pair: {
      Elaborated bound = ci(env, e->a, labels);
      auto shape = match_prod(bound.type);
      TypePtr matched = t_prod(shape->mult, shape->fst, shape->snd);
      ITermPtr bound_term = smart_cast(bound.term, bound.type, matched, labels);
      env.push(e->x, shape->fst);
      env.push(e->y, shape->snd);
      Elaborated body = ci(env, e->b, labels);
      env.pop();
      env.pop();
      return {i_let_pair(e->span, e->x, e->y, bound_term, body.term), body.type};
    }

    case EExpr::Kind::fork: {
      Elaborated body = ci(env, e->a, labels);
      return {i_fork(e->span, smart_cast(body.term, body.type, t_unit(), labels)), t_unit()};
    }

    case EExpr::Kind::new_chan:
      return {i_new(e->span, e->session),
              t_prod(Mult::lin, t_sess(e->session), t_sess(dual(e->session)))};

    case EExpr::Kind::send: {
      Elaborated payload = ci(env, e->a, labels);
      Elaborated chan = ci(env, e->b, labels);
      auto shape = match_send(chan.type);
      TypePtr matched = t_sess(s_send(shape->carried, shape->rest));
      ITermPtr payload_term = smart_cast(payload.term, payload.type, shape->carried, labels);
      ITermPtr chan_term = smart_cast(chan.term, chan.type, matched, labels);
      return {i_send(e->span, payload_term, chan_term), t_sess(shape->rest)};
    }

    case EExpr::Kind::receive: {
      Elaborated chan = ci(env, e->a, labels);
      auto shape = match_recv(chan.type);
      TypePtr matched = t_sess(s_recv(shape->carried, shape->rest));
      return {i_receive(e->span, smart_cast(chan.term, chan.type, matched, labels)),
              t_prod(Mult::lin, shape->carried, t_sess(shape->rest))};
    }

    case EExpr::Kind::select: {
      Elaborated chan = ci(env, e->a, labels);
      auto matched = match_select(chan.type, e->name);
      ITermPtr chan_term = smart_cast(chan.term, chan.type, t_sess(*matched), labels);
      return {i_select(e->span, e->name, chan_term),
              t_sess((*matched)->branches.front().second)};
    }

    case EExpr::Kind::case_: {
      Elaborated scrut = ci(env, e->a, labels);
      std::set<std::string> label_set;
      for (const auto& br : e->branches) label_set.insert(br.label);
      auto matched = match_case(scrut.type, label_set);
      ITermPtr scrut_term = smart_cast(scrut.term, scrut.type, t_sess(*matched), labels);

      std::vector<std::pair<Elaborated, std::string>> bodies; // body, binder
      std::vector<std::string> branch_labels;
      TypePtr joined;
      for (const auto& br : e->branches) {
        SessionPtr residual;
        for (const auto& [l, s] : (*matched)->branches)
          if (l == br.label) residual = s;
        env.push(br.var, t_sess(residual));
        Elaborated body = ci(env, br.body, labels);
        env.pop();
        joined = joined ? *join(joined, body.type) : body.type;
        bodies.push_back({std::move(body), br.var});
        branch_labels.push_back(br.label);
      }
      std::vector<ICaseBranch> branches;
      for (size_t i = 0; i < bodies.size(); i++)
        branches.push_back({branch_labels[i], bodies[i].second,
                            smart_cast(bodies[i].first.term, bodies[i].first.type, joined, labels)});
      return {i_case(e->span, scrut_term, std::move(branches)), joined};
    }

    case EExpr::Kind::close: {
      Elaborated chan = ci(env, e->a, labels);
      return {i_close(e->span,
                      smart_cast(chan.term, chan.type, t_sess(s_end_out()), labels)),
              t_unit()};
    }

    case EExpr::Kind::wait: {
      Elaborated chan = ci(env, e->a, labels);
      return {i_wait(e->span, smart_cast(chan.term, chan.type, t_sess(s_end_in()), labels)),
              t_unit()};
    }

    case EExpr::Kind::arith: {
      std::vector<ITermPtr> args;
      for (const auto& arg : e->args) {
        Elaborated r = ci(env, arg, labels);
        args.push_back(smart_cast(r.term, r.type, t_int(), labels));
      }
      return {i_arith(e->span, e->op, std::move(args)), t_int()};
    }

    case EExpr::Kind::if_: {
      Elaborated cond = ci(env, e->a, labels);
      ITermPtr cond_term = smart_cast(cond.term, cond.type, t_int(), labels);
      Elaborated then_r = ci(env, e->b, labels);
      Elaborated else_r = ci(env, e->c, labels);
      TypePtr joined = *join(then_r.type, else_r.type);
      return {i_if(e->span, cond_term,
                   smart_cast(then_r.term, then_r.type, joined, labels),
                   smart_cast(else_r.term, else_r.type, joined, labels)),
              joined};
    }
  }
  throw InternalError("insert_casts: bad expression");
}

} // namespace

Elaborated insert_casts(TypeEnv& env, const EExprPtr& e, LabelAllocator& labels) {
  return ci(env, e, labels);
}

EExprPtr erase(const EExprPtr& e) {
  switch (e->kind) {
    case EExpr::Kind::var:
    case EExpr::Kind::unit_lit:
    case EExpr::Kind::int_lit:
      return e;
    case EExpr::Kind::lam:
      return e_lam(e->span, e->mult, e->name, nullptr, erase(e->a));
    case EExpr::Kind::new_chan:
      return e_new(e->span, nullptr);
    case EExpr::Kind::case_: {
      std::vector<ECaseBranch> bs;
      for (const auto& br : e->branches) bs.push_back({br.label, br.var, erase(br.body)});
      return e_case(e->span, erase(e->a), std::move(bs));
    }
    default: {
      auto copy = std::make_shared<EExpr>(*e);
      if (copy->a) copy->a = erase(copy->a);
      if (copy->b) copy->b = erase(copy->b);
      if (copy->c) copy->c = erase(copy->c);
      for (auto& arg : copy->args) arg = erase(arg);
      return copy;
    }
  }
}

} // namespace ggv
