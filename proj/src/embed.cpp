#include "ggv/embed.hpp"

namespace ggv {

namespace {

ITermPtr cast_to_dyn(const ITermPtr& t, const TypePtr& from, LabelAllocator& labels) {
  return i_cast(t->span, t, from, t_dyn(), labels.fresh(t->span, from, t_dyn()));
}

ITermPtr cast_from_dyn(const ITermPtr& t, const TypePtr& to, LabelAllocator& labels) {
  return i_cast(t->span, t, t_dyn(), to, labels.fresh(t->span, t_dyn(), to));
}

ITermPtr go(const EExprPtr& e, LabelAllocator& labels) {
  switch (e->kind) {
    case EExpr::Kind::var:
      return i_var(e->span, e->name);

    case EExpr::Kind::unit_lit:
      return cast_to_dyn(i_unit(e->span), t_unit(), labels);

    case EExpr::Kind::int_lit:
      return cast_to_dyn(i_int(e->span, e->int_value), t_int(), labels);

    case EExpr::Kind::lam:
      return cast_to_dyn(i_lam(e->span, Mult::un, e->name, t_dyn(), go(e->a, labels)),
                         t_fn(Mult::un, t_dyn(), t_dyn()), labels);

    case EExpr::Kind::app:
      return i_app(e->span,
                   cast_from_dyn(go(e->a, labels), t_fn(Mult::lin, t_dyn(), t_dyn()), labels),
                   go(e->b, labels));

    case EExpr::Kind::pair:
      return cast_to_dyn(i_pair(e->span, Mult::un, go(e->a, labels), go(e->b, labels)),
                         t_prod(Mult::un, t_dyn(), t_dyn()), labels);

    case EExpr::Kind::let_pair:
      return i_let_pair(e->span, e->x, e->y,
                        cast_from_dyn(go(e->a, labels), t_prod(Mult::lin, t_dyn(), t_dyn()),
                                      labels),
                        go(e->b, labels));

    case EExpr::Kind::fork:
      return cast_to_dyn(
          i_fork(e->span, cast_from_dyn(go(e->a, labels), t_unit(), labels)), t_unit(), labels);

    case EExpr::Kind::new_chan:
      return cast_to_dyn(i_new(e->span, s_dc()),
                         t_prod(Mult::lin, t_sess(s_dc()), t_sess(s_dc())), labels);

    case EExpr::Kind::send:
      return cast_to_dyn(
          i_send(e->span, go(e->a, labels),
                 cast_from_dyn(go(e->b, labels), t_sess(s_send(t_dyn(), s_dc())), labels)),
          t_sess(s_dc()), labels);

    case EExpr::Kind::receive:
      return cast_to_dyn(
          i_receive(e->span,
                    cast_from_dyn(go(e->a, labels), t_sess(s_recv(t_dyn(), s_dc())), labels)),
          t_prod(Mult::lin, t_dyn(), t_sess(s_dc())), labels);

    case EExpr::Kind::select:
      return cast_to_dyn(
          i_select(e->span, e->name,
                   cast_from_dyn(go(e->a, labels), t_sess(s_select({{e->name, s_dc()}})),
                                 labels)),
          t_sess(s_dc()), labels);

    case EExpr::Kind::case_: {
      Branches offered;
      for (const auto& br : e->branches) offered.emplace_back(br.label, s_dc());
      ITermPtr scrut =
          cast_from_dyn(go(e->a, labels), t_sess(s_offer(std::move(offered))), labels);
      // each branch rebinds its endpoint at Dyn:
      //   l_i: y. let x_i = (y : DC => Dyn) in [e_i]
      std::vector<ICaseBranch> branches;
      for (const auto& br : e->branches) {
        std::string y = br.var + "#chan";
        ITermPtr rebound = cast_to_dyn(i_var(br.body->span, y), t_sess(s_dc()), labels);
        ITermPtr body = i_app(br.body->span,
                              i_lam(br.body->span, Mult::lin, br.var, t_dyn(),
                                    go(br.body, labels)),
                              rebound);
        branches.push_back({br.label, y, body});
      }
      return i_case(e->span, scrut, std::move(branches));
    }

    case EExpr::Kind::close:
      return cast_to_dyn(
          i_close(e->span, cast_from_dyn(go(e->a, labels), t_sess(s_end_out()), labels)),
          t_unit(), labels);

    case EExpr::Kind::wait:
      return cast_to_dyn(
          i_wait(e->span, cast_from_dyn(go(e->a, labels), t_sess(s_end_in()), labels)),
          t_unit(), labels);

    case EExpr::Kind::arith: {
      std::vector<ITermPtr> args;
      for (const auto& a : e->args) args.push_back(cast_from_dyn(go(a, labels), t_int(), labels));
      return cast_to_dyn(i_arith(e->span, e->op, std::move(args)), t_int(), labels);
    }

    case EExpr::Kind::if_:
      return i_if(e->span, cast_from_dyn(go(e->a, labels), t_int(), labels),
                  go(e->b, labels), go(e->c, labels));
  }
  throw InternalError("embed: bad expression");
}

void free_vars(const EExprPtr& e, std::set<std::string>& bound, std::set<std::string>& out) {
  if (!e) return;
  switch (e->kind) {
    case EExpr::Kind::var:
      if (!bound.count(e->name)) out.insert(e->name);
      return;
    case EExpr::Kind::lam: {
      bool fresh = bound.insert(e->name).second;
      free_vars(e->a, bound, out);
      if (fresh) bound.erase(e->name);
      return;
    }
    case EExpr::Kind::let_pair: {
      free_vars(e->a, bound, out);
      bool fx = bound.insert(e->x).second;
      bool fy = bound.insert(e->y).second;
      free_vars(e->b, bound, out);
      if (fx) bound.erase(e->x);
      if (fy) bound.erase(e->y);
      return;
    }
    case EExpr::Kind::case_: {
      free_vars(e->a, bound, out);
      for (const auto& br : e->branches) {
        bool f = bound.insert(br.var).second;
        free_vars(br.body, bound, out);
        if (f) bound.erase(br.var);
      }
      return;
    }
    default:
      for (const auto& c : {e->a, e->b, e->c}) free_vars(c, bound, out);
      for (const auto& a : e->args) free_vars(a, bound, out);
      return;
  }
}

} // namespace

ITermPtr embed(const EExprPtr& e, LabelAllocator& labels) {
  if (!is_annotation_free(e))
    throw InternalError("embed: expression carries type annotations");
  return go(e, labels);
}

void check_embedding(const EExprPtr& e) {
  LabelAllocator labels;
  ITermPtr t = embed(e, labels);
  TypeEnv env;
  std::set<std::string> bound, free;
  free_vars(e, bound, free);
  for (const auto& v : free) env.push(v, t_dyn());
  TcResult r = tc_internal(env, t);
  if (r.type->kind != TypeKind::dyn)
    throw TypeError(e->span,
                    "embedding did not produce type Dyn but " + show(r.type));
}

} // namespace ggv
