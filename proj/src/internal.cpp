#include "ggv/internal.hpp"

#include <algorithm>

#include "ggv/relations.hpp"

namespace ggv {

namespace {

std::shared_ptr<ITerm> mk(ITerm::Kind k, Span sp) {
  auto e = std::make_shared<ITerm>();
  e->kind = k;
  e->span = std::move(sp);
  return e;
}

} // namespace

ITermPtr i_var(Span sp, std::string name) {
  auto e = mk(ITerm::Kind::var, std::move(sp));
  e->name = std::move(name);
  return e;
}

ITermPtr i_unit(Span sp) { return mk(ITerm::Kind::unit_lit, std::move(sp)); }

ITermPtr i_int(Span sp, int64_t v) {
  auto e = mk(ITerm::Kind::int_lit, std::move(sp));
  e->int_value = v;
  return e;
}

ITermPtr i_lam(Span sp, Mult m, std::string x, TypePtr ann, ITermPtr body) {
  auto e = mk(ITerm::Kind::lam, std::move(sp));
  e->mult = m;
  e->name = std::move(x);
  e->ann = std::move(ann);
  e->a = std::move(body);
  return e;
}

ITermPtr i_app(Span sp, ITermPtr f, ITermPtr a) {
  auto e = mk(ITerm::Kind::app, std::move(sp));
  e->a = std::move(f);
  e->b = std::move(a);
  return e;
}

ITermPtr i_pair(Span sp, Mult m, ITermPtr a, ITermPtr b) {
  auto e = mk(ITerm::Kind::pair, std::move(sp));
  e->mult = m;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

ITermPtr i_let_pair(Span sp, std::string x, std::string y, ITermPtr bound, ITermPtr body) {
  auto e = mk(ITerm::Kind::let_pair, std::move(sp));
  e->x = std::move(x);
  e->y = std::move(y);
  e->a = std::move(bound);
  e->b = std::move(body);
  return e;
}

ITermPtr i_fork(Span sp, ITermPtr a) {
  auto e = mk(ITerm::Kind::fork, std::move(sp));
  e->a = std::move(a);
  return e;
}

ITermPtr i_new(Span sp, SessionPtr s) {
  auto e = mk(ITerm::Kind::new_chan, std::move(sp));
  e->session = std::move(s);
  return e;
}

ITermPtr i_send(Span sp, ITermPtr payload, ITermPtr chan) {
  auto e = mk(ITerm::Kind::send, std::move(sp));
  e->a = std::move(payload);
  e->b = std::move(chan);
  return e;
}

ITermPtr i_receive(Span sp, ITermPtr chan) {
  auto e = mk(ITerm::Kind::receive, std::move(sp));
  e->a = std::move(chan);
  return e;
}

ITermPtr i_select(Span sp, std::string label, ITermPtr chan) {
  auto e = mk(ITerm::Kind::select, std::move(sp));
  e->name = std::move(label);
  e->a = std::move(chan);
  return e;
}

ITermPtr i_case(Span sp, ITermPtr scrutinee, std::vector<ICaseBranch> branches) {
  auto e = mk(ITerm::Kind::case_, std::move(sp));
  e->a = std::move(scrutinee);
  e->branches = std::move(branches);
  return e;
}

ITermPtr i_close(Span sp, ITermPtr chan) {
  auto e = mk(ITerm::Kind::close, std::move(sp));
  e->a = std::move(chan);
  return e;
}

ITermPtr i_wait(Span sp, ITermPtr chan) {
  auto e = mk(ITerm::Kind::wait, std::move(sp));
  e->a = std::move(chan);
  return e;
}

ITermPtr i_arith(Span sp, ArithOp op, std::vector<ITermPtr> args) {
  auto e = mk(ITerm::Kind::arith, std::move(sp));
  e->op = op;
  e->args = std::move(args);
  return e;
}

ITermPtr i_if(Span sp, ITermPtr cond, ITermPtr then_t, ITermPtr else_t) {
  auto e = mk(ITerm::Kind::if_, std::move(sp));
  e->a = std::move(cond);
  e->b = std::move(then_t);
  e->c = std::move(else_t);
  return e;
}

ITermPtr i_cast(Span sp, ITermPtr body, TypePtr from, TypePtr to, BlameLabel p) {
  auto e = mk(ITerm::Kind::cast, std::move(sp));
  e->a = std::move(body);
  e->from = std::move(from);
  e->to = std::move(to);
  e->label = p;
  return e;
}

ITermPtr i_chan(Span sp, std::string name) {
  auto e = mk(ITerm::Kind::chan, std::move(sp));
  e->name = std::move(name);
  return e;
}

ITermPtr i_cellref(Span sp, std::string name) {
  auto e = mk(ITerm::Kind::cellref, std::move(sp));
  e->name = std::move(name);
  return e;
}

// ---- printing ----

namespace {

void show_i(const ITermPtr& e, std::string& out, bool atom) {
  auto paren = [&](auto f) {
    if (atom) out += '(';
    f();
    if (atom) out += ')';
  };
  switch (e->kind) {
    case ITerm::Kind::var:
    case ITerm::Kind::chan:
    case ITerm::Kind::cellref:
      out += e->name;
      return;
    case ITerm::Kind::unit_lit: out += "()"; return;
    case ITerm::Kind::int_lit: out += std::to_string(e->int_value); return;
    case ITerm::Kind::lam:
      paren([&] {
        out += e->mult == Mult::un ? "λun " : "λlin ";
        out += e->name + ". ";
        show_i(e->a, out, false);
      });
      return;
    case ITerm::Kind::app:
      paren([&] {
        show_i(e->a, out, e->a->kind != ITerm::Kind::app);
        out += ' ';
        show_i(e->b, out, true);
      });
      return;
    case ITerm::Kind::pair:
      out += '(';
      show_i(e->a, out, false);
      out += ", ";
      show_i(e->b, out, false);
      out += ')';
      out += e->mult == Mult::un ? "un" : "lin";
      return;
    case ITerm::Kind::let_pair:
      paren([&] {
        out += "let " + e->x + ", " + e->y + " = ";
        show_i(e->a, out, false);
        out += " in ";
        show_i(e->b, out, false);
      });
      return;
    case ITerm::Kind::fork:
      paren([&] {
        out += "fork ";
        show_i(e->a, out, true);
      });
      return;
    case ITerm::Kind::new_chan:
      out += "new";
      return;
    case ITerm::Kind::send:
      paren([&] {
        out += "send ";
        show_i(e->a, out, true);
        out += ' ';
        show_i(e->b, out, true);
      });
      return;
    case ITerm::Kind::receive:
      paren([&] {
        out += "receive ";
        show_i(e->a, out, true);
      });
      return;
    case ITerm::Kind::select:
      paren([&] {
        out += "select " + e->name + " ";
        show_i(e->a, out, true);
      });
      return;
    case ITerm::Kind::case_:
      paren([&] {
        out += "case ";
        show_i(e->a, out, true);
        out += " of {";
        bool first = true;
        for (const auto& br : e->branches) {
          if (!first) out += ", ";
          first = false;
          out += br.label + ": " + br.var + ". ";
          show_i(br.body, out, false);
        }
        out += '}';
      });
      return;
    case ITerm::Kind::close:
      paren([&] {
        out += "close ";
        show_i(e->a, out, true);
      });
      return;
    case ITerm::Kind::wait:
      paren([&] {
        out += "wait ";
        show_i(e->a, out, true);
      });
      return;
    case ITerm::Kind::arith:
      paren([&] {
        if (e->op == ArithOp::neg) {
          out += '-';
          show_i(e->args[0], out, true);
        } else {
          show_i(e->args[0], out, true);
          out += e->op == ArithOp::add ? " + " : " == ";
          show_i(e->args[1], out, true);
        }
      });
      return;
    case ITerm::Kind::if_:
      paren([&] {
        out += "if ";
        show_i(e->a, out, false);
        out += " then ";
        show_i(e->b, out, false);
        out += " else ";
        show_i(e->c, out, false);
      });
      return;
    case ITerm::Kind::cast: {
      bool leaf = e->a->kind == ITerm::Kind::var || e->a->kind == ITerm::Kind::chan ||
                  e->a->kind == ITerm::Kind::cellref || e->a->kind == ITerm::Kind::unit_lit ||
                  e->a->kind == ITerm::Kind::int_lit || e->a->kind == ITerm::Kind::pair ||
                  e->a->kind == ITerm::Kind::new_chan;
      out += '(';
      show_i(e->a, out, !leaf);
      out += " : " + show(e->from) + " =>" + show(e->label) + " " + show(e->to) + ")";
      return;
    }
  }
}

} // namespace

std::string show(const ITermPtr& e) {
  std::string out;
  show_i(e, out, false);
  return out;
}

// ---- values ----

bool is_value(const ITermPtr& e) {
  switch (e->kind) {
    case ITerm::Kind::unit_lit:
    case ITerm::Kind::int_lit:
    case ITerm::Kind::lam:
    case ITerm::Kind::chan:
    case ITerm::Kind::cellref:
      return true;
    case ITerm::Kind::pair:
      return is_value(e->a) && is_value(e->b);
    case ITerm::Kind::cast: {
      if (!is_value(e->a)) return false;
      const TypePtr& from = e->from;
      const TypePtr& to = e->to;
      // v : G =>p Dyn with un(G)
      if (to->kind == TypeKind::dyn)
        return is_ground(from) && is_un(from);
      // v : GS =>p DC
      if (to->kind == TypeKind::sess && to->sess->kind == SessKind::dc)
        return from->kind == TypeKind::sess && is_ground_session(from->sess);
      // v : T ->m U =>p T' ->n U'
      if (from->kind == TypeKind::fn && to->kind == TypeKind::fn) return true;
      // v : S =>p R with S, R != DC
      if (from->kind == TypeKind::sess && to->kind == TypeKind::sess &&
          from->sess->kind != SessKind::dc && to->sess->kind != SessKind::dc)
        return true;
      return false;
    }
    default:
      return false;
  }
}

// ---- free linear names ----

static void flv_into(const ITermPtr& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->kind == ITerm::Kind::chan) {
    out.insert(e->name);
    return;
  }
  for (const auto& c : {e->a, e->b, e->c}) flv_into(c, out);
  for (const auto& br : e->branches) flv_into(br.body, out);
  for (const auto& a : e->args) flv_into(a, out);
}

std::set<std::string> flv(const ITermPtr& e) {
  std::set<std::string> out;
  flv_into(e, out);
  return out;
}

// ---- substitution ----

ITermPtr subst(const ITermPtr& e, const std::map<std::string, ITermPtr>& sub) {
  if (sub.empty()) return e;
  switch (e->kind) {
    case ITerm::Kind::var: {
      auto it = sub.find(e->name);
      return it == sub.end() ? e : it->second;
    }
    case ITerm::Kind::unit_lit:
    case ITerm::Kind::int_lit:
    case ITerm::Kind::new_chan:
    case ITerm::Kind::chan:
    case ITerm::Kind::cellref:
      return e;
    case ITerm::Kind::lam: {
      auto inner = sub;
      inner.erase(e->name);
      ITermPtr body = subst(e->a, inner);
      if (body == e->a) return e;
      return i_lam(e->span, e->mult, e->name, e->ann, body);
    }
    case ITerm::Kind::let_pair: {
      ITermPtr bound = subst(e->a, sub);
      auto inner = sub;
      inner.erase(e->x);
      inner.erase(e->y);
      ITermPtr body = subst(e->b, inner);
      if (bound == e->a && body == e->b) return e;
      return i_let_pair(e->span, e->x, e->y, bound, body);
    }
    case ITerm::Kind::case_: {
      ITermPtr scrut = subst(e->a, sub);
      std::vector<ICaseBranch> bs;
      bool changed = scrut != e->a;
      for (const auto& br : e->branches) {
        auto inner = sub;
        inner.erase(br.var);
        ITermPtr body = subst(br.body, inner);
        changed = changed || body != br.body;
        bs.push_back({br.label, br.var, body});
      }
      if (!changed) return e;
      return i_case(e->span, scrut, std::move(bs));
    }
    default: {
      auto copy = std::make_shared<ITerm>(*e);
      bool changed = false;
      auto go = [&](ITermPtr& p) {
        if (!p) return;
        ITermPtr q = subst(p, sub);
        changed = changed || q != p;
        p = q;
      };
      go(copy->a);
      go(copy->b);
      go(copy->c);
      for (auto& arg : copy->args) go(arg);
      return changed ? ITermPtr(copy) : e;
    }
  }
}

// ---- internal typing ----

namespace {

void disjoint_or_throw(const Span& sp, const std::set<std::string>& x,
                       const std::set<std::string>& y) {
  for (const auto& n : x)
    if (y.count(n)) throw TypeError(sp, "linear name " + n + " used twice");
}

std::set<std::string> merged(std::set<std::string> a, const std::set<std::string>& b) {
  a.insert(b.begin(), b.end());
  return a;
}

} // namespace

TcResult tc_internal(TypeEnv& env, const ITermPtr& e) {
  switch (e->kind) {
    case ITerm::Kind::var:
    case ITerm::Kind::chan:
    case ITerm::Kind::cellref: {
      const TypePtr* t = env.lookup(e->name);
      if (!t) throw TypeError(e->span, "unbound name " + e->name);
      if (is_lin(*t)) return {*t, {e->name}};
      return {*t, {}};
    }

    case ITerm::Kind::unit_lit: return {t_unit(), {}};
    case ITerm::Kind::int_lit: return {t_int(), {}};

    case ITerm::Kind::lam: {
      if (!e->ann) throw TypeError(e->span, "internal lambda lost its domain type");
      env.push(e->name, e->ann);
      TcResult body = tc_internal(env, e->a);
      env.pop();
      bool lin_arg = is_lin(e->ann);
      if (e->mult == Mult::un) {
        std::set<std::string> expected;
        if (lin_arg) expected.insert(e->name);
        if (body.linear != expected)
          throw TypeError(e->span, "unrestricted lambda captures linear names");
        return {t_fn(Mult::un, e->ann, body.type), {}};
      }
      if (lin_arg) {
        if (!body.linear.count(e->name))
          throw TypeError(e->span, "linear variable " + e->name + " unused");
        body.linear.erase(e->name);
      }
      return {t_fn(Mult::lin, e->ann, body.type), std::move(body.linear)};
    }

    case ITerm::Kind::app: {
      TcResult fn = tc_internal(env, e->a);
      TcResult arg = tc_internal(env, e->b);
      disjoint_or_throw(e->span, fn.linear, arg.linear);
      if (fn.type->kind != TypeKind::fn)
        throw TypeError(e->a->span, "applied a non-function of type " + show(fn.type));
      if (!sub(arg.type, fn.type->lhs))
        throw TypeError(e->b->span, "argument type " + show(arg.type) +
                                        " is not a subtype of " + show(fn.type->lhs));
      return {fn.type->rhs, merged(std::move(fn.linear), arg.linear)};
    }

    case ITerm::Kind::pair: {
      TcResult fst = tc_internal(env, e->a);
      TcResult snd = tc_internal(env, e->b);
      disjoint_or_throw(e->span, fst.linear, snd.linear);
      if (e->mult == Mult::un && (is_lin(fst.type) || is_lin(snd.type)))
        throw TypeError(e->span, "linear component in an unrestricted pair");
      return {t_prod(e->mult, fst.type, snd.type), merged(std::move(fst.linear), snd.linear)};
    }

    case ITerm::Kind::let_pair: {
      TcResult bound = tc_internal(env, e->a);
      if (bound.type->kind != TypeKind::prod)
        throw TypeError(e->a->span, "destructed a non-pair of type " + show(bound.type));
      env.push(e->x, bound.type->lhs);
      env.push(e->y, bound.type->rhs);
      TcResult body = tc_internal(env, e->b);
      env.pop();
      env.pop();
      if (is_lin(bound.type->lhs)) {
        if (!body.linear.count(e->x))
          throw TypeError(e->span, "linear variable " + e->x + " unused");
        body.linear.erase(e->x);
      }
      if (is_lin(bound.type->rhs)) {
        if (!body.linear.count(e->y))
          throw TypeError(e->span, "linear variable " + e->y + " unused");
        body.linear.erase(e->y);
      }
      disjoint_or_throw(e->span, bound.linear, body.linear);
      return {body.type, merged(std::move(bound.linear), body.linear)};
    }

    case ITerm::Kind::fork: {
      TcResult body = tc_internal(env, e->a);
      if (!sub(body.type, t_unit()))
        throw TypeError(e->span, "fork body has type " + show(body.type) + ", expected Unit");
      return {t_unit(), std::move(body.linear)};
    }

    case ITerm::Kind::new_chan: {
      if (!e->session) throw TypeError(e->span, "internal new lost its session type");
      return {t_prod(Mult::lin, t_sess(e->session), t_sess(dual(e->session))), {}};
    }

    case ITerm::Kind::send: {
      TcResult payload = tc_internal(env, e->a);
      TcResult chan = tc_internal(env, e->b);
      disjoint_or_throw(e->span, payload.linear, chan.linear);
      if (chan.type->kind != TypeKind::sess || chan.type->sess->kind != SessKind::send)
        throw TypeError(e->b->span, "send on a non-send channel of type " + show(chan.type));
      if (!sub(payload.type, chan.type->sess->carried))
        throw TypeError(e->a->span, "sent " + show(payload.type) + " where " +
                                        show(chan.type->sess->carried) + " was expected");
      return {t_sess(chan.type->sess->rest), merged(std::move(payload.linear), chan.linear)};
    }

    case ITerm::Kind::receive: {
      TcResult chan = tc_internal(env, e->a);
      if (chan.type->kind != TypeKind::sess || chan.type->sess->kind != SessKind::recv)
        throw TypeError(e->a->span, "receive on a non-receive channel of type " + show(chan.type));
      return {t_prod(Mult::lin, chan.type->sess->carried, t_sess(chan.type->sess->rest)),
              std::move(chan.linear)};
    }

    case ITerm::Kind::select: {
      TcResult chan = tc_internal(env, e->a);
      if (chan.type->kind != TypeKind::sess || chan.type->sess->kind != SessKind::select)
        throw TypeError(e->a->span, "select on a non-select channel of type " + show(chan.type));
      for (const auto& [l, s] : chan.type->sess->branches)
        if (l == e->name) return {t_sess(s), std::move(chan.linear)};
      throw TypeError(e->span, "selected label " + e->name + " is not offered by " +
                                   show(chan.type));
    }

    case ITerm::Kind::case_: {
      TcResult scrut = tc_internal(env, e->a);
      if (scrut.type->kind != TypeKind::sess || scrut.type->sess->kind != SessKind::offer)
        throw TypeError(e->a->span, "case on a non-offer channel of type " + show(scrut.type));
      // width subtyping may leave dead branches; only offered labels are typed
      std::map<std::string, SessionPtr> offered;
      for (const auto& [l, s] : scrut.type->sess->branches) offered[l] = s;
      TypePtr joined;
      std::set<std::string> common;
      bool first = true;
      for (const auto& br : e->branches) {
        auto it = offered.find(br.label);
        if (it == offered.end()) continue;
        offered.erase(it->first);
        env.push(br.var, t_sess(it->second));
        TcResult body = tc_internal(env, br.body);
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
            throw TypeError(e->span, "case branches consume different linear names");
          auto j = join(joined, body.type);
          if (!j) throw TypeError(e->span, "case branch types have no join");
          joined = *j;
        }
      }
      if (!offered.empty())
        throw TypeError(e->span, "case does not cover offered label " + offered.begin()->first);
      disjoint_or_throw(e->span, scrut.linear, common);
      return {joined, merged(std::move(scrut.linear), common)};
    }

    case ITerm::Kind::close: {
      TcResult chan = tc_internal(env, e->a);
      if (!sub(chan.type, t_sess(s_end_out())))
        throw TypeError(e->a->span, "close on " + show(chan.type) + ", expected End!");
      return {t_unit(), std::move(chan.linear)};
    }

    case ITerm::Kind::wait: {
      TcResult chan = tc_internal(env, e->a);
      if (!sub(chan.type, t_sess(s_end_in())))
        throw TypeError(e->a->span, "wait on " + show(chan.type) + ", expected End?");
      return {t_unit(), std::move(chan.linear)};
    }

    case ITerm::Kind::arith: {
      std::set<std::string> used;
      for (const auto& arg : e->args) {
        TcResult r = tc_internal(env, arg);
        if (!sub(r.type, t_int()))
          throw TypeError(arg->span, "arithmetic on " + show(r.type));
        disjoint_or_throw(e->span, used, r.linear);
        used = merged(std::move(used), r.linear);
      }
      return {t_int(), std::move(used)};
    }

    case ITerm::Kind::if_: {
      TcResult cond = tc_internal(env, e->a);
      if (!sub(cond.type, t_int()))
        throw TypeError(e->a->span, "if condition has type " + show(cond.type));
      TcResult then_r = tc_internal(env, e->b);
      TcResult else_r = tc_internal(env, e->c);
      if (then_r.linear != else_r.linear)
        throw TypeError(e->span, "if branches consume different linear names");
      auto j = join(then_r.type, else_r.type);
      if (!j) throw TypeError(e->span, "if branch types have no join");
      disjoint_or_throw(e->span, cond.linear, then_r.linear);
      return {*j, merged(std::move(cond.linear), then_r.linear)};
    }

    case ITerm::Kind::cast: {
      TcResult body = tc_internal(env, e->a);
      if (!sub(body.type, e->from))
        throw TypeError(e->span, "cast source mismatch: body has type " + show(body.type) +
                                     ", cast expects " + show(e->from));
      if (!consistent_sub(e->from, e->to))
        throw TypeError(e->span, "inconsistent cast: " + show(e->from) + " is not a consistent subtype of " +
                                     show(e->to));
      return {e->to, std::move(body.linear)};
    }
  }
  throw InternalError("tc_internal: bad term");
}

// ---- configurations ----

Process Process::make_expr(ITermPtr t) {
  Process p;
  p.kind = Kind::expr;
  p.term = std::move(t);
  return p;
}

Process Process::make_cell(std::string name, ITermPtr payload, TypePtr ground, BlameLabel lbl) {
  Process p;
  p.kind = Kind::cell;
  p.cell_name = std::move(name);
  p.cell_payload = std::move(payload);
  p.cell_ground = std::move(ground);
  p.cell_label = lbl;
  return p;
}

Process Process::make_locked(std::string name, BlameLabel lbl) {
  Process p;
  p.kind = Kind::locked_cell;
  p.cell_name = std::move(name);
  p.cell_label = lbl;
  return p;
}

Process Process::make_blame_pair(BlameLabel p0, BlameLabel q0, std::set<std::string> linears) {
  Process p;
  p.kind = Kind::blame_pair;
  p.blame_p = p0;
  p.blame_q = q0;
  p.blame_linears = std::move(linears);
  return p;
}

Process Process::make_blame_gc(BlameLabel p0, std::set<std::string> linears) {
  Process p;
  p.kind = Kind::blame_gc;
  p.blame_p = p0;
  p.blame_linears = std::move(linears);
  return p;
}

const ChannelPair* Configuration::pair_of(const std::string& endpoint) const {
  for (const auto& ch : channels)
    if (ch.end1 == endpoint || ch.end2 == endpoint) return &ch;
  return nullptr;
}

SessionPtr Configuration::endpoint_type(const std::string& endpoint) const {
  const ChannelPair* ch = pair_of(endpoint);
  if (!ch) return nullptr;
  return ch->end1 == endpoint ? ch->type1 : ch->type2;
}

std::string Configuration::peer(const std::string& endpoint) const {
  const ChannelPair* ch = pair_of(endpoint);
  if (!ch) return "";
  return ch->end1 == endpoint ? ch->end2 : ch->end1;
}

Configuration initial_config(const ITermPtr& term) {
  Configuration cfg;
  cfg.processes.push_back(Process::make_expr(term));
  return cfg;
}

std::string show(const Configuration& cfg) {
  std::string out;
  for (const auto& ch : cfg.channels) out += "(ν" + ch.end1 + "," + ch.end2 + ")";
  for (const auto& a : cfg.live_cells) out += "(ν" + a + ")";
  out += '(';
  bool first = true;
  for (const auto& p : cfg.processes) {
    if (!first) out += " | ";
    first = false;
    switch (p.kind) {
      case Process::Kind::expr:
        out += "⟨" + show(p.term) + "⟩";
        break;
      case Process::Kind::cell:
        out += p.cell_name + " ↦ " + show(p.cell_payload) + " : " + show(p.cell_ground) +
               " =>" + show(p.cell_label) + " Dyn";
        break;
      case Process::Kind::locked_cell:
        out += p.cell_name + " ↦ locked " + show(p.cell_label);
        break;
      case Process::Kind::blame_pair:
      case Process::Kind::blame_gc: {
        out += "blame " + show(p.blame_p);
        if (p.kind == Process::Kind::blame_pair) out += " " + show(p.blame_q);
        out += " {";
        bool f2 = true;
        for (const auto& n : p.blame_linears) {
          if (!f2) out += ",";
          f2 = false;
          out += n;
        }
        out += '}';
        break;
      }
    }
  }
  out += ')';
  return out;
}

std::optional<ConfigTypeError> tc_config(const Configuration& cfg) {
  auto fail = [](std::string m) { return ConfigTypeError{std::move(m)}; };

  // dual channel pairs
  for (const auto& ch : cfg.channels) {
    if (!session_eq(dual(ch.type1), ch.type2))
      return fail("channel (" + ch.end1 + "," + ch.end2 + ") has non-dual types " +
                  show(ch.type1) + " and " + show(ch.type2));
  }

  // each linear name is claimed by at most one process
  std::map<std::string, int> claims;
  auto claim = [&](const std::set<std::string>& names, int proc) -> std::optional<ConfigTypeError> {
    for (const auto& n : names) {
      auto [it, fresh] = claims.emplace(n, proc);
      if (!fresh)
        return fail("endpoint " + n + " appears in processes " + std::to_string(it->second) +
                    " and " + std::to_string(proc));
    }
    return std::nullopt;
  };

  for (size_t i = 0; i < cfg.processes.size(); i++) {
    const Process& p = cfg.processes[i];
    std::set<std::string> used;
    switch (p.kind) {
      case Process::Kind::expr: used = flv(p.term); break;
      case Process::Kind::cell: used = flv(p.cell_payload); break;
      case Process::Kind::locked_cell: break;
      case Process::Kind::blame_pair:
      case Process::Kind::blame_gc: used = p.blame_linears; break;
    }
    if (auto err = claim(used, static_cast<int>(i))) return err;
  }

  // per-process typing
  for (size_t i = 0; i < cfg.processes.size(); i++) {
    const Process& p = cfg.processes[i];
    if (p.kind != Process::Kind::expr && p.kind != Process::Kind::cell) continue;
    const ITermPtr& term = p.kind == Process::Kind::expr ? p.term : p.cell_payload;
    TypeEnv env;
    for (const auto& c : flv(term)) {
      SessionPtr s = cfg.endpoint_type(c);
      if (!s) return fail("process " + std::to_string(i) + " mentions unknown endpoint " + c);
      env.push(c, t_sess(s));
    }
    for (const auto& a : cfg.live_cells) env.push(a, t_dyn());
    try {
      TypeEnv scratch = env;
      TcResult r = tc_internal(scratch, term);
      if (r.linear != flv(term))
        return fail("process " + std::to_string(i) + " linear usage differs from flv");
      if (p.kind == Process::Kind::expr) {
        if (!is_un(r.type))
          return fail("process " + std::to_string(i) + " has linear type " + show(r.type));
      } else {
        if (!sub(r.type, p.cell_ground))
          return fail("cell " + p.cell_name + " payload has type " + show(r.type) +
                      ", expected " + show(p.cell_ground));
        if (!is_lin(p.cell_ground))
          return fail("cell " + p.cell_name + " holds an unrestricted ground type");
      }
    } catch (const TypeError& e) {
      return fail("process " + std::to_string(i) + ": " + e.what());
    }
  }
  return std::nullopt;
}

// ---- blame safety ----

static bool safe_for_go(const ITermPtr& e, const BlameLabel& p) {
  if (!e) return true;
  if (e->kind == ITerm::Kind::cast) {
    if (e->label == p && !pos_sub(e->from, e->to)) return false;
    if (e->label == p.complement() && !neg_sub(e->from, e->to)) return false;
  }
  for (const auto& c : {e->a, e->b, e->c})
    if (!safe_for_go(c, p)) return false;
  for (const auto& br : e->branches)
    if (!safe_for_go(br.body, p)) return false;
  for (const auto& a : e->args)
    if (!safe_for_go(a, p)) return false;
  return true;
}

bool safe_for(const ITermPtr& e, const BlameLabel& p) { return safe_for_go(e, p); }

bool safe_for(const Configuration& cfg, const BlameLabel& p) {
  for (const auto& proc : cfg.processes) {
    switch (proc.kind) {
      case Process::Kind::expr:
        if (!safe_for(proc.term, p)) return false;
        break;
      case Process::Kind::cell:
        // the cell stands for the cast w : G =>q Dyn
        if (proc.cell_label == p && !pos_sub(proc.cell_ground, t_dyn())) return false;
        if (proc.cell_label == p.complement() && !neg_sub(proc.cell_ground, t_dyn()))
          return false;
        if (!safe_for(proc.cell_payload, p)) return false;
        break;
      case Process::Kind::locked_cell:
        // may still blame the complement of its label
        if (proc.cell_label.complement() == p) return false;
        break;
      case Process::Kind::blame_pair:
        if (proc.blame_p == p || proc.blame_q == p) return false;
        break;
      case Process::Kind::blame_gc:
        if (proc.blame_p == p) return false;
        break;
    }
  }
  return true;
}

static void labels_into(const ITermPtr& e, std::vector<BlameLabel>& out) {
  if (!e) return;
  if (e->kind == ITerm::Kind::cast) out.push_back(e->label);
  for (const auto& c : {e->a, e->b, e->c}) labels_into(c, out);
  for (const auto& br : e->branches) labels_into(br.body, out);
  for (const auto& a : e->args) labels_into(a, out);
}

std::vector<BlameLabel> cast_labels(const ITermPtr& e) {
  std::vector<BlameLabel> out;
  labels_into(e, out);
  return out;
}

// ---- canonical forms ----

static void canon_walk(const ITermPtr& e, std::vector<std::string>& out) {
  if (!e) return;
  if (e->kind == ITerm::Kind::cast && is_value(e)) {
    if (e->to->kind == TypeKind::dyn && !(is_ground(e->from) && is_un(e->from)))
      out.push_back("value cast to Dyn from non-ground-unrestricted " + show(e->from));
    if (e->to->kind == TypeKind::sess && e->to->sess->kind == SessKind::dc &&
        !(e->from->kind == TypeKind::sess && is_ground_session(e->from->sess)))
      out.push_back("value cast to DC from non-ground-session " + show(e->from));
  }
  for (const auto& c : {e->a, e->b, e->c}) canon_walk(c, out);
  for (const auto& br : e->branches) canon_walk(br.body, out);
  for (const auto& a : e->args) canon_walk(a, out);
}

std::vector<std::string> canonical_violations(const Configuration& cfg) {
  std::vector<std::string> out;
  for (const auto& p : cfg.processes) {
    if (p.kind == Process::Kind::expr) canon_walk(p.term, out);
    if (p.kind == Process::Kind::cell) canon_walk(p.cell_payload, out);
  }
  return out;
}

} // namespace ggv
