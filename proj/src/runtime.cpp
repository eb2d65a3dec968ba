#include "ggv/runtime.hpp"

#include <algorithm>

#include "ggv/relations.hpp"

namespace ggv {

namespace {

using Rebuild = std::function<ITermPtr(const ITermPtr&)>;

// What a single process can do at its unique redex position.
struct Analysis {
  enum class Kind {
    value,
    step,          // expression-level rule already applied
    local_proc,    // collapse/collide pair at the redex
    cell_alloc,    // v : G =>p Dyn with lin(G), not under [] : Dyn =>q H
    cell_read,     // a : Dyn =>q H
    prim,          // fork / new / blocked communication on a bare endpoint
    endpoint_cast, // c : DC =>p GS
    error
  };

  Kind kind = Kind::value;

  ITermPtr result;  // step
  std::string rule; // step

  ITermPtr redex; // the redex subterm (identity matters for the intercept)
  Rebuild rebuild;

  // local_proc
  bool session_pair = false;
  ITermPtr inner_value;
  TypePtr ground_from, ground_to;
  BlameLabel p{0, false}, q{0, false};

  // cell_alloc / cell_read
  std::string ref;
  TypePtr read_to;

  // prim
  ITerm::Kind op = ITerm::Kind::unit_lit;
  std::string chan;
  ITermPtr payload;                              // send
  std::string sel_label;                         // select
  const std::vector<ICaseBranch>* branches = nullptr; // case

  // endpoint_cast
  SessionPtr target;

  // error
  ErrorShape err{0, ""};
  bool open_name = false;
};

Analysis value_result() { return {}; }

Analysis step_result(ITermPtr t, std::string rule) {
  Analysis a;
  a.kind = Analysis::Kind::step;
  a.result = std::move(t);
  a.rule = std::move(rule);
  return a;
}

Analysis error_result(int case_no, std::string detail, bool open_name = false) {
  Analysis a;
  a.kind = Analysis::Kind::error;
  a.err = {case_no, std::move(detail)};
  a.open_name = open_name;
  return a;
}

// Wraps a child analysis with the parent context frame.
Analysis lift(Analysis child, const std::function<ITermPtr(const ITermPtr&)>& frame) {
  switch (child.kind) {
    case Analysis::Kind::step:
      child.result = frame(child.result);
      return child;
    case Analysis::Kind::value:
    case Analysis::Kind::error:
      return child;
    default: {
      Rebuild inner = child.rebuild;
      child.rebuild = [inner, frame](const ITermPtr& x) { return frame(inner(x)); };
      return child;
    }
  }
}

bool is_identity_base(const TypePtr& t) {
  return t->kind == TypeKind::dyn || t->kind == TypeKind::unit || t->kind == TypeKind::int_ ||
         (t->kind == TypeKind::sess && t->sess->kind == SessKind::dc);
}

Analysis analyze(const ITermPtr& e);

// Ground types as used by the reduction rules: the factoring target grammar,
// where every session type grounds to DC.
bool is_factor_ground(const TypePtr& t) {
  return t->kind != TypeKind::dyn && type_eq(t, factor_ground_of(t));
}

Analysis analyze_children2(const ITermPtr& a, const ITermPtr& b,
                           const std::function<ITermPtr(const ITermPtr&, const ITermPtr&)>& make,
                           const std::function<Analysis()>& both_values) {
  Analysis aa = analyze(a);
  if (aa.kind != Analysis::Kind::value)
    return lift(std::move(aa), [make, b](const ITermPtr& x) { return make(x, b); });
  Analysis ab = analyze(b);
  if (ab.kind != Analysis::Kind::value)
    return lift(std::move(ab), [make, a](const ITermPtr& x) { return make(a, x); });
  return both_values();
}

// cast value shapes
bool is_fn_cast_value(const ITermPtr& v) {
  return v->kind == ITerm::Kind::cast && v->from->kind == TypeKind::fn &&
         v->to->kind == TypeKind::fn && is_value(v->a);
}

bool is_session_cast(const ITermPtr& v, SessKind from_kind, SessKind to_kind) {
  return v->kind == ITerm::Kind::cast && v->from->kind == TypeKind::sess &&
         v->to->kind == TypeKind::sess && v->from->sess->kind == from_kind &&
         v->to->sess->kind == to_kind && is_value(v->a);
}

Analysis analyze_comm(const ITermPtr& redex, const ITermPtr& chan_value, ITerm::Kind op,
                      ITermPtr payload, std::string sel_label,
                      const std::vector<ICaseBranch>* branches,
                      const std::function<ITermPtr(const ITermPtr&)>& frame) {
  if (chan_value->kind == ITerm::Kind::chan) {
    Analysis a;
    a.kind = Analysis::Kind::prim;
    a.op = op;
    a.chan = chan_value->name;
    a.payload = std::move(payload);
    a.sel_label = std::move(sel_label);
    a.branches = branches;
    a.redex = redex;
    a.rebuild = frame;
    return a;
  }
  return error_result(1, "communication primitive applied to a non-channel value");
}

Analysis analyze(const ITermPtr& e) {
  switch (e->kind) {
    case ITerm::Kind::unit_lit:
    case ITerm::Kind::int_lit:
    case ITerm::Kind::lam:
    case ITerm::Kind::chan:
    case ITerm::Kind::cellref:
      return value_result();

    case ITerm::Kind::var:
      return error_result(0, "free variable " + e->name, true);

    case ITerm::Kind::app:
      return analyze_children2(
          e->a, e->b,
          [e](const ITermPtr& x, const ITermPtr& y) { return i_app(e->span, x, y); },
          [&]() -> Analysis {
            const ITermPtr& f = e->a;
            const ITermPtr& v = e->b;
            if (f->kind == ITerm::Kind::lam)
              return step_result(subst(f->a, {{f->name, v}}), "beta");
            if (is_fn_cast_value(f)) {
              // wrap: (v : T->mU =>p T'->nU') w -> (v (w : T' =>p~ T)) : U =>p U'
              ITermPtr arg = i_cast(e->span, v, f->to->lhs, f->from->lhs,
                                    f->label.complement());
              ITermPtr out = i_cast(e->span, i_app(e->span, f->a, arg), f->from->rhs,
                                    f->to->rhs, f->label);
              return step_result(out, "wrap");
            }
            return error_result(1, "applied a value that is not an abstraction");
          });

    case ITerm::Kind::pair: {
      return analyze_children2(
          e->a, e->b,
          [e](const ITermPtr& x, const ITermPtr& y) { return i_pair(e->span, e->mult, x, y); },
          []() { return value_result(); });
    }

    case ITerm::Kind::let_pair: {
      Analysis aa = analyze(e->a);
      if (aa.kind != Analysis::Kind::value)
        return lift(std::move(aa), [e](const ITermPtr& x) {
          return i_let_pair(e->span, e->x, e->y, x, e->b);
        });
      if (e->a->kind == ITerm::Kind::pair)
        return step_result(subst(e->b, {{e->x, e->a->a}, {e->y, e->a->b}}), "let-pair");
      return error_result(2, "destructed a value that is not a pair");
    }

    case ITerm::Kind::fork: {
      Analysis a;
      a.kind = Analysis::Kind::prim;
      a.op = ITerm::Kind::fork;
      a.payload = e->a;
      a.redex = e;
      a.rebuild = [](const ITermPtr& x) { return x; };
      return a;
    }

    case ITerm::Kind::new_chan: {
      Analysis a;
      a.kind = Analysis::Kind::prim;
      a.op = ITerm::Kind::new_chan;
      a.redex = e;
      a.rebuild = [](const ITermPtr& x) { return x; };
      return a;
    }

    case ITerm::Kind::send:
      return analyze_children2(
          e->a, e->b,
          [e](const ITermPtr& x, const ITermPtr& y) { return i_send(e->span, x, y); },
          [&]() -> Analysis {
            const ITermPtr& w = e->b;
            if (is_session_cast(w, SessKind::send, SessKind::send)) {
              // send v (w : !T.S =>p !T'.S') -> (send (v : T' =>p~ T) w) : S =>p S'
              const TypePtr& tc = w->from->sess->carried;
              const TypePtr& tc2 = w->to->sess->carried;
              ITermPtr v2 = i_cast(e->span, e->a, tc2, tc, w->label.complement());
              ITermPtr out = i_cast(e->span, i_send(e->span, v2, w->a),
                                    t_sess(w->from->sess->rest), t_sess(w->to->sess->rest),
                                    w->label);
              return step_result(out, "cast-send");
            }
            return analyze_comm(e, w, ITerm::Kind::send, e->a, "", nullptr,
                                [](const ITermPtr& x) { return x; });
          });

    case ITerm::Kind::receive: {
      Analysis aa = analyze(e->a);
      if (aa.kind != Analysis::Kind::value)
        return lift(std::move(aa),
                    [e](const ITermPtr& x) { return i_receive(e->span, x); });
      const ITermPtr& w = e->a;
      if (is_session_cast(w, SessKind::recv, SessKind::recv)) {
        ITermPtr out = i_cast(
            e->span, i_receive(e->span, w->a),
            t_prod(Mult::lin, w->from->sess->carried, t_sess(w->from->sess->rest)),
            t_prod(Mult::lin, w->to->sess->carried, t_sess(w->to->sess->rest)), w->label);
        return step_result(out, "cast-receive");
      }
      return analyze_comm(e, w, ITerm::Kind::receive, nullptr, "", nullptr,
                          [](const ITermPtr& x) { return x; });
    }

    case ITerm::Kind::select: {
      Analysis aa = analyze(e->a);
      if (aa.kind != Analysis::Kind::value)
        return lift(std::move(aa),
                    [e](const ITermPtr& x) { return i_select(e->span, e->name, x); });
      const ITermPtr& w = e->a;
      if (is_session_cast(w, SessKind::select, SessKind::select)) {
        SessionPtr rk, sk;
        for (const auto& [l, s] : w->from->sess->branches)
          if (l == e->name) rk = s;
        for (const auto& [l, s] : w->to->sess->branches)
          if (l == e->name) sk = s;
        if (!rk || !sk) return error_result(1, "selected label missing from select cast");
        ITermPtr out = i_cast(e->span, i_select(e->span, e->name, w->a), t_sess(rk),
                              t_sess(sk), w->label);
        return step_result(out, "cast-select");
      }
      return analyze_comm(e, w, ITerm::Kind::select, nullptr, e->name, nullptr,
                          [](const ITermPtr& x) { return x; });
    }

    case ITerm::Kind::case_: {
      Analysis aa = analyze(e->a);
      if (aa.kind != Analysis::Kind::value)
        return lift(std::move(aa), [e](const ITermPtr& x) {
          return i_case(e->span, x, e->branches);
        });
      const ITermPtr& w = e->a;
      if (is_session_cast(w, SessKind::offer, SessKind::offer)) {
        // shrink to the cast's source label set, re-casting each binder
        std::vector<ICaseBranch> out;
        for (const auto& [l, ri] : w->from->sess->branches) {
          SessionPtr si;
          for (const auto& [l2, s2] : w->to->sess->branches)
            if (l2 == l) si = s2;
          const ICaseBranch* orig = nullptr;
          for (const auto& br : e->branches)
            if (br.label == l) orig = &br;
          if (!si || !orig) return error_result(1, "case cast with uncovered label " + l);
          ITermPtr recast = i_cast(orig->body->span, i_var(orig->body->span, orig->var),
                                   t_sess(ri), t_sess(si), w->label);
          ITermPtr body = i_app(orig->body->span,
                                i_lam(orig->body->span, Mult::lin, orig->var, t_sess(si),
                                      orig->body),
                                recast);
          out.push_back({l, orig->var, body});
        }
        return step_result(i_case(e->span, w->a, std::move(out)), "cast-case");
      }
      return analyze_comm(e, w, ITerm::Kind::case_, nullptr, "", &e->branches,
                          [](const ITermPtr& x) { return x; });
    }

    case ITerm::Kind::close: {
      Analysis aa = analyze(e->a);
      if (aa.kind != Analysis::Kind::value)
        return lift(std::move(aa), [e](const ITermPtr& x) { return i_close(e->span, x); });
      const ITermPtr& w = e->a;
      if (is_session_cast(w, SessKind::end_out, SessKind::end_out))
        return step_result(i_close(e->span, w->a), "cast-close");
      return analyze_comm(e, w, ITerm::Kind::close, nullptr, "", nullptr,
                          [](const ITermPtr& x) { return x; });
    }

    case ITerm::Kind::wait: {
      Analysis aa = analyze(e->a);
      if (aa.kind != Analysis::Kind::value)
        return lift(std::move(aa), [e](const ITermPtr& x) { return i_wait(e->span, x); });
      const ITermPtr& w = e->a;
      if (is_session_cast(w, SessKind::end_in, SessKind::end_in))
        return step_result(i_wait(e->span, w->a), "cast-wait");
      return analyze_comm(e, w, ITerm::Kind::wait, nullptr, "", nullptr,
                          [](const ITermPtr& x) { return x; });
    }

    case ITerm::Kind::arith: {
      for (size_t i = 0; i < e->args.size(); i++) {
        Analysis ai = analyze(e->args[i]);
        if (ai.kind != Analysis::Kind::value) {
          auto frame = [e, i](const ITermPtr& x) {
            auto args = e->args;
            args[i] = x;
            return i_arith(e->span, e->op, std::move(args));
          };
          return lift(std::move(ai), frame);
        }
      }
      for (const auto& a : e->args)
        if (a->kind != ITerm::Kind::int_lit)
          return error_result(1, "arithmetic on a non-integer value");
      int64_t result = 0;
      switch (e->op) {
        case ArithOp::add: result = e->args[0]->int_value + e->args[1]->int_value; break;
        case ArithOp::neg: result = -e->args[0]->int_value; break;
        case ArithOp::eq: result = e->args[0]->int_value == e->args[1]->int_value ? 1 : 0; break;
      }
      return step_result(i_int(e->span, result), "arith");
    }

    case ITerm::Kind::if_: {
      Analysis aa = analyze(e->a);
      if (aa.kind != Analysis::Kind::value)
        return lift(std::move(aa),
                    [e](const ITermPtr& x) { return i_if(e->span, x, e->b, e->c); });
      if (e->a->kind != ITerm::Kind::int_lit)
        return error_result(1, "if condition is not an integer value");
      return e->a->int_value != 0 ? step_result(e->b, "if-true")
                                  : step_result(e->c, "if-false");
    }

    case ITerm::Kind::cast: {
      Analysis aa = analyze(e->a);
      if (aa.kind != Analysis::Kind::value) {
        // redex priority: collapse/collide wins over cell allocation when the
        // allocation would happen immediately under [] : Dyn =>q H
        if (aa.kind == Analysis::Kind::cell_alloc && aa.redex == e->a &&
            e->from->kind == TypeKind::dyn && is_factor_ground(e->to)) {
          Analysis a;
          a.kind = Analysis::Kind::local_proc;
          a.session_pair = false;
          a.inner_value = e->a->a;
          a.ground_from = e->a->from;
          a.ground_to = e->to;
          a.p = e->a->label;
          a.q = e->label;
          a.redex = e;
          a.rebuild = [](const ITermPtr& x) { return x; };
          return a;
        }
        return lift(std::move(aa), [e](const ITermPtr& x) {
          return i_cast(e->span, x, e->from, e->to, e->label);
        });
      }

      const ITermPtr& v = e->a;
      const TypePtr& from = e->from;
      const TypePtr& to = e->to;

      // identity casts at Dyn, DC, Unit, Int
      if (type_eq(from, to) && is_identity_base(from))
        return step_result(v, "cast-id");

      // pair casts distribute
      if (from->kind == TypeKind::prod && to->kind == TypeKind::prod) {
        if (v->kind != ITerm::Kind::pair)
          return error_result(2, "product cast over a non-pair value");
        ITermPtr fst = i_cast(e->span, v->a, from->lhs, to->lhs, e->label);
        ITermPtr snd = i_cast(e->span, v->b, from->rhs, to->rhs, e->label);
        return step_result(i_pair(e->span, to->mult, fst, snd), "cast-pair");
      }

      // casts to Dyn
      if (to->kind == TypeKind::dyn) {
        TypePtr g = factor_ground_of(from);
        if (!type_eq(from, g)) {
          ITermPtr inner = i_cast(e->span, v, from, g, e->label);
          return step_result(i_cast(e->span, inner, g, t_dyn(), e->label), "ground-to-dyn");
        }
        if (is_un(from)) return value_result(); // v : G =>p Dyn value form
        Analysis a; // linear ground: allocate a cell
        a.kind = Analysis::Kind::cell_alloc;
        a.inner_value = v;
        a.ground_from = from;
        a.p = e->label;
        a.redex = e;
        a.rebuild = [](const ITermPtr& x) { return x; };
        return a;
      }

      // casts from Dyn
      if (from->kind == TypeKind::dyn) {
        if (is_factor_ground(to)) {
          if (v->kind == ITerm::Kind::cellref) {
            Analysis a;
            a.kind = Analysis::Kind::cell_read;
            a.ref = v->name;
            a.read_to = to;
            a.q = e->label;
            a.redex = e;
            a.rebuild = [](const ITermPtr& x) { return x; };
            return a;
          }
          if (v->kind == ITerm::Kind::cast && v->to->kind == TypeKind::dyn) {
            Analysis a; // collapse/collide
            a.kind = Analysis::Kind::local_proc;
            a.session_pair = false;
            a.inner_value = v->a;
            a.ground_from = v->from;
            a.ground_to = to;
            a.p = v->label;
            a.q = e->label;
            a.redex = e;
            a.rebuild = [](const ITermPtr& x) { return x; };
            return a;
          }
          return error_result(1, "ill-formed value of type Dyn");
        }
        TypePtr g = factor_ground_of(to);
        ITermPtr inner = i_cast(e->span, v, t_dyn(), g, e->label);
        return step_result(i_cast(e->span, inner, g, to, e->label), "ground-from-dyn");
      }

      if (from->kind == TypeKind::sess && to->kind == TypeKind::sess) {
        const SessionPtr& s = from->sess;
        const SessionPtr& r = to->sess;

        // casts to DC
        if (r->kind == SessKind::dc) {
          SessionPtr gs = ground_session_of(s);
          if (!session_eq(s, gs)) {
            ITermPtr inner = i_cast(e->span, v, from, t_sess(gs), e->label);
            return step_result(i_cast(e->span, inner, t_sess(gs), t_sess(s_dc()), e->label),
                               "ground-to-dc");
          }
          return value_result(); // v : GS =>p DC
        }

        // casts from DC
        if (s->kind == SessKind::dc) {
          if (is_ground_session(r)) {
            if (v->kind == ITerm::Kind::chan) {
              Analysis a;
              a.kind = Analysis::Kind::endpoint_cast;
              a.chan = v->name;
              a.target = r;
              a.p = e->label;
              a.redex = e;
              a.rebuild = [](const ITermPtr& x) { return x; };
              return a;
            }
            if (v->kind == ITerm::Kind::cast && v->to->kind == TypeKind::sess &&
                v->to->sess->kind == SessKind::dc) {
              Analysis a; // session collapse/collide
              a.kind = Analysis::Kind::local_proc;
              a.session_pair = true;
              a.inner_value = v->a;
              a.ground_from = v->from;
              a.ground_to = to;
              a.p = v->label;
              a.q = e->label;
              a.redex = e;
              a.rebuild = [](const ITermPtr& x) { return x; };
              return a;
            }
            return error_result(1, "ill-formed value of type DC");
          }
          SessionPtr gr = ground_session_of(r);
          ITermPtr inner = i_cast(e->span, v, t_sess(s_dc()), t_sess(gr), e->label);
          return step_result(i_cast(e->span, inner, t_sess(gr), to, e->label),
                             "ground-from-dc");
        }

        // session-to-session casts without DC at either end are values
        return value_result();
      }

      if (from->kind == TypeKind::fn && to->kind == TypeKind::fn)
        return value_result();

      return error_result(1, "stuck cast from " + show(from) + " to " + show(to));
    }
  }
  throw InternalError("analyze: bad term");
}

std::set<std::string> refs_of(const ITermPtr& e) {
  std::set<std::string> out;
  std::function<void(const ITermPtr&)> go = [&](const ITermPtr& t) {
    if (!t) return;
    if (t->kind == ITerm::Kind::cellref) out.insert(t->name);
    for (const auto& c : {t->a, t->b, t->c}) go(c);
    for (const auto& br : t->branches) go(br.body);
    for (const auto& a : t->args) go(a);
  };
  go(e);
  return out;
}

// flv of the evaluation context: the term with the redex replaced by ().
std::set<std::string> flv_of_context(const Analysis& a) {
  return flv(a.rebuild(i_unit({})));
}

struct Enabled {
  std::string rule;
  std::vector<size_t> procs;
  // how to apply
  enum class What {
    expr_step, local_proc, cell_alloc, cell_read, fork, new_chan,
    send_recv, select_case, close_wait, endpoint_sync
  } what;
  size_t i = 0, j = 0;       // process indices (i primary)
  size_t chan_index = 0;     // joint redexes
};

struct Analyzed {
  std::vector<std::optional<Analysis>> per_process;
};

const char* local_rule_name(const Analysis& a, bool collapses) {
  if (a.session_pair) return collapses ? "collapse-session" : "collide-session";
  return collapses ? "collapse" : "collide";
}

bool agree_ops(const Analysis& x, const Analysis& y) {
  if (x.op == ITerm::Kind::send && y.op == ITerm::Kind::receive) return true;
  if (x.op == ITerm::Kind::receive && y.op == ITerm::Kind::send) return true;
  if (x.op == ITerm::Kind::close && y.op == ITerm::Kind::wait) return true;
  if (x.op == ITerm::Kind::wait && y.op == ITerm::Kind::close) return true;
  if (x.op == ITerm::Kind::select && y.op == ITerm::Kind::case_) {
    for (const auto& br : *y.branches)
      if (br.label == x.sel_label) return true;
    return false;
  }
  if (x.op == ITerm::Kind::case_ && y.op == ITerm::Kind::select) return agree_ops(y, x);
  return false;
}

std::vector<Enabled> enabled_redexes(const Configuration& cfg, Analyzed& analyzed) {
  std::vector<Enabled> out;
  analyzed.per_process.assign(cfg.processes.size(), std::nullopt);

  for (size_t i = 0; i < cfg.processes.size(); i++) {
    const Process& p = cfg.processes[i];
    if (p.kind != Process::Kind::expr) continue;
    analyzed.per_process[i] = analyze(p.term);
    const Analysis& a = *analyzed.per_process[i];
    switch (a.kind) {
      case Analysis::Kind::step:
        out.push_back({a.rule, {i}, Enabled::What::expr_step, i});
        break;
      case Analysis::Kind::local_proc:
        out.push_back({local_rule_name(a, a.session_pair
                                              ? sub_session(a.ground_from->sess, a.ground_to->sess)
                                              : sub(a.ground_from, a.ground_to)),
                       {i},
                       Enabled::What::local_proc,
                       i});
        break;
      case Analysis::Kind::cell_alloc:
        out.push_back({"cell-alloc", {i}, Enabled::What::cell_alloc, i});
        break;
      case Analysis::Kind::cell_read: {
        for (size_t k = 0; k < cfg.processes.size(); k++) {
          const Process& cell = cfg.processes[k];
          if ((cell.kind == Process::Kind::cell || cell.kind == Process::Kind::locked_cell) &&
              cell.cell_name == a.ref) {
            out.push_back({cell.kind == Process::Kind::cell ? "cell-read" : "cell-locked-blame",
                           {i, k},
                           Enabled::What::cell_read,
                           i,
                           k});
            break;
          }
        }
        break;
      }
      case Analysis::Kind::prim:
        if (a.op == ITerm::Kind::fork)
          out.push_back({"fork", {i}, Enabled::What::fork, i});
        else if (a.op == ITerm::Kind::new_chan)
          out.push_back({"new", {i}, Enabled::What::new_chan, i});
        break; // communications handled as joint redexes below
      default:
        break;
    }
  }

  // joint redexes per channel
  for (size_t ci = 0; ci < cfg.channels.size(); ci++) {
    const ChannelPair& ch = cfg.channels[ci];
    if (ch.consumed) continue;
    std::optional<size_t> pi, pj;
    for (size_t i = 0; i < cfg.processes.size(); i++) {
      if (!analyzed.per_process[i]) continue;
      const Analysis& a = *analyzed.per_process[i];
      if ((a.kind == Analysis::Kind::prim &&
           (a.op == ITerm::Kind::send || a.op == ITerm::Kind::receive ||
            a.op == ITerm::Kind::select || a.op == ITerm::Kind::case_ ||
            a.op == ITerm::Kind::close || a.op == ITerm::Kind::wait)) ||
          a.kind == Analysis::Kind::endpoint_cast) {
        if (a.chan == ch.end1) pi = i;
        if (a.chan == ch.end2) pj = i;
      }
    }
    if (!pi || !pj || *pi == *pj) continue;
    const Analysis& x = *analyzed.per_process[*pi];
    const Analysis& y = *analyzed.per_process[*pj];
    if (x.kind == Analysis::Kind::endpoint_cast && y.kind == Analysis::Kind::endpoint_cast) {
      bool ok = sub_session(dual(x.target), y.target);
      Enabled en{ok ? "endpoint-collapse" : "endpoint-collide",
                 {*pi, *pj},
                 Enabled::What::endpoint_sync,
                 *pi,
                 *pj};
      en.chan_index = ci;
      out.push_back(en);
    } else if (x.kind == Analysis::Kind::prim && y.kind == Analysis::Kind::prim &&
               agree_ops(x, y)) {
      Enabled en{"", {*pi, *pj}, Enabled::What::send_recv, *pi, *pj};
      en.chan_index = ci;
      if (x.op == ITerm::Kind::send || y.op == ITerm::Kind::send) {
        en.rule = "send-recv";
        en.what = Enabled::What::send_recv;
        if (x.op != ITerm::Kind::send) std::swap(en.i, en.j);
      } else if (x.op == ITerm::Kind::select || y.op == ITerm::Kind::select) {
        en.rule = "select-case";
        en.what = Enabled::What::select_case;
        if (x.op != ITerm::Kind::select) std::swap(en.i, en.j);
      } else {
        en.rule = "close-wait";
        en.what = Enabled::What::close_wait;
        if (x.op != ITerm::Kind::close) std::swap(en.i, en.j);
      }
      out.push_back(en);
    }
  }
  return out;
}

void advance_endpoint(Configuration& cfg, size_t chan_index, const std::string& endpoint,
                      const SessionPtr& next) {
  ChannelPair& ch = cfg.channels[chan_index];
  if (ch.end1 == endpoint) ch.type1 = next;
  else ch.type2 = next;
}

void apply_redex(Configuration& cfg, const Enabled& en, const Analyzed& analyzed,
                 std::vector<BlameInfo>* blames, int64_t step_no) {
  auto blame_pair = [&](size_t proc, BlameLabel p, BlameLabel q,
                        std::set<std::string> linears) {
    cfg.processes[proc] = Process::make_blame_pair(p, q, linears);
    if (blames) blames->push_back({false, p, q, std::move(linears), step_no});
  };

  switch (en.what) {
    case Enabled::What::expr_step: {
      const Analysis& a = *analyzed.per_process[en.i];
      cfg.processes[en.i].term = a.result;
      return;
    }
    case Enabled::What::local_proc: {
      const Analysis& a = *analyzed.per_process[en.i];
      bool ok = a.session_pair ? sub_session(a.ground_from->sess, a.ground_to->sess)
                               : sub(a.ground_from, a.ground_to);
      if (ok) {
        cfg.processes[en.i].term = a.rebuild(a.inner_value);
      } else {
        std::set<std::string> x = flv_of_context(a);
        for (const auto& n : flv(a.inner_value)) x.insert(n);
        blame_pair(en.i, a.p.complement(), a.q, std::move(x));
      }
      return;
    }
    case Enabled::What::cell_alloc: {
      const Analysis& a = *analyzed.per_process[en.i];
      std::string name = "a" + std::to_string(cfg.next_cell++);
      cfg.processes[en.i].term = a.rebuild(i_cellref(a.redex->span, name));
      cfg.processes.push_back(
          Process::make_cell(name, a.inner_value, a.ground_from, a.p));
      cfg.live_cells.push_back(name);
      return;
    }
    case Enabled::What::cell_read: {
      const Analysis& a = *analyzed.per_process[en.i];
      Process& cell = cfg.processes[en.j];
      if (cell.kind == Process::Kind::cell) {
        ITermPtr inner = i_cast(a.redex->span, cell.cell_payload, cell.cell_ground, t_dyn(),
                                cell.cell_label);
        ITermPtr whole = i_cast(a.redex->span, inner, t_dyn(), a.read_to, a.q);
        cfg.processes[en.i].term = a.rebuild(whole);
        cfg.processes[en.j] = Process::make_locked(cell.cell_name, cell.cell_label);
      } else {
        // second access: blame both dynamic-side casts, keep the locked cell
        blame_pair(en.i, cell.cell_label.complement(), a.q, flv_of_context(a));
      }
      return;
    }
    case Enabled::What::fork: {
      const Analysis& a = *analyzed.per_process[en.i];
      ITermPtr body = a.payload;
      cfg.processes[en.i].term = a.rebuild(i_unit(a.redex->span));
      cfg.processes.push_back(Process::make_expr(body));
      return;
    }
    case Enabled::What::new_chan: {
      const Analysis& a = *analyzed.per_process[en.i];
      int64_t k = cfg.next_channel++;
      std::string c1 = "c" + std::to_string(2 * k);
      std::string c2 = "c" + std::to_string(2 * k + 1);
      SessionPtr s = a.redex->session ? a.redex->session : s_dc();
      cfg.channels.push_back({c1, c2, s, dual(s), false});
      ITermPtr pair = i_pair(a.redex->span, Mult::lin, i_chan(a.redex->span, c1),
                             i_chan(a.redex->span, c2));
      cfg.processes[en.i].term = a.rebuild(pair);
      return;
    }
    case Enabled::What::send_recv: {
      const Analysis& s = *analyzed.per_process[en.i];
      const Analysis& r = *analyzed.per_process[en.j];
      SessionPtr st = cfg.endpoint_type(s.chan);
      SessionPtr rt = cfg.endpoint_type(r.chan);
      if (!st || st->kind != SessKind::send || !rt || rt->kind != SessKind::recv)
        throw InternalError("send-recv rendezvous on mistyped channel");
      cfg.processes[en.i].term = s.rebuild(i_chan(s.redex->span, s.chan));
      ITermPtr pair =
          i_pair(r.redex->span, Mult::lin, s.payload, i_chan(r.redex->span, r.chan));
      cfg.processes[en.j].term = r.rebuild(pair);
      advance_endpoint(cfg, en.chan_index, s.chan, st->rest);
      advance_endpoint(cfg, en.chan_index, r.chan, rt->rest);
      return;
    }
    case Enabled::What::select_case: {
      const Analysis& s = *analyzed.per_process[en.i];
      const Analysis& c = *analyzed.per_process[en.j];
      SessionPtr st = cfg.endpoint_type(s.chan);
      SessionPtr ct = cfg.endpoint_type(c.chan);
      if (!st || st->kind != SessKind::select || !ct || ct->kind != SessKind::offer)
        throw InternalError("select-case rendezvous on mistyped channel");
      const ICaseBranch* br = nullptr;
      for (const auto& b : *c.branches)
        if (b.label == s.sel_label) br = &b;
      if (!br) throw InternalError("select-case rendezvous without matching branch");
      cfg.processes[en.i].term = s.rebuild(i_chan(s.redex->span, s.chan));
      cfg.processes[en.j].term =
          c.rebuild(subst(br->body, {{br->var, i_chan(c.redex->span, c.chan)}}));
      SessionPtr s_next, c_next;
      for (const auto& [l, x] : st->branches)
        if (l == s.sel_label) s_next = x;
      for (const auto& [l, x] : ct->branches)
        if (l == s.sel_label) c_next = x;
      if (!s_next || !c_next) throw InternalError("select-case label missing from channel type");
      advance_endpoint(cfg, en.chan_index, s.chan, s_next);
      advance_endpoint(cfg, en.chan_index, c.chan, c_next);
      return;
    }
    case Enabled::What::close_wait: {
      const Analysis& cl = *analyzed.per_process[en.i];
      const Analysis& wt = *analyzed.per_process[en.j];
      cfg.processes[en.i].term = cl.rebuild(i_unit(cl.redex->span));
      cfg.processes[en.j].term = wt.rebuild(i_unit(wt.redex->span));
      cfg.channels[en.chan_index].consumed = true;
      return;
    }
    case Enabled::What::endpoint_sync: {
      const Analysis& x = *analyzed.per_process[en.i];
      const Analysis& y = *analyzed.per_process[en.j];
      if (sub_session(dual(x.target), y.target)) {
        cfg.processes[en.i].term = x.rebuild(i_chan(x.redex->span, x.chan));
        cfg.processes[en.j].term = y.rebuild(i_chan(y.redex->span, y.chan));
        advance_endpoint(cfg, en.chan_index, x.chan, x.target);
        advance_endpoint(cfg, en.chan_index, y.chan, dual(x.target));
      } else {
        std::set<std::string> linears = flv_of_context(x);
        for (const auto& n : flv_of_context(y)) linears.insert(n);
        linears.insert(x.chan);
        linears.insert(y.chan);
        // two processes collapse into a single blame process
        size_t lo = std::min(en.i, en.j), hi = std::max(en.i, en.j);
        cfg.processes[lo] = Process::make_blame_pair(x.p, y.p, linears);
        cfg.processes.erase(cfg.processes.begin() + static_cast<long>(hi));
        if (blames) blames->push_back({false, x.p, y.p, std::move(linears), step_no});
      }
      return;
    }
  }
}

} // namespace

ExprStep step_expr(const ITermPtr& e) {
  Analysis a = analyze(e);
  switch (a.kind) {
    case Analysis::Kind::value:
      return {ExprStep::Kind::value, e, "", ""};
    case Analysis::Kind::step:
      return {ExprStep::Kind::stepped, a.result, a.rule, ""};
    case Analysis::Kind::error:
      return {ExprStep::Kind::blocked, e, "", "error: " + a.err.detail};
    case Analysis::Kind::local_proc:
      return {ExprStep::Kind::blocked, e, "", "collapse/collide pending"};
    case Analysis::Kind::cell_alloc:
      return {ExprStep::Kind::blocked, e, "", "cell allocation pending"};
    case Analysis::Kind::cell_read:
      return {ExprStep::Kind::blocked, e, "", "cell read on " + a.ref};
    case Analysis::Kind::endpoint_cast:
      return {ExprStep::Kind::blocked, e, "", "endpoint cast on " + a.chan};
    case Analysis::Kind::prim: {
      const char* what = a.op == ITerm::Kind::fork      ? "fork"
                         : a.op == ITerm::Kind::new_chan ? "new"
                         : a.op == ITerm::Kind::send     ? "send"
                         : a.op == ITerm::Kind::receive  ? "receive"
                         : a.op == ITerm::Kind::select   ? "select"
                         : a.op == ITerm::Kind::case_    ? "case"
                         : a.op == ITerm::Kind::close    ? "close"
                                                         : "wait";
      return {ExprStep::Kind::blocked, e, "", std::string("blocked at ") + what +
                                                  (a.chan.empty() ? "" : " on " + a.chan)};
    }
  }
  throw InternalError("step_expr: bad analysis");
}

std::vector<RedexDesc> enumerate_redexes(const Configuration& cfg) {
  Analyzed analyzed;
  std::vector<RedexDesc> out;
  for (const auto& en : enabled_redexes(cfg, analyzed)) out.push_back({en.rule, en.procs});
  for (const auto& name : gc_scan(cfg)) {
    for (size_t i = 0; i < cfg.processes.size(); i++) {
      const Process& p = cfg.processes[i];
      if ((p.kind == Process::Kind::cell || p.kind == Process::Kind::locked_cell) &&
          p.cell_name == name)
        out.push_back({p.kind == Process::Kind::cell ? "cell-gc-blame" : "cell-gc-locked", {i}});
    }
  }
  return out;
}

std::vector<std::string> gc_scan(const Configuration& cfg) {
  std::set<std::string> reachable;
  for (const auto& p : cfg.processes) {
    if (p.kind == Process::Kind::expr)
      for (const auto& r : refs_of(p.term)) reachable.insert(r);
    if (p.kind == Process::Kind::cell)
      for (const auto& r : refs_of(p.cell_payload)) reachable.insert(r);
  }
  std::vector<std::string> out;
  for (const auto& p : cfg.processes)
    if ((p.kind == Process::Kind::cell || p.kind == Process::Kind::locked_cell) &&
        !reachable.count(p.cell_name))
      out.push_back(p.cell_name);
  return out;
}

std::optional<ErrorShape> detect_error(const Configuration& cfg) {
  std::map<std::string, size_t> subjects;
  std::map<std::string, const Analysis*> blocked;
  std::vector<Analysis> keep;
  keep.reserve(cfg.processes.size());

  for (size_t i = 0; i < cfg.processes.size(); i++) {
    const Process& p = cfg.processes[i];
    if (p.kind != Process::Kind::expr) continue;
    Analysis a = analyze(p.term);
    if (a.kind == Analysis::Kind::error && a.err.case_no > 0)
      return ErrorShape{a.err.case_no, a.err.detail};
    if (a.kind == Analysis::Kind::prim && !a.chan.empty()) {
      auto [it, fresh] = subjects.emplace(a.chan, i);
      if (!fresh)
        return ErrorShape{3, "endpoint " + a.chan + " is the subject of two processes"};
      keep.push_back(std::move(a));
    }
  }
  for (auto& a : keep) blocked[a.chan] = &a;

  for (const auto& ch : cfg.channels) {
    if (ch.consumed) continue;
    auto it1 = blocked.find(ch.end1);
    auto it2 = blocked.find(ch.end2);
    if (it1 == blocked.end() || it2 == blocked.end()) continue;
    if (!agree_ops(*it1->second, *it2->second))
      return ErrorShape{4, "endpoints " + ch.end1 + " and " + ch.end2 +
                               " are ready with non-matching operations"};
  }
  return std::nullopt;
}

std::optional<std::string> step_config(Configuration& cfg, SchedulerPolicy policy,
                                       size_t& cursor, std::mt19937_64& rng,
                                       std::vector<BlameInfo>* new_blames, int64_t step_no) {
  Analyzed analyzed;
  std::vector<Enabled> redexes = enabled_redexes(cfg, analyzed);
  if (redexes.empty()) return std::nullopt;

  const Enabled* pick = nullptr;
  if (policy == SchedulerPolicy::seeded_random) {
    pick = &redexes[rng() % redexes.size()];
  } else {
    // round robin: prefer the first local redex at or after the cursor,
    // otherwise the first joint redex in channel order
    size_t n = cfg.processes.size();
    for (size_t k = 0; k < n && !pick; k++) {
      size_t i = (cursor + k) % n;
      for (const auto& en : redexes)
        if (en.procs.size() == 1 && en.procs[0] == i) {
          pick = &en;
          break;
        }
    }
    if (!pick)
      for (const auto& en : redexes)
        if (en.procs.size() > 1) {
          pick = &en;
          break;
        }
    if (!pick) pick = &redexes.front();
  }

  std::string rule = pick->rule;
  size_t primary = *std::min_element(pick->procs.begin(), pick->procs.end());
  apply_redex(cfg, *pick, analyzed, new_blames, step_no);
  cursor = (primary + 1) % std::max<size_t>(cfg.processes.size(), 1);
  return rule;
}

Outcome run(const ITermPtr& term, const RunOptions& opts) {
  Outcome out;
  Configuration cfg = initial_config(term);
  size_t cursor = 0;
  std::mt19937_64 rng(opts.sched.seed);
  std::vector<BlameInfo> blames;
  int64_t steps = 0;
  bool halted = false;

  auto check_types = [&]() {
    if (!opts.typecheck_each_step) return;
    if (auto err = tc_config(cfg))
      throw InternalError("tc_config failed at step " + std::to_string(steps) + ": " +
                          err->message + "\n  in " + show(cfg));
  };

  check_types();

  while (steps < opts.max_steps) {
    size_t blames_before = blames.size();
    auto rule = step_config(cfg, opts.sched.policy, cursor, rng, &blames, steps + 1);
    if (!rule) break;
    steps++;
    if (opts.on_step) opts.on_step(steps, *rule, cfg);
    check_types();
    if (blames.size() > blames_before && !opts.run_to_quiescence) {
      halted = true;
      break;
    }

    // garbage collection after every step; collections are steps themselves
    for (;;) {
      std::vector<std::string> collectible = gc_scan(cfg);
      if (collectible.empty() || halted) break;
      bool collected = false;
      for (const auto& name : collectible) {
        for (size_t i = 0; i < cfg.processes.size(); i++) {
          Process& p = cfg.processes[i];
          if (p.kind == Process::Kind::locked_cell && p.cell_name == name) {
            cfg.processes[i] = Process::make_expr(i_unit({}));
            cfg.live_cells.erase(
                std::remove(cfg.live_cells.begin(), cfg.live_cells.end(), name),
                cfg.live_cells.end());
            steps++;
            if (opts.on_step) opts.on_step(steps, "cell-gc-locked", cfg);
            check_types();
            collected = true;
            break;
          }
          if (p.kind == Process::Kind::cell && p.cell_name == name) {
            std::set<std::string> linears = flv(p.cell_payload);
            BlameLabel lbl = p.cell_label.complement();
            cfg.processes[i] = Process::make_blame_gc(lbl, linears);
            cfg.live_cells.erase(
                std::remove(cfg.live_cells.begin(), cfg.live_cells.end(), name),
                cfg.live_cells.end());
            blames.push_back({true, lbl, {0, false}, linears, steps + 1});
            steps++;
            if (opts.on_step) opts.on_step(steps, "cell-gc-blame", cfg);
            check_types();
            if (!opts.run_to_quiescence) halted = true;
            collected = true;
            break;
          }
        }
        if (collected) break;
      }
      if (!collected) break;
    }
    if (halted) break;
  }

  out.final_config = cfg;
  out.blames = blames;
  out.steps = steps;

  if (!cfg.processes.empty() && cfg.processes[0].kind == Process::Kind::expr &&
      is_value(cfg.processes[0].term))
    out.main_value = cfg.processes[0].term;

  if (!blames.empty()) {
    out.kind = Outcome::Kind::blamed;
    return out;
  }
  if (steps >= opts.max_steps) {
    out.kind = Outcome::Kind::step_limit;
    return out;
  }

  bool all_values = true;
  bool open = false;
  for (const auto& p : cfg.processes) {
    if (p.kind == Process::Kind::expr && !is_value(p.term)) {
      all_values = false;
      Analysis a = analyze(p.term);
      if (a.kind == Analysis::Kind::error && a.open_name) open = true;
    }
  }
  if (all_values) {
    out.kind = Outcome::Kind::quiescent;
  } else {
    out.kind = Outcome::Kind::stuck;
    out.stuck_reason = open ? Outcome::StuckReason::open_name : Outcome::StuckReason::deadlock;
  }
  return out;
}

} // namespace ggv
