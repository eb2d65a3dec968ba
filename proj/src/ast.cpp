#include "ggv/ast.hpp"

namespace ggv {

const char* show(ArithOp op) {
  switch (op) {
    case ArithOp::add: return "+";
    case ArithOp::neg: return "-";
    case ArithOp::eq: return "==";
  }
  return "?";
}

static std::shared_ptr<EExpr> mk(EExpr::Kind k, Span sp) {
  auto e = std::make_shared<EExpr>();
  e->kind = k;
  e->span = std::move(sp);
  return e;
}

EExprPtr e_var(Span sp, std::string name) {
  auto e = mk(EExpr::Kind::var, std::move(sp));
  e->name = std::move(name);
  return e;
}

EExprPtr e_unit(Span sp) { return mk(EExpr::Kind::unit_lit, std::move(sp)); }

EExprPtr e_int(Span sp, int64_t v) {
  auto e = mk(EExpr::Kind::int_lit, std::move(sp));
  e->int_value = v;
  return e;
}

EExprPtr e_lam(Span sp, Mult m, std::string x, TypePtr ann, EExprPtr body) {
  auto e = mk(EExpr::Kind::lam, std::move(sp));
  e->mult = m;
  e->name = std::move(x);
  e->ann = std::move(ann);
  e->a = std::move(body);
  return e;
}

EExprPtr e_app(Span sp, EExprPtr f, EExprPtr a) {
  auto e = mk(EExpr::Kind::app, std::move(sp));
  e->a = std::move(f);
  e->b = std::move(a);
  return e;
}

EExprPtr e_pair(Span sp, Mult m, EExprPtr a, EExprPtr b) {
  auto e = mk(EExpr::Kind::pair, std::move(sp));
  e->mult = m;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

EExprPtr e_let_pair(Span sp, std::string x, std::string y, EExprPtr bound, EExprPtr body) {
  auto e = mk(EExpr::Kind::let_pair, std::move(sp));
  e->x = std::move(x);
  e->y = std::move(y);
  e->a = std::move(bound);
  e->b = std::move(body);
  return e;
}

EExprPtr e_fork(Span sp, EExprPtr a) {
  auto e = mk(EExpr::Kind::fork, std::move(sp));
  e->a = std::move(a);
  return e;
}

EExprPtr e_new(Span sp, SessionPtr s) {
  auto e = mk(EExpr::Kind::new_chan, std::move(sp));
  e->session = std::move(s);
  return e;
}

EExprPtr e_send(Span sp, EExprPtr payload, EExprPtr chan) {
  auto e = mk(EExpr::Kind::send, std::move(sp));
  e->a = std::move(payload);
  e->b = std::move(chan);
  return e;
}

EExprPtr e_receive(Span sp, EExprPtr chan) {
  auto e = mk(EExpr::Kind::receive, std::move(sp));
  e->a = std::move(chan);
  return e;
}

EExprPtr e_select(Span sp, std::string label, EExprPtr chan) {
  auto e = mk(EExpr::Kind::select, std::move(sp));
  e->name = std::move(label);
  e->a = std::move(chan);
  return e;
}

EExprPtr e_case(Span sp, EExprPtr scrutinee, std::vector<ECaseBranch> branches) {
  auto e = mk(EExpr::Kind::case_, std::move(sp));
  e->a = std::move(scrutinee);
  e->branches = std::move(branches);
  return e;
}

EExprPtr e_close(Span sp, EExprPtr chan) {
  auto e = mk(EExpr::Kind::close, std::move(sp));
  e->a = std::move(chan);
  return e;
}

EExprPtr e_wait(Span sp, EExprPtr chan) {
  auto e = mk(EExpr::Kind::wait, std::move(sp));
  e->a = std::move(chan);
  return e;
}

EExprPtr e_arith(Span sp, ArithOp op, std::vector<EExprPtr> args) {
  auto e = mk(EExpr::Kind::arith, std::move(sp));
  e->op = op;
  e->args = std::move(args);
  return e;
}

EExprPtr e_if(Span sp, EExprPtr cond, EExprPtr then_e, EExprPtr else_e) {
  auto e = mk(EExpr::Kind::if_, std::move(sp));
  e->a = std::move(cond);
  e->b = std::move(then_e);
  e->c = std::move(else_e);
  return e;
}

static void show_e(const EExprPtr& e, std::string& out, bool atom) {
  auto paren = [&](auto f) {
    if (atom) out += '(';
    f();
    if (atom) out += ')';
  };
  switch (e->kind) {
    case EExpr::Kind::var: out += e->name; return;
    case EExpr::Kind::unit_lit: out += "()"; return;
    case EExpr::Kind::int_lit: out += std::to_string(e->int_value); return;
    case EExpr::Kind::lam:
      paren([&] {
        out += e->ann ? (e->mult == Mult::un ? "lambda_un " : "lambda_lin ") : "lambda ";
        out += e->name;
        if (e->ann) {
          out += ": ";
          out += show(e->ann);
        }
        out += ". ";
        show_e(e->a, out, false);
      });
      return;
    case EExpr::Kind::app:
      paren([&] {
        show_e(e->a, out, e->a->kind != EExpr::Kind::app);
        out += ' ';
        show_e(e->b, out, true);
      });
      return;
    case EExpr::Kind::pair:
      out += '(';
      show_e(e->a, out, false);
      out += ", ";
      show_e(e->b, out, false);
      out += ')';
      out += e->mult == Mult::un ? "@un" : "@lin";
      return;
    case EExpr::Kind::let_pair:
      paren([&] {
        out += "let " + e->x + ", " + e->y + " = ";
        show_e(e->a, out, false);
        out += " in ";
        show_e(e->b, out, false);
      });
      return;
    case EExpr::Kind::fork:
      paren([&] {
        out += "fork ";
        show_e(e->a, out, true);
      });
      return;
    case EExpr::Kind::new_chan:
      out += "new";
      if (e->session) {
        out += ' ';
        out += show(e->session);
      }
      return;
    case EExpr::Kind::send:
      paren([&] {
        out += "send ";
        show_e(e->a, out, true);
        out += ' ';
        show_e(e->b, out, true);
      });
      return;
    case EExpr::Kind::receive:
      paren([&] {
        out += "receive ";
        show_e(e->a, out, true);
      });
      return;
    case EExpr::Kind::select:
      paren([&] {
        out += "select " + e->name + " ";
        show_e(e->a, out, true);
      });
      return;
    case EExpr::Kind::case_:
      paren([&] {
        out += "case ";
        show_e(e->a, out, true);
        out += " of { ";
        bool first = true;
        for (const auto& br : e->branches) {
          if (!first) out += ", ";
          first = false;
          out += br.label + ": " + br.var + ". ";
          show_e(br.body, out, false);
        }
        out += " }";
      });
      return;
    case EExpr::Kind::close:
      paren([&] {
        out += "close ";
        show_e(e->a, out, true);
      });
      return;
    case EExpr::Kind::wait:
      paren([&] {
        out += "wait ";
        show_e(e->a, out, true);
      });
      return;
    case EExpr::Kind::arith:
      paren([&] {
        if (e->op == ArithOp::neg) {
          out += '-';
          show_e(e->args[0], out, true);
        } else {
          show_e(e->args[0], out, true);
          out += e->op == ArithOp::add ? " + " : " == ";
          show_e(e->args[1], out, true);
        }
      });
      return;
    case EExpr::Kind::if_:
      paren([&] {
        out += "if ";
        show_e(e->a, out, false);
        out += " then ";
        show_e(e->b, out, false);
        out += " else ";
        show_e(e->c, out, false);
      });
      return;
  }
}

std::string show(const EExprPtr& e) {
  std::string out;
  show_e(e, out, false);
  return out;
}

bool is_annotation_free(const EExprPtr& e) {
  if (!e) return true;
  if (e->kind == EExpr::Kind::lam && e->ann) return false;
  if (e->kind == EExpr::Kind::new_chan && e->session) return false;
  for (const auto& c : {e->a, e->b, e->c})
    if (c && !is_annotation_free(c)) return false;
  for (const auto& br : e->branches)
    if (!is_annotation_free(br.body)) return false;
  for (const auto& a : e->args)
    if (!is_annotation_free(a)) return false;
  return true;
}

} // namespace ggv
