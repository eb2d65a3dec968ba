#include "ggv/json_ast.hpp"

#include <json.hpp>

namespace ggv {

using nlohmann::json;

json session_to_json(const SessionPtr& s) {
  switch (s->kind) {
    case SessKind::send:
    case SessKind::recv: {
      json j;
      j["kind"] = s->kind == SessKind::send ? "send" : "recv";
      j["carried"] = type_to_json(s->carried);
      j["rest"] = session_to_json(s->rest);
      return j;
    }
    case SessKind::select:
    case SessKind::offer: {
      json j;
      j["kind"] = s->kind == SessKind::select ? "select" : "offer";
      json bs = json::object();
      for (const auto& [l, r] : s->branches) bs[l] = session_to_json(r);
      j["branches"] = bs;
      return j;
    }
    case SessKind::end_out: return {{"kind", "end_out"}};
    case SessKind::end_in: return {{"kind", "end_in"}};
    case SessKind::dc: return {{"kind", "dc"}};
  }
  throw InternalError("session_to_json");
}

json type_to_json(const TypePtr& t) {
  switch (t->kind) {
    case TypeKind::unit: return {{"kind", "unit"}};
    case TypeKind::int_: return {{"kind", "int"}};
    case TypeKind::dyn: return {{"kind", "dyn"}};
    case TypeKind::fn:
    case TypeKind::prod: {
      json j;
      j["kind"] = t->kind == TypeKind::fn ? "fn" : "prod";
      j["mult"] = show(t->mult);
      j["lhs"] = type_to_json(t->lhs);
      j["rhs"] = type_to_json(t->rhs);
      return j;
    }
    case TypeKind::sess: {
      json j;
      j["kind"] = "sess";
      j["session"] = session_to_json(t->sess);
      return j;
    }
  }
  throw InternalError("type_to_json");
}

SessionPtr session_from_json(const json& j) {
  std::string k = j.at("kind");
  if (k == "send") return s_send(type_from_json(j.at("carried")), session_from_json(j.at("rest")));
  if (k == "recv") return s_recv(type_from_json(j.at("carried")), session_from_json(j.at("rest")));
  if (k == "select" || k == "offer") {
    Branches bs;
    for (const auto& [l, r] : j.at("branches").items()) bs.emplace_back(l, session_from_json(r));
    return k == "select" ? s_select(std::move(bs)) : s_offer(std::move(bs));
  }
  if (k == "end_out") return s_end_out();
  if (k == "end_in") return s_end_in();
  if (k == "dc") return s_dc();
  throw InternalError("session_from_json: bad kind " + k);
}

TypePtr type_from_json(const json& j) {
  std::string k = j.at("kind");
  if (k == "unit") return t_unit();
  if (k == "int") return t_int();
  if (k == "dyn") return t_dyn();
  if (k == "fn" || k == "prod") {
    Mult m = j.at("mult") == "un" ? Mult::un : Mult::lin;
    TypePtr lhs = type_from_json(j.at("lhs"));
    TypePtr rhs = type_from_json(j.at("rhs"));
    return k == "fn" ? t_fn(m, lhs, rhs) : t_prod(m, lhs, rhs);
  }
  if (k == "sess") return t_sess(session_from_json(j.at("session")));
  throw InternalError("type_from_json: bad kind " + k);
}

json term_to_json(const ITermPtr& e) {
  json j;
  switch (e->kind) {
    case ITerm::Kind::var: j["kind"] = "var"; j["name"] = e->name; return j;
    case ITerm::Kind::chan: j["kind"] = "chan"; j["name"] = e->name; return j;
    case ITerm::Kind::cellref: j["kind"] = "cellref"; j["name"] = e->name; return j;
    case ITerm::Kind::unit_lit: j["kind"] = "unit"; return j;
    case ITerm::Kind::int_lit: j["kind"] = "int"; j["value"] = e->int_value; return j;
    case ITerm::Kind::lam:
      j["kind"] = "lam";
      j["mult"] = show(e->mult);
      j["var"] = e->name;
      j["ann"] = type_to_json(e->ann);
      j["body"] = term_to_json(e->a);
      return j;
    case ITerm::Kind::app:
      j["kind"] = "app";
      j["fn"] = term_to_json(e->a);
      j["arg"] = term_to_json(e->b);
      return j;
    case ITerm::Kind::pair:
      j["kind"] = "pair";
      j["mult"] = show(e->mult);
      j["fst"] = term_to_json(e->a);
      j["snd"] = term_to_json(e->b);
      return j;
    case ITerm::Kind::let_pair:
      j["kind"] = "let_pair";
      j["x"] = e->x;
      j["y"] = e->y;
      j["bound"] = term_to_json(e->a);
      j["body"] = term_to_json(e->b);
      return j;
    case ITerm::Kind::fork: j["kind"] = "fork"; j["body"] = term_to_json(e->a); return j;
    case ITerm::Kind::new_chan:
      j["kind"] = "new";
      j["session"] = session_to_json(e->session);
      return j;
    case ITerm::Kind::send:
      j["kind"] = "send";
      j["payload"] = term_to_json(e->a);
      j["chan"] = term_to_json(e->b);
      return j;
    case ITerm::Kind::receive: j["kind"] = "receive"; j["chan"] = term_to_json(e->a); return j;
    case ITerm::Kind::select:
      j["kind"] = "select";
      j["label"] = e->name;
      j["chan"] = term_to_json(e->a);
      return j;
    case ITerm::Kind::case_: {
      j["kind"] = "case";
      j["scrutinee"] = term_to_json(e->a);
      json bs = json::array();
      for (const auto& br : e->branches)
        bs.push_back({{"label", br.label}, {"var", br.var}, {"body", term_to_json(br.body)}});
      j["branches"] = bs;
      return j;
    }
    case ITerm::Kind::close: j["kind"] = "close"; j["chan"] = term_to_json(e->a); return j;
    case ITerm::Kind::wait: j["kind"] = "wait"; j["chan"] = term_to_json(e->a); return j;
    case ITerm::Kind::arith: {
      j["kind"] = "arith";
      j["op"] = show(e->op);
      json as = json::array();
      for (const auto& a : e->args) as.push_back(term_to_json(a));
      j["args"] = as;
      return j;
    }
    case ITerm::Kind::if_:
      j["kind"] = "if";
      j["cond"] = term_to_json(e->a);
      j["then"] = term_to_json(e->b);
      j["else"] = term_to_json(e->c);
      return j;
    case ITerm::Kind::cast:
      j["kind"] = "cast";
      j["body"] = term_to_json(e->a);
      j["from"] = type_to_json(e->from);
      j["to"] = type_to_json(e->to);
      j["label"] = e->label.id;
      j["negative"] = e->label.negative;
      return j;
  }
  throw InternalError("term_to_json");
}

ITermPtr term_from_json(const json& j) {
  std::string k = j.at("kind");
  Span sp;
  if (k == "var") return i_var(sp, j.at("name"));
  if (k == "chan") return i_chan(sp, j.at("name"));
  if (k == "cellref") return i_cellref(sp, j.at("name"));
  if (k == "unit") return i_unit(sp);
  if (k == "int") return i_int(sp, j.at("value"));
  if (k == "lam")
    return i_lam(sp, j.at("mult") == "un" ? Mult::un : Mult::lin, j.at("var"),
                 type_from_json(j.at("ann")), term_from_json(j.at("body")));
  if (k == "app") return i_app(sp, term_from_json(j.at("fn")), term_from_json(j.at("arg")));
  if (k == "pair")
    return i_pair(sp, j.at("mult") == "un" ? Mult::un : Mult::lin,
                  term_from_json(j.at("fst")), term_from_json(j.at("snd")));
  if (k == "let_pair")
    return i_let_pair(sp, j.at("x"), j.at("y"), term_from_json(j.at("bound")),
                      term_from_json(j.at("body")));
  if (k == "fork") return i_fork(sp, term_from_json(j.at("body")));
  if (k == "new") return i_new(sp, session_from_json(j.at("session")));
  if (k == "send")
    return i_send(sp, term_from_json(j.at("payload")), term_from_json(j.at("chan")));
  if (k == "receive") return i_receive(sp, term_from_json(j.at("chan")));
  if (k == "select") return i_select(sp, j.at("label"), term_from_json(j.at("chan")));
  if (k == "case") {
    std::vector<ICaseBranch> bs;
    for (const auto& b : j.at("branches"))
      bs.push_back({b.at("label"), b.at("var"), term_from_json(b.at("body"))});
    return i_case(sp, term_from_json(j.at("scrutinee")), std::move(bs));
  }
  if (k == "close") return i_close(sp, term_from_json(j.at("chan")));
  if (k == "wait") return i_wait(sp, term_from_json(j.at("chan")));
  if (k == "arith") {
    std::string op = j.at("op");
    std::vector<ITermPtr> args;
    for (const auto& a : j.at("args")) args.push_back(term_from_json(a));
    ArithOp o = op == "+" ? ArithOp::add : op == "-" ? ArithOp::neg : ArithOp::eq;
    return i_arith(sp, o, std::move(args));
  }
  if (k == "if")
    return i_if(sp, term_from_json(j.at("cond")), term_from_json(j.at("then")),
                term_from_json(j.at("else")));
  if (k == "cast")
    return i_cast(sp, term_from_json(j.at("body")), type_from_json(j.at("from")),
                  type_from_json(j.at("to")),
                  BlameLabel{j.at("label"), j.at("negative")});
  throw InternalError("term_from_json: bad kind " + k);
}

} // namespace ggv
