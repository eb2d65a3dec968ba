#include "ggv/parser.hpp"

#include <cctype>
#include <optional>
#include <set>

namespace ggv {

namespace {

enum class Tok {
  ident, integer, string_lit,
  lparen, rparen, lbrace, rbrace, comma, colon, dot, semi,
  eq, eqeq, plus, minus, bang, query, amp,
  arrow_un, arrow_lin, star_un, star_lin, at_un, at_lin,
  end_out, end_in, // End! End?
  kw_lambda_un, kw_lambda_lin, kw_lambda, kw_let, kw_in, kw_fork, kw_new,
  kw_send, kw_receive, kw_select, kw_case, kw_of, kw_close, kw_wait,
  kw_if, kw_then, kw_else, kw_import, kw_untyped, kw_as,
  ty_unit, ty_int, ty_dyn, ty_dc,
  eof
};

struct Token {
  Tok kind;
  std::string text;
  int64_t value = 0;
  Span span;
};

class Lexer {
 public:
  Lexer(const std::string& src, std::string file) : src_(src), file_(std::move(file)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_ws();
      Span sp = here();
      if (pos_ >= src_.size()) {
        out.push_back({Tok::eof, "", 0, sp});
        return out;
      }
      char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) adv();
        std::string digits = src_.substr(start, pos_ - start);
        int64_t value = 0;
        try {
          value = std::stoll(digits);
        } catch (const std::out_of_range&) {
          throw ParseError(sp, "integer literal out of range");
        }
        out.push_back({Tok::integer, digits, value, sp});
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          adv();
        std::string word = src_.substr(start, pos_ - start);
        // End! / End? fuse with the following punctuation
        if (word == "End" && pos_ < src_.size() && (src_[pos_] == '!' || src_[pos_] == '?')) {
          bool bang = src_[pos_] == '!';
          adv();
          out.push_back({bang ? Tok::end_out : Tok::end_in, bang ? "End!" : "End?", 0, sp});
          continue;
        }
        out.push_back({keyword(word), word, 0, sp});
        continue;
      }
      if (c == '"') {
        adv();
        size_t start = pos_;
        while (pos_ < src_.size() && src_[pos_] != '"') adv();
        if (pos_ >= src_.size()) throw ParseError(sp, "unterminated string");
        std::string text = src_.substr(start, pos_ - start);
        adv();
        out.push_back({Tok::string_lit, text, 0, sp});
        continue;
      }
      switch (c) {
        case '(': adv(); out.push_back({Tok::lparen, "(", 0, sp}); continue;
        case ')': adv(); out.push_back({Tok::rparen, ")", 0, sp}); continue;
        case '{': adv(); out.push_back({Tok::lbrace, "{", 0, sp}); continue;
        case '}': adv(); out.push_back({Tok::rbrace, "}", 0, sp}); continue;
        case ',': adv(); out.push_back({Tok::comma, ",", 0, sp}); continue;
        case ':': adv(); out.push_back({Tok::colon, ":", 0, sp}); continue;
        case '.': adv(); out.push_back({Tok::dot, ".", 0, sp}); continue;
        case ';': adv(); out.push_back({Tok::semi, ";", 0, sp}); continue;
        case '!': adv(); out.push_back({Tok::bang, "!", 0, sp}); continue;
        case '?': adv(); out.push_back({Tok::query, "?", 0, sp}); continue;
        case '&': adv(); out.push_back({Tok::amp, "&", 0, sp}); continue;
        case '+': adv(); out.push_back({Tok::plus, "+", 0, sp}); continue;
        case '=':
          if (peek(1) == '=') { adv(); adv(); out.push_back({Tok::eqeq, "==", 0, sp}); }
          else { adv(); out.push_back({Tok::eq, "=", 0, sp}); }
          continue;
        case '@':
          if (word_at(1, "un")) { advn(3); out.push_back({Tok::at_un, "@un", 0, sp}); continue; }
          if (word_at(1, "lin")) { advn(4); out.push_back({Tok::at_lin, "@lin", 0, sp}); continue; }
          throw ParseError(sp, "expected @un or @lin");
        case '*':
          if (word_at(1, "un")) { advn(3); out.push_back({Tok::star_un, "*un", 0, sp}); continue; }
          if (word_at(1, "lin")) { advn(4); out.push_back({Tok::star_lin, "*lin", 0, sp}); continue; }
          throw ParseError(sp, "expected *un or *lin");
        case '-':
          if (peek(1) == '-') { // comment handled in skip_ws; unreachable
            skip_ws();
            continue;
          }
          if (src_.compare(pos_, 4, "-un>") == 0) { advn(4); out.push_back({Tok::arrow_un, "-un>", 0, sp}); continue; }
          if (src_.compare(pos_, 5, "-lin>") == 0) { advn(5); out.push_back({Tok::arrow_lin, "-lin>", 0, sp}); continue; }
          adv();
          out.push_back({Tok::minus, "-", 0, sp});
          continue;
        default:
          throw ParseError(sp, std::string("unexpected character '") + c + "'");
      }
    }
  }

 private:
  static Tok keyword(const std::string& w) {
    if (w == "lambda_un") return Tok::kw_lambda_un;
    if (w == "lambda_lin") return Tok::kw_lambda_lin;
    if (w == "lambda") return Tok::kw_lambda;
    if (w == "let") return Tok::kw_let;
    if (w == "in") return Tok::kw_in;
    if (w == "fork") return Tok::kw_fork;
    if (w == "new") return Tok::kw_new;
    if (w == "send") return Tok::kw_send;
    if (w == "receive") return Tok::kw_receive;
    if (w == "select") return Tok::kw_select;
    if (w == "case") return Tok::kw_case;
    if (w == "of") return Tok::kw_of;
    if (w == "close") return Tok::kw_close;
    if (w == "wait") return Tok::kw_wait;
    if (w == "if") return Tok::kw_if;
    if (w == "then") return Tok::kw_then;
    if (w == "else") return Tok::kw_else;
    if (w == "import") return Tok::kw_import;
    if (w == "untyped") return Tok::kw_untyped;
    if (w == "as") return Tok::kw_as;
    if (w == "Unit") return Tok::ty_unit;
    if (w == "Int") return Tok::ty_int;
    if (w == "Dyn") return Tok::ty_dyn;
    if (w == "DC") return Tok::ty_dc;
    return Tok::ident;
  }

  char peek(size_t k) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }

  bool word_at(size_t off, const std::string& w) const {
    if (src_.compare(pos_ + off, w.size(), w) != 0) return false;
    char after = pos_ + off + w.size() < src_.size() ? src_[pos_ + off + w.size()] : '\0';
    return !std::isalnum(static_cast<unsigned char>(after)) && after != '_';
  }

  void adv() {
    if (src_[pos_] == '\n') { line_++; col_ = 1; }
    else col_++;
    pos_++;
  }
  void advn(size_t n) { while (n--) adv(); }

  void skip_ws() {
    for (;;) {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) adv();
      if (pos_ + 1 < src_.size() && src_[pos_] == '-' && src_[pos_ + 1] == '-') {
        while (pos_ < src_.size() && src_[pos_] != '\n') adv();
        continue;
      }
      return;
    }
  }

  Span here() const { return {file_, line_, col_}; }

  const std::string& src_;
  std::string file_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, bool typed) : toks_(std::move(toks)), typed_(typed) {}

  Program program() {
    Program p;
    while (at(Tok::kw_import)) {
      Span sp = cur().span;
      next();
      expect(Tok::kw_untyped, "expected 'untyped' after import");
      Token path = expect(Tok::string_lit, "expected a quoted path");
      expect(Tok::kw_as, "expected 'as'");
      Token name = expect(Tok::ident, "expected an identifier");
      p.imports.push_back({path.text, name.text, sp});
    }
    p.body = expr();
    expect(Tok::eof, "trailing input after expression");
    return p;
  }

  EExprPtr single_expr() {
    auto e = expr();
    expect(Tok::eof, "trailing input after expression");
    return e;
  }

  TypePtr type_only() {
    auto t = type();
    expect(Tok::eof, "trailing input after type");
    return t;
  }

  SessionPtr session_only() {
    auto s = session();
    expect(Tok::eof, "trailing input after session type");
    return s;
  }

 private:
  // ---- expressions ----

  EExprPtr expr() { return seq(); }

  EExprPtr seq() {
    EExprPtr e = low();
    if (at(Tok::semi)) {
      Span sp = cur().span;
      next();
      EExprPtr rest = seq();
      // e1; e2  ==  let _ : Unit = e1 in e2
      return e_app(sp, e_lam(sp, typed_ ? Mult::lin : Mult::un, "_",
                             typed_ ? t_unit() : nullptr, rest), e);
    }
    return e;
  }

  EExprPtr low() {
    switch (cur().kind) {
      case Tok::kw_lambda_un:
      case Tok::kw_lambda_lin: {
        if (!typed_) throw ParseError(cur().span, "annotated lambda in untyped program");
        Span sp = cur().span;
        Mult m = at(Tok::kw_lambda_un) ? Mult::un : Mult::lin;
        next();
        Token x = expect(Tok::ident, "expected a binder");
        expect(Tok::colon, "expected ':' and a type annotation");
        TypePtr ann = type();
        expect(Tok::dot, "expected '.' before the body");
        return e_lam(sp, m, x.text, ann, seq());
      }
      case Tok::kw_lambda: {
        if (typed_) throw ParseError(cur().span, "use lambda_un or lambda_lin in typed programs");
        Span sp = cur().span;
        next();
        Token x = expect(Tok::ident, "expected a binder");
        expect(Tok::dot, "expected '.' before the body");
        return e_lam(sp, Mult::un, x.text, nullptr, seq());
      }
      case Tok::kw_let: {
        Span sp = cur().span;
        next();
        Token x = expect(Tok::ident, "expected a binder");
        if (at(Tok::comma)) {
          next();
          Token y = expect(Tok::ident, "expected a second binder");
          expect(Tok::eq, "expected '='");
          EExprPtr bound = expr();
          expect(Tok::kw_in, "expected 'in'");
          return e_let_pair(sp, x.text, y.text, bound, seq());
        }
        TypePtr ann;
        if (typed_) {
          expect(Tok::colon, "let binding needs a type annotation: let x : T = ...");
          ann = type();
        }
        expect(Tok::eq, "expected '='");
        EExprPtr bound = expr();
        expect(Tok::kw_in, "expected 'in'");
        EExprPtr body = seq();
        // let x : T = e1 in e2  ==  (lambda_lin x: T. e2) e1
        return e_app(sp, e_lam(sp, typed_ ? Mult::lin : Mult::un, x.text, ann, body), bound);
      }
      case Tok::kw_if: {
        Span sp = cur().span;
        next();
        EExprPtr c = expr();
        expect(Tok::kw_then, "expected 'then'");
        EExprPtr t = expr();
        expect(Tok::kw_else, "expected 'else'");
        return e_if(sp, c, t, seq());
      }
      case Tok::kw_case: {
        Span sp = cur().span;
        next();
        EExprPtr scrut = expr();
        expect(Tok::kw_of, "expected 'of'");
        expect(Tok::lbrace, "expected '{'");
        std::vector<ECaseBranch> branches;
        std::set<std::string> seen;
        for (;;) {
          Token l = expect(Tok::ident, "expected a branch label");
          if (!seen.insert(l.text).second)
            throw ParseError(l.span, "duplicate case label " + l.text);
          expect(Tok::colon, "expected ':'");
          Token v = expect(Tok::ident, "expected a branch binder");
          expect(Tok::dot, "expected '.'");
          EExprPtr body = expr();
          branches.push_back({l.text, v.text, body});
          if (at(Tok::comma)) { next(); continue; }
          break;
        }
        expect(Tok::rbrace, "expected '}'");
        return e_case(sp, scrut, std::move(branches));
      }
      default:
        return cmp();
    }
  }

  EExprPtr cmp() {
    EExprPtr e = sum();
    if (at(Tok::eqeq)) {
      Span sp = cur().span;
      next();
      return e_arith(sp, ArithOp::eq, {e, sum()});
    }
    return e;
  }

  EExprPtr sum() {
    EExprPtr e = unary();
    for (;;) {
      if (at(Tok::plus)) {
        Span sp = cur().span;
        next();
        e = e_arith(sp, ArithOp::add, {e, unary()});
      } else if (at(Tok::minus)) {
        // a - b  ==  a + (-b)
        Span sp = cur().span;
        next();
        e = e_arith(sp, ArithOp::add, {e, e_arith(sp, ArithOp::neg, {unary()})});
      } else {
        return e;
      }
    }
  }

  EExprPtr unary() {
    if (at(Tok::minus)) {
      Span sp = cur().span;
      next();
      return e_arith(sp, ArithOp::neg, {unary()});
    }
    return app();
  }

  bool starts_atom() const {
    switch (cur().kind) {
      case Tok::ident:
      case Tok::integer:
      case Tok::lparen:
        return true;
      default:
        return false;
    }
  }

  EExprPtr app() {
    EExprPtr e = prefix_form();
    while (starts_atom()) {
      Span sp = cur().span;
      e = e_app(sp, e, atom());
    }
    return e;
  }

  // communication primitives take atomic arguments: parenthesize compounds
  EExprPtr prefix_form() {
    Span sp = cur().span;
    switch (cur().kind) {
      case Tok::kw_fork: next(); return e_fork(sp, atom());
      case Tok::kw_send: {
        next();
        EExprPtr v = atom();
        return e_send(sp, v, atom());
      }
      case Tok::kw_receive: next(); return e_receive(sp, atom());
      case Tok::kw_select: {
        next();
        Token l = expect(Tok::ident, "expected a label after select");
        return e_select(sp, l.text, atom());
      }
      case Tok::kw_close: next(); return e_close(sp, atom());
      case Tok::kw_wait: next(); return e_wait(sp, atom());
      case Tok::kw_new: {
        next();
        if (!typed_) return e_new(sp, nullptr);
        return e_new(sp, session());
      }
      default:
        return atom();
    }
  }

  EExprPtr atom() {
    Span sp = cur().span;
    switch (cur().kind) {
      case Tok::ident: {
        std::string n = cur().text;
        next();
        return e_var(sp, n);
      }
      case Tok::integer: {
        int64_t v = cur().value;
        next();
        return e_int(sp, v);
      }
      case Tok::lparen: {
        next();
        if (at(Tok::rparen)) {
          next();
          return e_unit(sp);
        }
        EExprPtr e = expr();
        if (at(Tok::comma)) {
          next();
          EExprPtr f = expr();
          expect(Tok::rparen, "expected ')'");
          Mult m = Mult::un;
          if (typed_) {
            if (at(Tok::at_un)) { next(); }
            else if (at(Tok::at_lin)) { next(); m = Mult::lin; }
            else throw ParseError(cur().span, "pair needs a multiplicity: (e1, e2)@un or @lin");
          }
          return e_pair(sp, m, e, f);
        }
        expect(Tok::rparen, "expected ')'");
        return e;
      }
      default:
        throw ParseError(sp, "expected an expression, got '" + cur().text + "'");
    }
  }

  // ---- types ----

  TypePtr type() {
    TypePtr lhs = prod_type();
    if (at(Tok::arrow_un) || at(Tok::arrow_lin)) {
      Mult m = at(Tok::arrow_un) ? Mult::un : Mult::lin;
      next();
      return t_fn(m, lhs, type()); // right-associative
    }
    return lhs;
  }

  TypePtr prod_type() {
    TypePtr lhs = atom_type();
    if (at(Tok::star_un) || at(Tok::star_lin)) {
      Mult m = at(Tok::star_un) ? Mult::un : Mult::lin;
      next();
      return t_prod(m, lhs, prod_type());
    }
    return lhs;
  }

  bool starts_session() const {
    switch (cur().kind) {
      case Tok::ty_dc:
      case Tok::end_out:
      case Tok::end_in:
      case Tok::bang:
      case Tok::query:
      case Tok::plus:
      case Tok::amp:
        return true;
      default:
        return false;
    }
  }

  TypePtr atom_type() {
    Span sp = cur().span;
    switch (cur().kind) {
      case Tok::ty_unit: next(); return t_unit();
      case Tok::ty_int: next(); return t_int();
      case Tok::ty_dyn: next(); return t_dyn();
      case Tok::lparen: {
        next();
        TypePtr t = type();
        expect(Tok::rparen, "expected ')'");
        return t;
      }
      default:
        if (starts_session()) return t_sess(session());
        throw ParseError(sp, "expected a type, got '" + cur().text + "'");
    }
  }

  SessionPtr session() {
    Span sp = cur().span;
    switch (cur().kind) {
      case Tok::ty_dc: next(); return s_dc();
      case Tok::end_out: next(); return s_end_out();
      case Tok::end_in: next(); return s_end_in();
      case Tok::bang:
      case Tok::query: {
        bool send = at(Tok::bang);
        next();
        TypePtr carried = type();
        expect(Tok::dot, "expected '.' after the carried type");
        SessionPtr rest = session();
        return send ? s_send(carried, rest) : s_recv(carried, rest);
      }
      case Tok::plus:
      case Tok::amp: {
        bool select = at(Tok::plus);
        next();
        expect(Tok::lbrace, "expected '{'");
        Branches bs;
        std::set<std::string> seen;
        for (;;) {
          Token l = expect(Tok::ident, "expected a label");
          if (!seen.insert(l.text).second)
            throw ParseError(l.span, "duplicate label " + l.text);
          expect(Tok::colon, "expected ':'");
          bs.emplace_back(l.text, session());
          if (at(Tok::comma)) { next(); continue; }
          break;
        }
        expect(Tok::rbrace, "expected '}'");
        return select ? s_select(std::move(bs)) : s_offer(std::move(bs));
      }
      default:
        throw ParseError(sp, "expected a session type, got '" + cur().text + "'");
    }
  }

  // ---- machinery ----

  const Token& cur() const { return toks_[i_]; }
  bool at(Tok k) const { return cur().kind == k; }
  void next() { if (i_ + 1 < toks_.size()) i_++; }

  Token expect(Tok k, const std::string& msg) {
    if (!at(k)) throw ParseError(cur().span, msg + " (got '" + cur().text + "')");
    Token t = cur();
    next();
    return t;
  }

  std::vector<Token> toks_;
  bool typed_;
  size_t i_ = 0;
};

} // namespace

EExprPtr parse_expr(const std::string& source, const std::string& file) {
  return Parser(Lexer(source, file).run(), true).single_expr();
}

Program parse_program(const std::string& source, const std::string& file) {
  return Parser(Lexer(source, file).run(), true).program();
}

EExprPtr parse_untyped_expr(const std::string& source, const std::string& file) {
  return Parser(Lexer(source, file).run(), false).single_expr();
}

TypePtr parse_type(const std::string& source) {
  return Parser(Lexer(source, "<type>").run(), true).type_only();
}

SessionPtr parse_session(const std::string& source) {
  return Parser(Lexer(source, "<type>").run(), true).session_only();
}

} // namespace ggv
