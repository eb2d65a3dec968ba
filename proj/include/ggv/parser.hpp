#pragma once

// Lexer and recursive-descent parser for the .ggv / .ugv surface syntax and
// the standalone type syntax used by `ggv rel`.

#include <string>
#include <vector>

#include "ggv/ast.hpp"

namespace ggv {

struct ParseError : std::runtime_error {
  Span span;
  ParseError(Span sp, const std::string& msg)
      : std::runtime_error(sp.str() + ": syntax error: " + msg), span(std::move(sp)) {}
};

struct Import {
  std::string path; // relative to the importing file
  std::string name; // bound at Dyn
  Span span;
};

struct Program {
  std::vector<Import> imports;
  EExprPtr body;
};

// Typed surface expression / program (.ggv). `file` is used for spans.
EExprPtr parse_expr(const std::string& source, const std::string& file = "<input>");
Program parse_program(const std::string& source, const std::string& file = "<input>");

// Untyped surface (.ugv): no annotations, no multiplicities, bare `new`.
EExprPtr parse_untyped_expr(const std::string& source, const std::string& file = "<input>");

TypePtr parse_type(const std::string& source);
SessionPtr parse_session(const std::string& source);

} // namespace ggv
