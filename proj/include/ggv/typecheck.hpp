#pragma once

// Algorithmic typechecking for the external language: TCEXP returns a type
// together with the set of linear variables the expression consumes, which
// replaces nondeterministic environment splitting.

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ggv/ast.hpp"
#include "ggv/relations.hpp"

namespace ggv {

struct TypeError : std::runtime_error {
  Span span;
  TypeError(Span sp, const std::string& msg)
      : std::runtime_error(sp.str() + ": type error: " + msg), span(std::move(sp)) {}
};

// Ordered name -> type map; later entries shadow earlier ones.
class TypeEnv {
 public:
  TypeEnv() = default;
  TypeEnv(std::initializer_list<std::pair<std::string, TypePtr>> init) {
    for (auto& [n, t] : init) push(n, t);
  }

  void push(std::string name, TypePtr type) {
    entries_.emplace_back(std::move(name), std::move(type));
  }
  void pop() { entries_.pop_back(); }

  const TypePtr* lookup(const std::string& name) const {
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
      if (it->first == name) return &it->second;
    return nullptr;
  }

  // linear names, for flv(Gamma) side conditions
  std::set<std::string> linear_names() const {
    std::set<std::string> out;
    for (const auto& [n, t] : entries_)
      if (is_lin(t)) out.insert(n);
    return out;
  }

  const std::vector<std::pair<std::string, TypePtr>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, TypePtr>> entries_;
};

struct TcResult {
  TypePtr type;
  std::set<std::string> linear; // free linear variables consumed
};

// The Appendix-A algorithm, extended with Int literals, arithmetic, and if.
TcResult tcexp(TypeEnv& env, const EExprPtr& e);

// A program is a closed expression of unrestricted type.
TypePtr check_program(const EExprPtr& e, const TypeEnv& imports = {});

} // namespace ggv
