#pragma once

// Cast-inserting translation from the external language into GGV_i, the
// cast-avoidance optimization, and the type erasure used by the
// conservativity tests.

#include "ggv/internal.hpp"

namespace ggv {

struct LabelInfo {
  int id;
  Span span;
  TypePtr from, to;
};

// Fresh positive labels in traversal order; identity is stable across runs.
class LabelAllocator {
 public:
  BlameLabel fresh(const Span& sp, const TypePtr& from, const TypePtr& to) {
    int id = ++counter_;
    table_.push_back({id, sp, from, to});
    return {id, false};
  }

  const std::vector<LabelInfo>& table() const { return table_; }

 private:
  int counter_ = 0;
  std::vector<LabelInfo> table_;
};

// e : from =>?p to  — no cast when from is already a subtype of to.
// Pre: consistent_sub(from, to).
ITermPtr smart_cast(const ITermPtr& e, const TypePtr& from, const TypePtr& to, BlameLabel p);
ITermPtr smart_cast(const ITermPtr& e, const TypePtr& from, const TypePtr& to,
                    LabelAllocator& labels);

struct Elaborated {
  ITermPtr term;
  TypePtr type;
};

// Pre: tcexp(env, e) succeeds. Implements every CI rule with fresh labels.
Elaborated insert_casts(TypeEnv& env, const EExprPtr& e, LabelAllocator& labels);

// Removes annotations from Lam and New homomorphically.
EExprPtr erase(const EExprPtr& e);

} // namespace ggv
