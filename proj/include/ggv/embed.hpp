#pragma once

// Embedding of the unityped calculus into GGV_i: every expression gets type
// Dyn, communication goes through the dynamic session type.

#include "ggv/elaborate.hpp"

namespace ggv {

// Pre: e is annotation-free. Allocates a fresh positive label per cast.
ITermPtr embed(const EExprPtr& e, LabelAllocator& labels);

// Typechecks embed(e) at Dyn under an environment binding every free
// variable at Dyn; throws TypeError (an embedding bug) otherwise.
void check_embedding(const EExprPtr& e);

} // namespace ggv
