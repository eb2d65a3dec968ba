#pragma once

// Binary type relations and the partial join/meet lattice operations.

#include <optional>
#include <set>
#include <string>

#include "ggv/syntax.hpp"

namespace ggv {

// Subtyping T <= U. Functions are contravariant in the domain, send in the
// payload; select shrinks the label set, offer grows it. Dyn and DC are
// subtypes only of themselves.
bool sub(const TypePtr& t, const TypePtr& u);
bool sub_session(const SessionPtr& s, const SessionPtr& r);

// Consistent subtyping T <~ U: subtyping relaxed by Dyn <~ T, T <~ Dyn,
// DC <~ S, S <~ DC. Reflexive, neither symmetric nor transitive.
bool consistent_sub(const TypePtr& t, const TypePtr& u);
bool consistent_sub_session(const SessionPtr& s, const SessionPtr& r);

// T ~ U iff T <~ U and U <~ T.
bool consistent(const TypePtr& t, const TypePtr& u);
bool consistent_session(const SessionPtr& s, const SessionPtr& r);

// Positive and negative subtyping: T <=+ Dyn and S <=+ DC on the positive
// side, Dyn <=- T and DC <=- S on the negative side; contravariant positions
// flip the polarity.
bool pos_sub(const TypePtr& t, const TypePtr& u);
bool neg_sub(const TypePtr& t, const TypePtr& u);
bool pos_sub_session(const SessionPtr& s, const SessionPtr& r);
bool neg_sub_session(const SessionPtr& s, const SessionPtr& r);

// Naive subtyping (precision): covariant everywhere, fixed multiplicities,
// identical choice label sets; T [= Dyn and S [= DC.
bool precision(const TypePtr& t, const TypePtr& u);
bool precision_session(const SessionPtr& s, const SessionPtr& r);

// Matching: lets Dyn and DC stand in for arrows, products, and session
// constructors. Failure (nullopt) signals a typechecking error upstream.
struct FnShape { Mult mult; TypePtr dom, cod; };
struct ProdShape { Mult mult; TypePtr fst, snd; };
struct CommShape { TypePtr carried; SessionPtr rest; };

std::optional<FnShape> match_fun(const TypePtr& t);
std::optional<ProdShape> match_prod(const TypePtr& t);
std::optional<CommShape> match_send(const TypePtr& t);
std::optional<CommShape> match_recv(const TypePtr& t);
// Requested single label; result is the unary select +{label: S}.
std::optional<SessionPtr> match_select(const TypePtr& t, const std::string& label);
// Requested full label set; a concrete offer matches iff its labels are a
// subset, padded with DC residuals.
std::optional<SessionPtr> match_case(const TypePtr& t, const std::set<std::string>& labels);

// Partial join/meet; nullopt when no equation applies or a choice type
// would end up with an empty label set.
std::optional<TypePtr> join(const TypePtr& t, const TypePtr& u);
std::optional<TypePtr> meet(const TypePtr& t, const TypePtr& u);
std::optional<SessionPtr> join_session(const SessionPtr& s, const SessionPtr& r);
std::optional<SessionPtr> meet_session(const SessionPtr& s, const SessionPtr& r);

} // namespace ggv
