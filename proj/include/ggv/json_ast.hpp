#pragma once

// Structured AST output for `ggv elaborate --json`, with a reader so the
// format round-trips.

#include <json.hpp>

#include "ggv/internal.hpp"

namespace ggv {

nlohmann::json type_to_json(const TypePtr& t);
nlohmann::json session_to_json(const SessionPtr& s);
nlohmann::json term_to_json(const ITermPtr& e);

TypePtr type_from_json(const nlohmann::json& j);
SessionPtr session_from_json(const nlohmann::json& j);
ITermPtr term_from_json(const nlohmann::json& j);

} // namespace ggv
