#pragma once

#include "ifsec/noninterference.hpp"
#include "ifsec/refinement.hpp"

#include "json.hpp"

#include <string>
#include <vector>

// JSON forms of checker results. States use the canonical serialization and
// actions their printed label, so every document is deterministic.
namespace ifsec::report
{

using json = nlohmann::json;

inline constexpr int schema_version = 1;

[[nodiscard]] json to_json( const std::vector< action_id >& path );
[[nodiscard]] json to_json( const std::vector< state >& states );
[[nodiscard]] json to_json( const scope_summary& scope );
[[nodiscard]] json to_json( const unwinding_report& report );
[[nodiscard]] json to_json( const ni_report& report );
[[nodiscard]] json to_json( const sim_failure& failure );
[[nodiscard]] json to_json( const simulation_report& report );
[[nodiscard]] json to_json( const compositional_report& report );

[[nodiscard]] std::vector< action_id > path_from_json( const json& j );

// Two-space indented text with a trailing newline.
[[nodiscard]] std::string dump( const json& j );

} // namespace ifsec::report
