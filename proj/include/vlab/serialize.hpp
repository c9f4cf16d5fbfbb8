#pragma once

#include "vlab/grid.hpp"
#include "vlab/nonlin.hpp"

#include <json.hpp>

#include <string>

namespace vlab {

nlohmann::json nonlin_to_json(const NonlinearitySpec& spec);
NonlinearitySpec nonlin_from_json(const nlohmann::json& j);

nlohmann::json constants_to_json(const AssumptionConstants& c);
AssumptionConstants constants_from_json(const nlohmann::json& j);

nlohmann::json grid_to_json(const Grid& g);

/// Stable FNV-1a hash (hex) of the canonical dump; nlohmann objects keep
/// keys sorted, so equal configurations digest identically.
std::string json_digest(const nlohmann::json& j);

/// Throws when the object holds keys outside the allowed set.
void reject_unknown_keys(const nlohmann::json& j, const char* where,
                         std::initializer_list<const char*> allowed);

} // namespace vlab
