#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "gridcon/network.hpp"

namespace gridcon {

/// Network file document. Keys: `entities`, `idrs`, `edges` (`pp`, `cc`,
/// `pc`), `links`, `annotations` (`generators`, `pmu_buses`, `substations`,
/// `control_centers`, `zones`), `initial_states` and `hardened`.
nlohmann::json save_network(const Network& network);

/// Parses and validates; throws NetworkError (or IdrParseError for bad IDR text).
Network load_network(const nlohmann::json& doc);

Network load_network_text(std::string_view text);
Network load_network_file(const std::string& path);
/// Deterministic pretty-printed JSON text.
std::string dump_network(const Network& network);

}  // namespace gridcon
