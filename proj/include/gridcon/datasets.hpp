#pragma once

#include <string_view>

#include "gridcon/network.hpp"

namespace gridcon {

/// IEEE 14-bus grid with 11 substations, 7 SADMs and 5 OADMs. Substation 1
/// is the control center; bus 12 sits alone in substation 6, whose server and
/// gateway depend on each other and relay SADM 1.
Network build_ieee14();

/// IEEE 118-bus grid with 107 substations in 8 zones, one SADM per generator
/// bus (54), 31 OADMs on a DWDM backbone ring, and control centers at
/// substations 61 (main) and 16 (backup).
Network build_ieee118();

/// `ieee14` or `ieee118`; throws std::invalid_argument otherwise.
Network build_dataset(std::string_view name);

}  // namespace gridcon
