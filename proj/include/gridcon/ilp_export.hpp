#pragma once

#include <string>

#include "gridcon/network.hpp"

namespace gridcon {

struct IlpStats {
    std::size_t horizon = 0;  // T = |E| - 1
    std::size_t x_vars = 0;
    std::size_t z_vars = 0;
    std::size_t h_vars = 0;
    std::size_t g_vars = 0;
    std::size_t f_vars = 0;
    std::size_t constraints = 0;
};

/// LP-format model of the K-contingency problem over T = |E| - 1 steps.
/// x_<id>_<t> in [0,2] is the state of an entity at step t, f_<id> marks an
/// initial failure, and z/h/g auxiliaries stand for min-AND, max-OR and
/// new-XOR nodes of each IDR at each step t >= 1.
std::string export_ilp(const Network& network, int k, IlpStats* stats = nullptr);

}  // namespace gridcon
