#pragma once

#include "loadkit/network.hpp"

namespace loadkit {

struct TheveninEquivalent {
    int bus = 0;          // internal index
    Complex z_thev{0.0};  // per-unit
    Complex e_thev{0.0};  // open-circuit voltage
};

// Single-source reduction of the rest of the grid seen from one PQ bus.
// Other constant-power loads enter through their small-signal admittance
// at the operating point, so that |z_thev| meets |z_app| exactly at the
// loadability limit of the sweeps this baseline is compared on.
TheveninEquivalent thevenin_at(const Network& net, const VoltageState& v, int bus);

// Dimensionless margin in [0, 1]: 1 at no load, 0 at maximum power transfer.
double thevenin_margin(const Network& net, const VoltageState& v, int bus,
                       Complex s_load);

}  // namespace loadkit
