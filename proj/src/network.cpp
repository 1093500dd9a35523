#include "loadkit/network.hpp"

#include <cmath>

#include "loadkit/errors.hpp"

namespace loadkit {

int Network::internal_index(int external_id) const {
    auto it = id_to_index_.find(external_id);
    if (it == id_to_index_.end())
        throw InvariantViolation("unknown bus id " + std::to_string(external_id));
    return it->second;
}

void Network::finalize() {
    const int nb = bus_count();
    id_to_index_.clear();
    for (int i = 0; i < nb; ++i) {
        if (!id_to_index_.emplace(bus_ids[i], i).second)
            throw InvariantViolation("duplicate bus id " + std::to_string(bus_ids[i]));
    }
    if (slack < 0 || slack >= nb)
        throw InvariantViolation("slack index out of range");

    adj_.assign(nb, {});
    for (int li = 0; li < static_cast<int>(lines.size()); ++li) {
        const Line& ln = lines[li];
        if (ln.from < 0 || ln.from >= nb || ln.to < 0 || ln.to >= nb)
            throw InvariantViolation("line endpoint references missing bus");
        if (ln.from == ln.to)
            throw InvariantViolation("line connects a bus to itself");
        adj_[ln.from].push_back(li);
        adj_[ln.to].push_back(li);
    }

    if (static_cast<int>(p_target.size()) != nb) p_target.assign(nb, 0.0);
    if (static_cast<int>(q_target.size()) != nb) q_target.assign(nb, 0.0);
    if (static_cast<int>(q_load.size()) != nb) q_load = q_target;
    if (static_cast<int>(q_limits.size()) != nb) q_limits.assign(nb, std::nullopt);

    bool any_positive_b = false;
    for (const Line& ln : lines) {
        if (!std::isfinite(ln.g) || !std::isfinite(ln.b))
            throw InvariantViolation("non-finite line admittance");
        if (ln.b > 0.0) any_positive_b = true;
    }
    if (any_positive_b)
        warnings.push_back(
            "non-inductive network: reactive circle monotonicity assumption violated");
}

VoltageState flat_state(const Network& net) {
    VoltageState v(net.bus_count());
    for (int b = 0; b < net.bus_count(); ++b) v.set(b, net.slack_voltage);
    return v;
}

}  // namespace loadkit
