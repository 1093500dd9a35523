#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "loadkit/network.hpp"

namespace loadkit {

enum class BusKind { Slack, PQ, PV };

struct CaseBus {
    int id = 0;
    BusKind kind = BusKind::PQ;
    double p_load = 0.0;   // per-unit
    double q_load = 0.0;
    double shunt_g = 0.0;
    double shunt_b = 0.0;
    double vm = 1.0;
    double va_deg = 0.0;
};

struct CaseBranch {
    int from = 0;
    int to = 0;
    double r = 0.0;
    double x = 0.0;
    double total_charging_b = 0.0;
    double tap_ratio = 0.0;   // 0 means no transformer
    double phase_shift_deg = 0.0;
    bool in_service = true;
};

struct CaseGen {
    int bus = 0;
    double pg = 0.0;   // per-unit
    double qg = 0.0;
    double qmax = 0.0;
    double qmin = 0.0;
    bool in_service = true;
};

// Raw parsed case before modeling decisions.
struct NetworkCase {
    double base_power = 100.0;
    std::vector<CaseBus> buses;
    std::vector<CaseBranch> branches;
    std::vector<CaseGen> gens;
};

enum class ShuntPolicy { DropWithWarning, Reject };
enum class TapPolicy { IgnoreWithWarning, Reject };

struct ModelPolicy {
    ShuntPolicy shunts = ShuntPolicy::DropWithWarning;
    TapPolicy taps = TapPolicy::IgnoreWithWarning;
    bool use_gen_q = true;  // PV->PQ conversion uses the gen-table qg
    bool apply_gen_q_limits = false;
};

// MATPOWER `.m` subset: mpc.baseMVA, mpc.bus, mpc.branch required,
// mpc.gen optional. Off-status rows excluded; quantities converted
// to per-unit on baseMVA. Throws MalformedCase with line diagnostics.
NetworkCase parse_matpower(std::string_view text);

// Native JSON schema with direct line admittances.
Network parse_network_json(std::string_view text);
std::string serialize_network_json(const Network& net);

Network model_network(const NetworkCase& cs, const ModelPolicy& policy = {});

// VoltageState JSON: {"buses": [{"id", "v_re", "v_im"}]}
VoltageState parse_state_json(const Network& net, std::string_view text);
std::string serialize_state_json(const Network& net, const VoltageState& v);

// Initial guess from the case's vm/va columns (external operating point).
VoltageState case_initial_state(const Network& net, const NetworkCase& cs);

}  // namespace loadkit
