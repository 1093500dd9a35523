#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "loadkit/case_io.hpp"
#include "loadkit/network.hpp"

namespace testutil {

inline std::string data_path(const std::string& name) {
    return std::string(LOADKIT_DATA_DIR) + "/" + name;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "cannot open " << path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline loadkit::Network load_json_net(const std::string& name) {
    return loadkit::parse_network_json(slurp(data_path(name)));
}

inline loadkit::VoltageState load_state(const loadkit::Network& net,
                                        const std::string& name) {
    return loadkit::parse_state_json(net, slurp(data_path(name)));
}

// Triangle of unit conductances: slack bus 1 plus two load buses, the
// workhorse closed-form fixture of most tests.
inline loadkit::Network resistive_triangle(double p = 0.1875) {
    loadkit::Network net;
    net.base_power = 1.0;
    net.bus_ids = {1, 2, 3};
    net.slack = 0;
    net.slack_voltage = {1.0, 0.0};
    net.lines = {{0, 1, 1.0, 0.0}, {0, 2, 1.0, 0.0}, {1, 2, 1.0, 0.0}};
    net.p_target = {0.0, p, p};
    net.q_target = {0.0, 0.0, 0.0};
    net.finalize();
    return net;
}

// symmetric resistive-triangle state v2 = v3 = v (the closed-form family)
inline loadkit::VoltageState symmetric_state(const loadkit::Network& net, double v) {
    loadkit::VoltageState s(3);
    s.set(0, net.slack_voltage);
    s.re[1] = v;
    s.re[2] = v;
    return s;
}

}  // namespace testutil
