#pragma once

#include <complex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace loadkit {

using Complex = std::complex<double>;

// A modeled series line between two internal bus indices. Admittance
// g + jb is the inverse of the series impedance; b < 0 for inductive lines.
struct Line {
    int from = 0;
    int to = 0;
    double g = 0.0;
    double b = 0.0;

    int other(int bus) const { return bus == from ? to : from; }
};

struct QLimit {
    double qmin;
    double qmax;
};

// The modeled grid: one slack bus with fixed complex voltage, all other
// buses PQ with consumption-positive injection targets.
class Network {
public:
    double base_power = 1.0;
    std::vector<int> bus_ids;        // external ids, index = internal bus
    int slack = 0;                   // internal index of the slack bus
    Complex slack_voltage{1.0, 0.0};
    std::vector<Line> lines;
    std::vector<double> p_target;    // consumption-positive, per internal bus
    std::vector<double> q_target;
    std::vector<double> q_load;      // raw bus reactive load (gen output = q_load - q(v))
    std::vector<std::optional<QLimit>> q_limits;  // generator reactive bounds
    std::vector<std::string> warnings;

    int bus_count() const { return static_cast<int>(bus_ids.size()); }
    // number of non-slack (PQ) buses; the state dimension is 2n
    int n() const { return bus_count() - 1; }

    bool is_slack(int bus) const { return bus == slack; }

    // ordinal of a non-slack bus among non-slack buses (state indexing)
    int pq_ordinal(int bus) const { return bus < slack ? bus : bus - 1; }
    int pq_bus(int ordinal) const { return ordinal < slack ? ordinal : ordinal + 1; }

    int internal_index(int external_id) const;
    void finalize();  // build neighbor index, validate invariants

    const std::vector<int>& neighbor_lines(int bus) const { return adj_[bus]; }

private:
    std::vector<std::vector<int>> adj_;
    std::unordered_map<int, int> id_to_index_;
};

// Real/imaginary voltage parts for all buses (slack entries fixed).
struct VoltageState {
    std::vector<double> re;
    std::vector<double> im;

    VoltageState() = default;
    VoltageState(int nbus) : re(nbus, 0.0), im(nbus, 0.0) {}

    int size() const { return static_cast<int>(re.size()); }
    Complex at(int bus) const { return {re[bus], im[bus]}; }
    void set(int bus, Complex v) {
        re[bus] = v.real();
        im[bus] = v.imag();
    }
};

// Flat start: slack voltage replicated to every bus.
VoltageState flat_state(const Network& net);

}  // namespace loadkit
