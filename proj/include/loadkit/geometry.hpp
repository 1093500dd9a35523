#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "loadkit/network.hpp"
#include "loadkit/powerflow.hpp"

namespace loadkit {

enum class CircleKind { Active, Reactive };

// Locus of constant p_d (or q_d) in the (v_re, v_im) plane of one bus,
// with the neighbor voltages frozen. radius_sq < 0 means the circle is empty.
struct CircleDescriptor {
    int bus = 0;  // internal index
    CircleKind kind = CircleKind::Active;
    double cx = 0.0;
    double cy = 0.0;
    double radius_sq = 0.0;

    double radius() const;
};

struct CircleIntersection {
    std::vector<std::pair<double, double>> points;  // 0, 1 or 2
    double gap = 0.0;  // distance between the two points; 0 when tangent
};

// Completed-square circle form of one locus of bus d; `value` is the
// target p_d (active) or q_d (reactive). Throws DegenerateCircle when the
// requested kind's quadratic coefficient vanishes.
CircleDescriptor power_circle(const Network& net, const VoltageState& neighbors,
                              int bus, CircleKind kind, double value);

// Both loci at once; throws when either kind is degenerate.
std::pair<CircleDescriptor, CircleDescriptor> power_circles(
    const Network& net, const VoltageState& neighbors, int bus, double p_d,
    double q_d);

// Largest consumption the bus supports given frozen neighbor voltages
// (active circle collapses to a point).
double max_active_consumption(const Network& net, const VoltageState& neighbors,
                              int bus);

// Standard two-circle intersection; throws DisjointCircles when the
// (p, q) pair is locally infeasible.
CircleIntersection intersect(const CircleDescriptor& a, const CircleDescriptor& b);

// theta-uniform samples of the circle, for CSV emission
std::vector<std::array<double, 3>> sample_circle(const CircleDescriptor& c,
                                                 int samples);

}  // namespace loadkit
