#include "loadkit/geometry.hpp"

#include <cmath>

#include "loadkit/errors.hpp"

namespace loadkit {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDegenerate = 1e-14;
}

double CircleDescriptor::radius() const {
    return radius_sq > 0.0 ? std::sqrt(radius_sq) : 0.0;
}

CircleDescriptor power_circle(const Network& net, const VoltageState& neighbors,
                              int bus, CircleKind kind, double value) {
    const TCoefficients t = t_coefficients(net, neighbors, bus);
    CircleDescriptor c;
    c.bus = bus;
    c.kind = kind;
    if (kind == CircleKind::Active) {
        if (std::abs(t.t1) < kDegenerate)
            throw DegenerateCircle(
                "t1 = 0 at bus " + std::to_string(net.bus_ids[bus]) +
                " (purely reactive network): active-power locus is a line");
        c.cx = -t.t2 / (2.0 * t.t1);
        c.cy = -t.t3 / (2.0 * t.t1);
        c.radius_sq =
            value / t.t1 + (t.t2 * t.t2 + t.t3 * t.t3) / (4.0 * t.t1 * t.t1);
    } else {
        if (std::abs(t.t4) < kDegenerate)
            throw DegenerateCircle(
                "t4 = 0 at bus " + std::to_string(net.bus_ids[bus]) +
                " (purely resistive network): reactive-power locus is a line");
        c.cx = t.t3 / (2.0 * t.t4);
        c.cy = -t.t2 / (2.0 * t.t4);
        c.radius_sq =
            value / t.t4 + (t.t3 * t.t3 + t.t2 * t.t2) / (4.0 * t.t4 * t.t4);
    }
    return c;
}

std::pair<CircleDescriptor, CircleDescriptor> power_circles(
    const Network& net, const VoltageState& neighbors, int bus, double p_d,
    double q_d) {
    return {power_circle(net, neighbors, bus, CircleKind::Active, p_d),
            power_circle(net, neighbors, bus, CircleKind::Reactive, q_d)};
}

double max_active_consumption(const Network& net, const VoltageState& neighbors,
                              int bus) {
    const TCoefficients t = t_coefficients(net, neighbors, bus);
    if (std::abs(t.t1) < kDegenerate)
        throw DegenerateCircle("t1 = 0: active consumption is unbounded above");
    return -(t.t2 * t.t2 + t.t3 * t.t3) / (4.0 * t.t1);
}

CircleIntersection intersect(const CircleDescriptor& a, const CircleDescriptor& b) {
    if (a.radius_sq < 0.0 || b.radius_sq < 0.0)
        throw DisjointCircles("a circle is empty (radius_sq < 0)");
    const double r1 = a.radius(), r2 = b.radius();
    const double dx = b.cx - a.cx, dy = b.cy - a.cy;
    const double d = std::hypot(dx, dy);
    if (d < kDegenerate) {
        if (std::abs(r1 - r2) < 1e-12 && r1 < kDegenerate) {
            CircleIntersection one;
            one.points.push_back({a.cx, a.cy});
            return one;
        }
        throw DisjointCircles("concentric circles with distinct radii");
    }
    if (d > r1 + r2 + 1e-12 || d < std::abs(r1 - r2) - 1e-12)
        throw DisjointCircles("circles do not intersect: (p,q) locally infeasible");

    // foot of the radical axis
    const double along = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    double h2 = r1 * r1 - along * along;
    if (h2 < 0.0) h2 = 0.0;
    const double h = std::sqrt(h2);
    const double px = a.cx + along * dx / d;
    const double py = a.cy + along * dy / d;

    CircleIntersection out;
    if (h < 1e-12) {
        out.points.push_back({px, py});
        out.gap = 0.0;
    } else {
        out.points.push_back({px + h * dy / d, py - h * dx / d});
        out.points.push_back({px - h * dy / d, py + h * dx / d});
        out.gap = 2.0 * h;
    }
    return out;
}

std::vector<std::array<double, 3>> sample_circle(const CircleDescriptor& c,
                                                 int samples) {
    std::vector<std::array<double, 3>> out;
    if (c.radius_sq < 0.0 || samples <= 0) return out;
    const double r = c.radius();
    out.reserve(samples);
    for (int i = 0; i < samples; ++i) {
        const double theta = 2.0 * kPi * i / samples;
        out.push_back({theta, c.cx + r * std::cos(theta), c.cy + r * std::sin(theta)});
    }
    return out;
}

}  // namespace loadkit
