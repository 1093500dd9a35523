#include <doctest.h>

#include <cmath>

#include "loadkit/errors.hpp"
#include "loadkit/geometry.hpp"
#include "loadkit/powerflow.hpp"

#include "fixtures.hpp"

using namespace loadkit;
using testutil::resistive_triangle;
using testutil::symmetric_state;

namespace {

// triangle with line admittance 1 - 0.5j, no targets: both circle kinds exist
Network complex_triangle() {
    Network net;
    net.base_power = 1.0;
    net.bus_ids = {1, 2, 3};
    net.slack = 0;
    net.slack_voltage = {1.0, 0.0};
    net.lines = {{0, 1, 1.0, -0.5}, {0, 2, 1.0, -0.5}, {1, 2, 1.0, -0.5}};
    net.p_target = {0.0, 0.0, 0.0};
    net.q_target = {0.0, 0.0, 0.0};
    net.finalize();
    return net;
}

// evaluates the quadratic injection forms directly at a circle sample
double p_at(const Network& net, const VoltageState& neighbors, int bus, double x,
            double y) {
    const TCoefficients t = t_coefficients(net, neighbors, bus);
    return t.t1 * (x * x + y * y) + t.t2 * x + t.t3 * y;
}

double q_at(const Network& net, const VoltageState& neighbors, int bus, double x,
            double y) {
    const TCoefficients t = t_coefficients(net, neighbors, bus);
    return t.t4 * (x * x + y * y) - t.t3 * x + t.t2 * y;
}

}  // namespace

TEST_CASE("circle geometry of the 1-0.5j triangle in closed form") {
    const Network net = complex_triangle();
    const VoltageState v = symmetric_state(net, 0.6);
    // t1 = -2, t2 = 1.6, t3 = -0.8, t4 = -1 at v3 = 0.6, all real
    const double p = 0.2, q = 0.05;
    const auto [active, reactive] = power_circles(net, v, 1, p, q);
    CHECK(active.cx == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(active.cy == doctest::Approx(-0.2).epsilon(1e-14));
    CHECK(active.radius_sq == doctest::Approx(-p / 2.0 + 0.2).epsilon(1e-12));
    CHECK(reactive.cx == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(reactive.cy == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(reactive.radius_sq == doctest::Approx(-q + 0.8).epsilon(1e-12));
    CHECK(active.kind == CircleKind::Active);
    CHECK(reactive.kind == CircleKind::Reactive);
}

TEST_CASE("sampled circle points reproduce their defining powers") {
    const Network net = testutil::load_json_net("tri3_complex.json");
    const VoltageState v = solve_power_flow(net);
    for (int bus : {1, 2}) {
        const double p = net.p_target[bus], q = net.q_target[bus];
        const auto [active, reactive] = power_circles(net, v, bus, p, q);
        for (const auto& [theta, x, y] : sample_circle(active, 250))
            CHECK(p_at(net, v, bus, x, y) == doctest::Approx(p).epsilon(1e-12));
        for (const auto& [theta, x, y] : sample_circle(reactive, 250))
            CHECK(q_at(net, v, bus, x, y) == doctest::Approx(q).epsilon(1e-12));
    }
}

TEST_CASE("the solved operating point lies on both of its circles") {
    const Network net = testutil::load_json_net("tri3_complex.json");
    const VoltageState v = solve_power_flow(net);
    for (int bus : {1, 2}) {
        const auto [active, reactive] =
            power_circles(net, v, bus, net.p_target[bus], net.q_target[bus]);
        const double dx = v.re[bus] - active.cx, dy = v.im[bus] - active.cy;
        CHECK(dx * dx + dy * dy == doctest::Approx(active.radius_sq).epsilon(1e-10));
        const double rx = v.re[bus] - reactive.cx, ry = v.im[bus] - reactive.cy;
        CHECK(rx * rx + ry * ry == doctest::Approx(reactive.radius_sq).epsilon(1e-10));
    }
}

TEST_CASE("radius shrinks as consumption grows, vanishing at the local max") {
    const Network net = complex_triangle();
    const VoltageState v = symmetric_state(net, 0.6);
    const double pmax = max_active_consumption(net, v, 1);
    CHECK(pmax == doctest::Approx(0.4).epsilon(1e-12));  // (t2^2+t3^2)/(4*|t1|)
    double last = 1e30;
    for (double p : {0.0, 0.1, 0.2, pmax}) {
        const auto [active, reactive] = power_circles(net, v, 1, p, 0.0);
        CHECK(active.radius_sq < last);
        last = active.radius_sq;
    }
    const auto [at_max, r_unused] = power_circles(net, v, 1, pmax, 0.0);
    CHECK(std::abs(at_max.radius_sq) < 1e-12);
    const auto [beyond, r_unused2] = power_circles(net, v, 1, pmax + 0.01, 0.0);
    CHECK(beyond.radius_sq < 0.0);
}

TEST_CASE("two-circle intersection, tangency and disjointness") {
    CircleDescriptor a{0, CircleKind::Active, 0.0, 0.0, 1.0};
    CircleDescriptor b{0, CircleKind::Reactive, 1.0, 0.0, 1.0};
    const CircleIntersection two = intersect(a, b);
    REQUIRE(two.points.size() == 2);
    CHECK(two.gap == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    for (const auto& [x, y] : two.points) {
        CHECK(x * x + y * y == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((x - 1.0) * (x - 1.0) + y * y == doctest::Approx(1.0).epsilon(1e-12));
    }

    CircleDescriptor t{0, CircleKind::Reactive, 2.0, 0.0, 1.0};
    const CircleIntersection tangent = intersect(a, t);
    CHECK(tangent.gap == doctest::Approx(0.0).epsilon(1e-9));

    CircleDescriptor far{0, CircleKind::Reactive, 5.0, 0.0, 1.0};
    CHECK_THROWS_AS(intersect(a, far), DisjointCircles);
}

TEST_CASE("gap ordering flags the heavier bus on the complex triangle") {
    const Network net = testutil::load_json_net("tri3_complex.json");
    const VoltageState v = solve_power_flow(net);
    double gap[2];
    for (int bus : {1, 2}) {
        const auto [active, reactive] =
            power_circles(net, v, bus, net.p_target[bus], net.q_target[bus]);
        gap[bus - 1] = intersect(active, reactive).gap;
    }
    CHECK(gap[1] < gap[0]);  // bus 3 runs closer to its limit than bus 2
}

TEST_CASE("gap shrinks monotonically on the final approach to the nose") {
    // symmetric real states form a constant-power-factor ray whose nose
    // is at v = 0.5; the intersection points merge as it is approached
    const Network net = complex_triangle();
    double last_gap = 1e30;
    for (double v2 : {0.8, 0.7, 0.6, 0.55, 0.51}) {
        const VoltageState v = symmetric_state(net, v2);
        const Injections inj = injections(net, v);
        const auto [active, reactive] = power_circles(net, v, 1, inj.p[1], inj.q[1]);
        const double gap = intersect(active, reactive).gap;
        CHECK(gap < last_gap + 1e-12);
        last_gap = gap;
    }
}

TEST_CASE("vanishing quadratic coefficients raise DegenerateCircle") {
    const Network reactive_net = testutil::load_json_net("tri3_reactive.json");
    VoltageState v(3);
    v.set(reactive_net.slack, reactive_net.slack_voltage);
    v.re[1] = v.re[2] = 0.9;
    CHECK_THROWS_AS(power_circles(reactive_net, v, 1, 0.1, 0.0), DegenerateCircle);

    const Network res = resistive_triangle();  // t4 = 0: no reactive circle
    CHECK_THROWS_AS(power_circles(res, symmetric_state(res, 0.7), 1, 0.1, 0.0),
                    DegenerateCircle);
}
