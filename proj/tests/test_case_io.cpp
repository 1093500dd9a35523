#include <doctest.h>

#include <string>

#include "loadkit/case_io.hpp"
#include "loadkit/errors.hpp"

#include "fixtures.hpp"

using namespace loadkit;
using testutil::data_path;
using testutil::slurp;

TEST_CASE("case14 parses with expected dimensions") {
    const NetworkCase cs = parse_matpower(slurp(data_path("case14.m")));
    CHECK(cs.base_power == 100.0);
    CHECK(cs.buses.size() == 14);
    CHECK(cs.branches.size() == 20);
    CHECK(cs.gens.size() == 5);
    CHECK(cs.buses[0].kind == BusKind::Slack);
    // per-unit conversion of the bus-2 load
    CHECK(cs.buses[1].p_load == doctest::Approx(0.217));
    CHECK(cs.buses[1].q_load == doctest::Approx(0.127));
}

TEST_CASE("case14 models to a 13-load network with policy warnings") {
    const NetworkCase cs = parse_matpower(slurp(data_path("case14.m")));
    const Network net = model_network(cs);
    CHECK(net.bus_count() == 14);
    CHECK(net.n() == 13);
    CHECK(net.bus_ids[net.slack] == 1);
    // shunt at bus 9, taps on three branches, charging on the 1-2 corridor
    REQUIRE(net.warnings.size() >= 3);
    // gen at bus 2 nets out part of the load
    const int b2 = net.internal_index(2);
    CHECK(net.p_target[b2] == doctest::Approx(0.217 - 0.40));
    CHECK(net.q_limits[b2].has_value());
    CHECK(net.q_limits[b2]->qmax == doctest::Approx(0.50));
    CHECK(net.q_limits[b2]->qmin == doctest::Approx(-0.40));
}

TEST_CASE("strict policy rejects shunts and taps") {
    const NetworkCase cs = parse_matpower(slurp(data_path("case14.m")));
    ModelPolicy strict;
    strict.shunts = ShuntPolicy::Reject;
    strict.taps = TapPolicy::Reject;
    CHECK_THROWS_AS(model_network(cs, strict), UnsupportedFeature);
}

TEST_CASE("malformed cases fail with diagnostics") {
    CHECK_THROWS_AS(parse_matpower("mpc.bus = [1 3 0 0 0 0 1 1 0 0 1 1.1 0.9];"),
                    MalformedCase);
    CHECK_THROWS_WITH_AS(parse_matpower("mpc.baseMVA = 100;"),
                         doctest::Contains("missing mpc.bus"), MalformedCase);

    const std::string base =
        "mpc.baseMVA = 100;\n"
        "mpc.bus = [\n"
        " 1 3 0 0 0 0 1 1 0 0 1 1.1 0.9;\n"
        " 2 1 5 2 0 0 1 1 0 0 1 1.1 0.9;\n"
        "];\n";
    SUBCASE("unsupported bus type") {
        CHECK_THROWS_AS(
            parse_matpower("mpc.baseMVA=100;\nmpc.bus=[1 4 0 0 0 0 1 1 0 0 1 1.1 0.9];\n"
                           "mpc.branch=[];"),
            MalformedCase);
    }
    SUBCASE("negative resistance") {
        CHECK_THROWS_AS(
            parse_matpower(base + "mpc.branch=[1 2 -0.1 0.2 0 0 0 0 0 0 1 -360 360];"),
            MalformedCase);
    }
    SUBCASE("ideal jumper is rejected at modeling") {
        const NetworkCase cs = parse_matpower(
            base + "mpc.branch=[1 2 0 0 0 0 0 0 0 0 1 -360 360];");
        CHECK_THROWS_WITH_AS(model_network(cs), doctest::Contains("r=x=0"),
                             MalformedCase);
    }
    SUBCASE("duplicate bus ids") {
        CHECK_THROWS_AS(
            parse_matpower("mpc.baseMVA=100;\nmpc.bus=[\n"
                           "1 3 0 0 0 0 1 1 0 0 1 1.1 0.9;\n"
                           "1 1 0 0 0 0 1 1 0 0 1 1.1 0.9;\n];\n"
                           "mpc.branch=[1 1 0.1 0.2 0 0 0 0 0 0 1 -360 360];"),
            MalformedCase);
    }
    SUBCASE("two slack buses") {
        CHECK_THROWS_AS(
            parse_matpower("mpc.baseMVA=100;\nmpc.bus=[\n"
                           "1 3 0 0 0 0 1 1 0 0 1 1.1 0.9;\n"
                           "2 3 0 0 0 0 1 1 0 0 1 1.1 0.9;\n];\n"
                           "mpc.branch=[1 2 0.1 0.2 0 0 0 0 0 0 1 -360 360];"),
            MalformedCase);
    }
}

TEST_CASE("out-of-service branches and gens are excluded") {
    const std::string text =
        "mpc.baseMVA = 100;\n"
        "mpc.bus = [\n"
        " 1 3 0 0 0 0 1 1 0 0 1 1.1 0.9;\n"
        " 2 1 5 2 0 0 1 1 0 0 1 1.1 0.9;\n"
        "];\n"
        "mpc.gen = [ 2 100 0 50 -50 1 100 0 200 0 ];\n"
        "mpc.branch = [\n"
        " 1 2 0.1 0.2 0 0 0 0 0 0 1 -360 360;\n"
        " 1 2 0.3 0.6 0 0 0 0 0 0 0 -360 360;\n"
        "];\n";
    const NetworkCase cs = parse_matpower(text);
    CHECK(cs.branches.size() == 1);
    CHECK(cs.gens.empty());
    const Network net = model_network(cs);
    CHECK(net.p_target[net.internal_index(2)] == doctest::Approx(0.05));
}

TEST_CASE("parallel branches merge by admittance addition") {
    const std::string text =
        "mpc.baseMVA = 100;\n"
        "mpc.bus = [\n"
        " 1 3 0 0 0 0 1 1 0 0 1 1.1 0.9;\n"
        " 2 1 0 0 0 0 1 1 0 0 1 1.1 0.9;\n"
        "];\n"
        "mpc.branch = [\n"
        " 1 2 1 0 0 0 0 0 0 0 1 -360 360;\n"
        " 2 1 1 0 0 0 0 0 0 0 1 -360 360;\n"
        "];\n";
    const Network net = model_network(parse_matpower(text));
    REQUIRE(net.lines.size() == 1);
    CHECK(net.lines[0].g == doctest::Approx(2.0));
    CHECK(net.lines[0].b == doctest::Approx(0.0));
}

TEST_CASE("network JSON round trip is exact") {
    for (const char* name : {"two_bus.json", "tri3_resistive.json",
                             "tri3_complex.json", "tri3_reactive.json"}) {
        CAPTURE(name);
        const Network net = testutil::load_json_net(name);
        const std::string once = serialize_network_json(net);
        const Network again = parse_network_json(once);
        CHECK(serialize_network_json(again) == once);
        CHECK(again.bus_count() == net.bus_count());
        CHECK(again.lines.size() == net.lines.size());
    }
}

TEST_CASE("matpower-derived networks survive the JSON round trip") {
    const Network net = model_network(parse_matpower(slurp(data_path("case14.m"))));
    const Network again = parse_network_json(serialize_network_json(net));
    CHECK(serialize_network_json(again) == serialize_network_json(net));
    CHECK(again.n() == 13);
}

TEST_CASE("state JSON round trip") {
    const Network net = testutil::load_json_net("tri3_resistive.json");
    const VoltageState v = testutil::load_state(net, "pointA.json");
    CHECK(v.re[net.internal_index(2)] == 0.5);
    const VoltageState again = parse_state_json(net, serialize_state_json(net, v));
    for (int i = 0; i < net.bus_count(); ++i) {
        CHECK(again.re[i] == v.re[i]);
        CHECK(again.im[i] == v.im[i]);
    }
    CHECK_THROWS_AS(parse_state_json(net, "{\"buses\": []}"), SchemaError);
    CHECK_THROWS_AS(parse_state_json(net, "not json"), SchemaError);
}

TEST_CASE("json schema violations raise SchemaError") {
    CHECK_THROWS_AS(parse_network_json("{}"), SchemaError);
    CHECK_THROWS_AS(parse_network_json("[1,2,3]"), SchemaError);
    CHECK_THROWS_AS(
        parse_network_json("{\"slack\":{\"id\":1,\"v_re\":1,\"v_im\":0},"
                           "\"buses\":[{\"id\":2,\"p\":0,\"q\":0}],"
                           "\"lines\":[{\"from\":1,\"to\":9,\"g\":1,\"b\":0}]}"),
        Error);  // line endpoint missing
}

TEST_CASE("case initial state uses the stored voltage profile") {
    const NetworkCase cs = parse_matpower(slurp(data_path("case14.m")));
    const Network net = model_network(cs);
    const VoltageState v = case_initial_state(net, cs);
    const int b3 = net.internal_index(3);
    const double vm = std::hypot(v.re[b3], v.im[b3]);
    CHECK(vm == doctest::Approx(1.01).epsilon(1e-12));
    CHECK(v.im[b3] < 0.0);  // negative angle
    // slack pinned to its case voltage
    CHECK(v.re[net.slack] == doctest::Approx(1.06));
}
