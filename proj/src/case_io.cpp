#include "loadkit/case_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "loadkit/errors.hpp"

namespace loadkit {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Cursor {
    std::string_view text;
    size_t pos = 0;
    int line = 1;

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    void advance() {
        if (text[pos] == '\n') ++line;
        ++pos;
    }
    void skip_ws_and_comments() {
        while (!eof()) {
            const char c = peek();
            if (c == '%') {
                while (!eof() && peek() != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
                advance();
            } else {
                break;
            }
        }
    }
};

[[noreturn]] void fail(const Cursor& c, const std::string& msg) {
    throw MalformedCase("line " + std::to_string(c.line) + ": " + msg);
}

double parse_number(Cursor& c) {
    c.skip_ws_and_comments();
    const size_t start = c.pos;
    while (!c.eof()) {
        const char ch = c.peek();
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '+' || ch == '-' ||
            ch == '.' || ch == 'e' || ch == 'E') {
            c.advance();
        } else {
            break;
        }
    }
    if (c.pos == start) fail(c, "expected numeric cell");
    double value = 0.0;
    const char* first = c.text.data() + start;
    const char* last = c.text.data() + c.pos;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) fail(c, "non-numeric cell");
    return value;
}

// Rows of whitespace-separated numerics terminated by ';', matrix by ']'.
std::vector<std::vector<double>> parse_matrix(Cursor& c) {
    c.skip_ws_and_comments();
    if (c.eof() || c.peek() != '[') fail(c, "expected '['");
    c.advance();
    std::vector<std::vector<double>> rows;
    std::vector<double> row;
    for (;;) {
        c.skip_ws_and_comments();
        if (c.eof()) fail(c, "unterminated matrix");
        const char ch = c.peek();
        if (ch == ']') {
            c.advance();
            if (!row.empty()) rows.push_back(std::move(row));
            break;
        }
        if (ch == ';' || ch == '\n') {
            c.advance();
            if (!row.empty()) {
                rows.push_back(std::move(row));
                row.clear();
            }
            continue;
        }
        row.push_back(parse_number(c));
    }
    c.skip_ws_and_comments();
    if (!c.eof() && c.peek() == ';') c.advance();
    return rows;
}

}  // namespace

NetworkCase parse_matpower(std::string_view text) {
    Cursor c{text};
    double base = 0.0;
    bool have_base = false;
    std::map<std::string, std::vector<std::vector<double>>> matrices;

    while (true) {
        c.skip_ws_and_comments();
        if (c.eof()) break;
        // read an identifier-ish token up to '='
        const size_t start = c.pos;
        while (!c.eof() && c.peek() != '=' && c.peek() != '\n') c.advance();
        if (c.eof()) break;
        if (c.peek() == '\n') {  // e.g. "function mpc = case14" handled below
            c.advance();
            continue;
        }
        std::string lhs(text.substr(start, c.pos - start));
        // trim
        auto trim = [](std::string& s) {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
                s.pop_back();
            size_t b = 0;
            while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
            s.erase(0, b);
        };
        trim(lhs);
        c.advance();  // consume '='
        if (lhs.rfind("function", 0) == 0) {
            while (!c.eof() && c.peek() != '\n') c.advance();
            continue;
        }
        if (lhs.rfind("mpc.", 0) != 0) {
            // skip unknown assignment to end of statement
            while (!c.eof() && c.peek() != ';' && c.peek() != '\n') c.advance();
            continue;
        }
        const std::string name = lhs.substr(4);
        if (name == "baseMVA") {
            base = parse_number(c);
            have_base = true;
            c.skip_ws_and_comments();
            if (!c.eof() && c.peek() == ';') c.advance();
        } else if (name == "version") {
            c.skip_ws_and_comments();
            while (!c.eof() && c.peek() != ';' && c.peek() != '\n') c.advance();
        } else {
            c.skip_ws_and_comments();
            if (!c.eof() && c.peek() == '[') {
                matrices[name] = parse_matrix(c);
            } else {
                while (!c.eof() && c.peek() != ';' && c.peek() != '\n') c.advance();
            }
        }
    }

    if (!have_base) throw MalformedCase("missing mpc.baseMVA");
    if (base <= 0.0) throw MalformedCase("mpc.baseMVA must be positive");
    if (!matrices.count("bus")) throw MalformedCase("missing mpc.bus");
    if (!matrices.count("branch")) throw MalformedCase("missing mpc.branch");

    NetworkCase cs;
    cs.base_power = base;

    int slack_count = 0;
    for (const auto& row : matrices["bus"]) {
        if (row.size() < 13)
            throw MalformedCase("mpc.bus row has fewer than 13 columns");
        CaseBus b;
        b.id = static_cast<int>(row[0]);
        const int type = static_cast<int>(row[1]);
        switch (type) {
            case 1: b.kind = BusKind::PQ; break;
            case 2: b.kind = BusKind::PV; break;
            case 3: b.kind = BusKind::Slack; ++slack_count; break;
            default:
                throw MalformedCase("unsupported bus type " + std::to_string(type) +
                                    " at bus " + std::to_string(b.id));
        }
        b.p_load = row[2] / base;
        b.q_load = row[3] / base;
        b.shunt_g = row[4] / base;
        b.shunt_b = row[5] / base;
        b.vm = row[7];
        b.va_deg = row[8];
        cs.buses.push_back(b);
    }
    if (slack_count == 0) throw MalformedCase("no slack bus (type 3) in mpc.bus");
    if (slack_count > 1) throw MalformedCase("multiple slack buses in mpc.bus");
    {
        std::vector<int> ids;
        for (const auto& b : cs.buses) ids.push_back(b.id);
        std::sort(ids.begin(), ids.end());
        if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
            throw MalformedCase("duplicate bus id in mpc.bus");
    }

    for (const auto& row : matrices["branch"]) {
        if (row.size() < 13)
            throw MalformedCase("mpc.branch row has fewer than 13 columns");
        CaseBranch br;
        br.from = static_cast<int>(row[0]);
        br.to = static_cast<int>(row[1]);
        br.r = row[2];
        br.x = row[3];
        br.total_charging_b = row[4];
        br.tap_ratio = row[8];
        br.phase_shift_deg = row[9];
        br.in_service = row[10] != 0.0;
        if (br.r < 0.0) throw MalformedCase("negative branch resistance");
        if (!br.in_service) continue;
        cs.branches.push_back(br);
    }

    if (matrices.count("gen")) {
        for (const auto& row : matrices["gen"]) {
            if (row.size() < 10)
                throw MalformedCase("mpc.gen row has fewer than 10 columns");
            CaseGen g;
            g.bus = static_cast<int>(row[0]);
            g.pg = row[1] / base;
            g.qg = row[2] / base;
            g.qmax = row[3] / base;
            g.qmin = row[4] / base;
            g.in_service = row[7] != 0.0;
            if (!g.in_service) continue;
            cs.gens.push_back(g);
        }
    }
    return cs;
}

Network model_network(const NetworkCase& cs, const ModelPolicy& policy) {
    Network net;
    net.base_power = cs.base_power;

    const int nb = static_cast<int>(cs.buses.size());
    net.bus_ids.reserve(nb);
    net.p_target.assign(nb, 0.0);
    net.q_target.assign(nb, 0.0);
    net.q_load.assign(nb, 0.0);
    net.q_limits.assign(nb, std::nullopt);
    std::map<int, int> index_of;
    bool shunt_seen = false;
    for (int i = 0; i < nb; ++i) {
        const CaseBus& b = cs.buses[i];
        net.bus_ids.push_back(b.id);
        index_of[b.id] = i;
        if (b.kind == BusKind::Slack) {
            net.slack = i;
            const double a = b.va_deg * kPi / 180.0;
            net.slack_voltage = Complex{b.vm * std::cos(a), b.vm * std::sin(a)};
        }
        net.p_target[i] = b.p_load;
        net.q_target[i] = b.q_load;
        net.q_load[i] = b.q_load;
        if (b.shunt_g != 0.0 || b.shunt_b != 0.0) shunt_seen = true;
    }
    if (shunt_seen) {
        if (policy.shunts == ShuntPolicy::Reject)
            throw UnsupportedFeature("bus shunts present and strict mode is enabled");
        net.warnings.push_back("bus shunt elements dropped (series-line model)");
    }

    bool tap_seen = false, charging_seen = false;
    std::map<std::pair<int, int>, Complex> merged;
    for (const CaseBranch& br : cs.branches) {
        if (!index_of.count(br.from) || !index_of.count(br.to))
            throw MalformedCase("branch endpoint references missing bus " +
                                std::to_string(index_of.count(br.from) ? br.to : br.from));
        if (br.r == 0.0 && br.x == 0.0)
            throw MalformedCase("branch " + std::to_string(br.from) + "-" +
                                std::to_string(br.to) +
                                " has r=x=0 (ideal jumpers are not representable)");
        if ((br.tap_ratio != 0.0 && br.tap_ratio != 1.0) || br.phase_shift_deg != 0.0)
            tap_seen = true;
        if (br.total_charging_b != 0.0) charging_seen = true;
        const Complex y = 1.0 / Complex{br.r, br.x};
        int a = index_of[br.from], b = index_of[br.to];
        if (a > b) std::swap(a, b);
        merged[{a, b}] += y;
    }
    if (tap_seen) {
        if (policy.taps == TapPolicy::Reject)
            throw UnsupportedFeature("transformer taps/phase shifts present and strict mode is enabled");
        net.warnings.push_back("transformer tap ratios and phase shifts ignored");
    }
    if (charging_seen) net.warnings.push_back("line charging susceptance dropped");

    for (const auto& [key, y] : merged)
        net.lines.push_back(Line{key.first, key.second, y.real(), y.imag()});

    // net injections, consumption-positive
    for (const CaseGen& g : cs.gens) {
        if (!index_of.count(g.bus))
            throw MalformedCase("gen references missing bus " + std::to_string(g.bus));
        const int i = index_of[g.bus];
        net.p_target[i] -= g.pg;
        if (policy.use_gen_q) net.q_target[i] -= g.qg;
        if (net.q_limits[i]) {
            net.q_limits[i]->qmin += g.qmin;
            net.q_limits[i]->qmax += g.qmax;
        } else {
            net.q_limits[i] = QLimit{g.qmin, g.qmax};
        }
    }

    net.finalize();
    return net;
}

Network parse_network_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    try {
        Network net;
        net.base_power = j.value("base_power", 1.0);
        const auto& slack = j.at("slack");
        const int slack_id = slack.at("id").get<int>();
        net.slack_voltage = Complex{slack.at("v_re").get<double>(),
                                    slack.at("v_im").get<double>()};
        std::map<int, int> index_of;
        auto add_bus = [&](int id) {
            if (index_of.count(id))
                throw InvariantViolation("duplicate bus id " + std::to_string(id));
            index_of[id] = static_cast<int>(net.bus_ids.size());
            net.bus_ids.push_back(id);
            net.p_target.push_back(0.0);
            net.q_target.push_back(0.0);
            net.q_limits.push_back(std::nullopt);
            return index_of[id];
        };
        net.slack = add_bus(slack_id);
        for (const auto& b : j.at("buses")) {
            const int id = b.at("id").get<int>();
            if (id == slack_id)
                throw InvariantViolation("slack bus listed twice (two slack buses)");
            const int i = add_bus(id);
            net.p_target[i] = b.at("p").get<double>();
            net.q_target[i] = b.at("q").get<double>();
            const bool has_min = b.contains("qmin") && !b["qmin"].is_null();
            const bool has_max = b.contains("qmax") && !b["qmax"].is_null();
            if (has_min || has_max)
                net.q_limits[i] =
                    QLimit{has_min ? b["qmin"].get<double>() : -1e30,
                           has_max ? b["qmax"].get<double>() : 1e30};
        }
        for (const auto& l : j.at("lines")) {
            const int from = l.at("from").get<int>();
            const int to = l.at("to").get<int>();
            if (!index_of.count(from) || !index_of.count(to))
                throw InvariantViolation("line endpoint references missing bus");
            net.lines.push_back(Line{index_of[from], index_of[to],
                                     l.at("g").get<double>(), l.at("b").get<double>()});
        }
        net.finalize();
        return net;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("network schema: ") + e.what());
    }
}

std::string serialize_network_json(const Network& net) {
    nlohmann::json j;
    j["base_power"] = net.base_power;
    j["slack"] = {{"id", net.bus_ids[net.slack]},
                  {"v_re", net.slack_voltage.real()},
                  {"v_im", net.slack_voltage.imag()}};
    j["buses"] = nlohmann::json::array();
    for (int i = 0; i < net.bus_count(); ++i) {
        if (i == net.slack) continue;
        nlohmann::json b{{"id", net.bus_ids[i]},
                         {"p", net.p_target[i]},
                         {"q", net.q_target[i]}};
        if (net.q_limits[i]) {
            b["qmin"] = net.q_limits[i]->qmin;
            b["qmax"] = net.q_limits[i]->qmax;
        } else {
            b["qmin"] = nullptr;
            b["qmax"] = nullptr;
        }
        j["buses"].push_back(std::move(b));
    }
    j["lines"] = nlohmann::json::array();
    for (const Line& l : net.lines)
        j["lines"].push_back({{"from", net.bus_ids[l.from]},
                              {"to", net.bus_ids[l.to]},
                              {"g", l.g},
                              {"b", l.b}});
    return j.dump(2);
}

VoltageState parse_state_json(const Network& net, std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    try {
        VoltageState v(net.bus_count());
        std::vector<bool> seen(net.bus_count(), false);
        for (const auto& b : j.at("buses")) {
            const int i = net.internal_index(b.at("id").get<int>());
            v.re[i] = b.at("v_re").get<double>();
            v.im[i] = b.at("v_im").get<double>();
            seen[i] = true;
        }
        for (int i = 0; i < net.bus_count(); ++i)
            if (!seen[i] && i != net.slack)
                throw SchemaError("state missing bus id " +
                                  std::to_string(net.bus_ids[i]));
        v.set(net.slack, net.slack_voltage);
        return v;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("state schema: ") + e.what());
    }
}

std::string serialize_state_json(const Network& net, const VoltageState& v) {
    nlohmann::json j;
    j["buses"] = nlohmann::json::array();
    for (int i = 0; i < net.bus_count(); ++i)
        j["buses"].push_back(
            {{"id", net.bus_ids[i]}, {"v_re", v.re[i]}, {"v_im", v.im[i]}});
    return j.dump(2);
}

VoltageState case_initial_state(const Network& net, const NetworkCase& cs) {
    VoltageState v(net.bus_count());
    for (int i = 0; i < net.bus_count() && i < static_cast<int>(cs.buses.size()); ++i) {
        const double a = cs.buses[i].va_deg * kPi / 180.0;
        const double m = cs.buses[i].vm > 0.0 ? cs.buses[i].vm : 1.0;
        v.re[i] = m * std::cos(a);
        v.im[i] = m * std::sin(a);
    }
    v.set(net.slack, net.slack_voltage);
    return v;
}

}  // namespace loadkit
