// loadkit command-line front end. All analysis goes through the shared
// library's C interface; this file only handles argument parsing, file IO
// and report assembly.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "loadkit.h"

using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;
constexpr int kExitOnBoundary = 10;
constexpr int kExitAlarm = 11;

int exit_code_for(lk_status st) {
    switch (st) {
        case LK_OK:
            return kExitOk;
        case LK_ERR_INPUT:
        case LK_ERR_UNSUPPORTED:
        case LK_ERR_ARGUMENT:
            return kExitInput;
        default:
            return kExitSolver;
    }
}

[[noreturn]] void die(lk_status st) {
    std::cerr << "error: " << lk_last_error() << "\n";
    std::exit(exit_code_for(st));
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot read " << path << "\n";
        std::exit(kExitInput);
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct OwnedString {
    char* p = nullptr;
    ~OwnedString() { lk_string_free(p); }
    std::string str() const { return p ? p : ""; }
};

struct NetworkHandle {
    lk_network* p = nullptr;
    ~NetworkHandle() { lk_network_free(p); }
};

struct StateHandle {
    lk_state* p = nullptr;
    ~StateHandle() { lk_state_free(p); }
};

bool looks_like_matpower(const std::string& path, const std::string& text) {
    if (path.size() > 2 && path.substr(path.size() - 2) == ".m") return true;
    return text.find("mpc.") != std::string::npos;
}

struct Session {
    std::string case_path;
    std::string case_text;
    std::string digest;
    NetworkHandle net;
    double base_power = 1.0;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    void load() {
        case_text = slurp(case_path);
        digest = fnv1a_hex(case_text);
        lk_status st;
        if (looks_like_matpower(case_path, case_text))
            st = lk_network_from_matpower(case_text.c_str(), &net.p);
        else
            st = lk_network_from_json(case_text.c_str(), &net.p);
        if (st != LK_OK) die(st);
        OwnedString nj;
        if (lk_network_to_json(net.p, &nj.p) == LK_OK)
            base_power = json::parse(nj.str()).value("base_power", 1.0);
    }

    // Loads --state if given, otherwise leaves the handle null (the C API
    // then solves the case internally).
    void load_state(const std::string& state_path, StateHandle& out) {
        if (state_path.empty()) return;
        const std::string text = slurp(state_path);
        const lk_status st = lk_state_from_json(net.p, text.c_str(), &out.p);
        if (st != LK_OK) die(st);
    }

    json report(const std::string& command, json results) {
        OwnedString warn;
        json warnings = json::array();
        if (lk_network_warnings(net.p, &warn.p) == LK_OK)
            warnings = json::parse(warn.str());
        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
        return {{"command", command},
                {"input_digest", digest},
                {"results", std::move(results)},
                {"warnings", warnings},
                {"timing_ms", ms}};
    }
};

void emit_report(const json& report, const std::string& format) {
    if (format == "csv") {
        // flat key,value rows of the results payload
        std::cout << "key,value\n";
        for (const auto& [k, v] : report.at("results").items())
            std::cout << k << "," << (v.is_string() ? v.get<std::string>() : v.dump())
                      << "\n";
    } else {
        // timing excluded from the deterministic payload
        json out = report;
        out.erase("timing_ms");
        std::cout << out.dump(2) << "\n";
    }
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write " << path << "\n";
        std::exit(kExitInput);
    }
    out << data;
}

// "bus=69,min=-50,max=50" (natural case units, e.g. MVAr for .m input)
json parse_q_limit_flag(const std::string& s, double base_power) {
    json out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            std::cerr << "error: bad --q-limit entry '" << item << "'\n";
            std::exit(kExitInput);
        }
        const std::string key = item.substr(0, eq);
        const double val = std::stod(item.substr(eq + 1));
        if (key == "bus")
            out["bus"] = static_cast<int>(val);
        else if (key == "min")
            out["qmin"] = val / base_power;
        else if (key == "max")
            out["qmax"] = val / base_power;
        else {
            std::cerr << "error: bad --q-limit key '" << key << "'\n";
            std::exit(kExitInput);
        }
    }
    return out;
}

// "lo:hi:steps"
bool parse_sweep_spec(const std::string& s, double& lo, double& hi, int& steps) {
    std::stringstream ss(s);
    std::string a, b, c;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') ||
        !std::getline(ss, c, ':'))
        return false;
    try {
        lo = std::stod(a);
        hi = std::stod(b);
        steps = std::stoi(c);
    } catch (...) {
        return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"loadability analysis for AC power networks"};
    app.require_subcommand(1);

    std::string format = "json";
    app.add_option("--format", format, "json|csv output format")
        ->check(CLI::IsMember({"json", "csv"}));
    // Parallelism cap; the current implementation is single-threaded, the
    // variable is accepted for forward compatibility.
    if (const char* threads = std::getenv("LOADKIT_THREADS"); threads && *threads)
        (void)threads;

    std::string case_path, state_path, out_prefix;
    double epsilon = 0.0, tol = 1e-9;
    bool use_q_limits = false;
    std::vector<std::string> q_limit_flags;

    auto add_common = [&](CLI::App* cmd) {
        cmd->fallthrough();  // let --format appear after the subcommand too
        cmd->add_option("case", case_path, "network case (.m or .json)")
            ->required();
        cmd->add_option("--out", out_prefix, "prefix for emitted CSV files");
    };
    auto add_point_flags = [&](CLI::App* cmd) {
        cmd->add_option("--state", state_path, "operating point JSON");
        cmd->add_option("--tol", tol, "numeric tolerance");
        cmd->add_flag("--q-limits", use_q_limits,
                      "apply binding generator reactive limits from the case");
        cmd->add_option("--q-limit", q_limit_flags,
                        "override: bus=<id>,min=<v>,max=<v> (case units)");
    };

    CLI::App* c_check = app.add_subcommand("check", "loadability boundary membership");
    add_common(c_check);
    add_point_flags(c_check);
    c_check->add_option("--epsilon", epsilon, "alarm threshold on the feasibility system");

    CLI::App* c_margin = app.add_subcommand("margin", "loadability margin");
    add_common(c_margin);
    add_point_flags(c_margin);

    std::string z_csv;
    int sweep_count = 0, trace_steps = 0;
    CLI::App* c_pareto = app.add_subcommand("pareto", "boundary points in growth directions");
    add_common(c_pareto);
    c_pareto->add_option("--z", z_csv, "growth direction, comma separated");
    c_pareto->add_option("--sweep", sweep_count, "angular front sweep point count");
    c_pareto->add_option("--trace", trace_steps, "margin trace step count");
    c_pareto->add_option("--state", state_path, "trace start state JSON");

    int bus_id = 0, samples = 64;
    CLI::App* c_circles = app.add_subcommand("circles", "per-bus power circle geometry");
    add_common(c_circles);
    c_circles->add_option("--bus", bus_id, "bus id")->required();
    c_circles->add_option("--samples", samples, "points per circle");
    c_circles->add_option("--state", state_path, "operating point JSON");

    std::string grid_spec;
    CLI::App* c_region = app.add_subcommand("region", "ground-truth region scan");
    add_common(c_region);
    c_region->add_option("--grid", grid_spec, "lo:hi:step, voltage grid per axis")
        ->required();
    bool grid_full = false, grid_large = false;
    c_region->add_flag("--full-state", grid_full, "grid over v_im too");
    c_region->add_flag("--allow-large", grid_large, "lift the state-size guard");

    std::string thev_sweep = "0.0:0.25:50";
    CLI::App* c_thev = app.add_subcommand("thevenin", "two-bus equivalent margin sweep");
    add_common(c_thev);
    c_thev->add_option("--bus", bus_id, "bus id")->required();
    c_thev->add_option("--sweep", thev_sweep, "lo:hi:steps load sweep");

    CLI11_PARSE(app, argc, argv);

    Session session;
    session.case_path = case_path;
    session.load();

    auto opts_for_point = [&]() {
        json opts = {{"tol", tol}, {"use_q_limits", use_q_limits}};
        if (!q_limit_flags.empty()) {
            json lims = json::array();
            for (const std::string& f : q_limit_flags)
                lims.push_back(parse_q_limit_flag(f, session.base_power));
            opts["q_limits"] = lims;
            opts["use_q_limits"] = true;
        }
        return opts;
    };

    if (c_check->parsed()) {
        StateHandle st;
        session.load_state(state_path, st);
        json opts = opts_for_point();
        opts["epsilon"] = epsilon;
        OwnedString rep;
        const lk_status s =
            lk_check_boundary(session.net.p, st.p, opts.dump().c_str(), &rep.p);
        if (s != LK_OK) die(s);
        const json results = json::parse(rep.str());
        emit_report(session.report("check", results), format);
        if (results.value("on_boundary", false)) return kExitOnBoundary;
        if (epsilon > 0.0 && results.value("alarm", false)) return kExitAlarm;
        return kExitOk;
    }

    if (c_margin->parsed()) {
        StateHandle st;
        session.load_state(state_path, st);
        OwnedString rep;
        const lk_status s =
            lk_margin(session.net.p, st.p, opts_for_point().dump().c_str(), &rep.p);
        if (s != LK_OK) die(s);
        emit_report(session.report("margin", json::parse(rep.str())), format);
        return kExitOk;
    }

    if (c_pareto->parsed()) {
        json results = json::object();
        if (!z_csv.empty()) {
            std::vector<double> z;
            std::stringstream ss(z_csv);
            std::string item;
            while (std::getline(ss, item, ',')) z.push_back(std::stod(item));
            OwnedString rep;
            const lk_status s = lk_pareto_point(
                session.net.p, z.data(), static_cast<int>(z.size()), &rep.p);
            if (s != LK_OK) die(s);
            results["point"] = json::parse(rep.str());
        }
        if (sweep_count > 0) {
            OwnedString csv;
            const lk_status s = lk_pareto_sweep(session.net.p, sweep_count, &csv.p);
            if (s != LK_OK) die(s);
            const std::string path =
                (out_prefix.empty() ? "pareto" : out_prefix) + "_front.csv";
            write_file(path, csv.str());
            results["front_csv"] = path;
        }
        if (trace_steps > 0) {
            StateHandle st;
            session.load_state(state_path, st);
            OwnedString csv;
            const lk_status s =
                lk_margin_trace(session.net.p, st.p, trace_steps, &csv.p);
            if (s != LK_OK) die(s);
            const std::string path =
                (out_prefix.empty() ? "pareto" : out_prefix) + "_trace.csv";
            write_file(path, csv.str());
            results["trace_csv"] = path;
        }
        if (results.empty()) {
            std::cerr << "error: pareto needs --z, --sweep or --trace\n";
            return kExitInput;
        }
        emit_report(session.report("pareto", results), format);
        return kExitOk;
    }

    if (c_circles->parsed()) {
        StateHandle st;
        session.load_state(state_path, st);
        OwnedString csv, summary;
        const lk_status s =
            lk_circles(session.net.p, st.p, bus_id, samples, &csv.p, &summary.p);
        if (s != LK_OK) die(s);
        const std::string path =
            (out_prefix.empty() ? "circles" : out_prefix) + "_circles.csv";
        write_file(path, csv.str());
        json results = json::parse(summary.str());
        results["circles_csv"] = path;
        emit_report(session.report("circles", results), format);
        return kExitOk;
    }

    if (c_region->parsed()) {
        double lo = 0.0, hi = 0.0;
        int steps = 0;
        double step = 0.0;
        {
            std::stringstream ss(grid_spec);
            std::string a, b, c;
            if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') ||
                !std::getline(ss, c, ':')) {
                std::cerr << "error: --grid wants lo:hi:step\n";
                return kExitInput;
            }
            try {
                lo = std::stod(a);
                hi = std::stod(b);
                step = std::stod(c);
            } catch (...) {
                std::cerr << "error: --grid wants lo:hi:step\n";
                return kExitInput;
            }
            (void)steps;
        }
        const json grid = {{"lo", lo},
                           {"hi", hi},
                           {"step", step},
                           {"real_only", !grid_full},
                           {"allow_large", grid_large}};
        OwnedString region, front, locus;
        const lk_status s = lk_region_scan(session.net.p, grid.dump().c_str(),
                                           &region.p, &front.p, &locus.p);
        if (s != LK_OK) die(s);
        const std::string prefix = out_prefix.empty() ? "region" : out_prefix;
        write_file(prefix + "_region.csv", region.str());
        write_file(prefix + "_front.csv", front.str());
        write_file(prefix + "_locus.csv", locus.str());
        emit_report(session.report("region",
                                   {{"region_csv", prefix + "_region.csv"},
                                    {"front_csv", prefix + "_front.csv"},
                                    {"locus_csv", prefix + "_locus.csv"}}),
                    format);
        return kExitOk;
    }

    if (c_thev->parsed()) {
        double lo = 0.0, hi = 0.0;
        int steps = 0;
        if (!parse_sweep_spec(thev_sweep, lo, hi, steps)) {
            std::cerr << "error: --sweep wants lo:hi:steps\n";
            return kExitInput;
        }
        OwnedString csv;
        const lk_status s =
            lk_thevenin_sweep(session.net.p, bus_id, lo, hi, steps, &csv.p);
        if (s != LK_OK) die(s);
        const std::string path =
            (out_prefix.empty() ? "thevenin" : out_prefix) + "_thevenin.csv";
        write_file(path, csv.str());
        emit_report(session.report("thevenin", {{"thevenin_csv", path}}), format);
        return kExitOk;
    }

    return kExitInput;
}
