#include "loadkit.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "loadkit/boundary.hpp"
#include "loadkit/case_io.hpp"
#include "loadkit/errors.hpp"
#include "loadkit/geometry.hpp"
#include "loadkit/oracle.hpp"
#include "loadkit/pareto.hpp"
#include "loadkit/powerflow.hpp"
#include "loadkit/thevenin.hpp"

using json = nlohmann::json;
using namespace loadkit;

struct lk_network {
    Network net;
    std::optional<VoltageState> initial;  // case voltages when ingested from .m
};

struct lk_state {
    VoltageState v;
};

namespace {

thread_local std::string g_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

lk_status fail(lk_status st, const std::string& msg) {
    g_error = msg;
    return st;
}

// Runs the body and maps the exception hierarchy onto status codes.
template <typename Fn>
lk_status guarded(Fn&& fn) {
    try {
        fn();
        g_error.clear();
        return LK_OK;
    } catch (const UnsupportedFeature& e) {
        return fail(LK_ERR_UNSUPPORTED, e.what());
    } catch (const MalformedCase& e) {
        return fail(LK_ERR_INPUT, e.what());
    } catch (const SchemaError& e) {
        return fail(LK_ERR_INPUT, e.what());
    } catch (const GridTooLarge& e) {
        return fail(LK_ERR_ARGUMENT, e.what());
    } catch (const NonConvergence& e) {
        return fail(LK_ERR_SOLVER, e.what());
    } catch (const SolverFailure& e) {
        return fail(LK_ERR_SOLVER, e.what());
    } catch (const SingularSystem& e) {
        return fail(LK_ERR_SOLVER, e.what());
    } catch (const InvariantViolation& e) {
        return fail(LK_ERR_ARGUMENT, e.what());
    } catch (const Error& e) {
        return fail(LK_ERR_INPUT, e.what());
    } catch (const json::exception& e) {
        return fail(LK_ERR_INPUT, std::string("bad json: ") + e.what());
    } catch (const std::exception& e) {
        return fail(LK_ERR_INTERNAL, e.what());
    }
}

json parse_opts(const char* opts_json) {
    if (!opts_json || !*opts_json) return json::object();
    json j = json::parse(opts_json);
    if (!j.is_object()) throw SchemaError("options must be a json object");
    return j;
}

VoltageState resolve_state(const lk_network* net, const lk_state* st) {
    if (st) return st->v;
    if (net->initial) return solve_power_flow(net->net, *net->initial);
    return solve_power_flow(net->net);
}

// Applies the q-limit related options; returns the working network (a copy
// only when overridden) and the constraint set in effect at the state.
ConstraintSet build_constraints(const lk_network* h, const VoltageState& v,
                                const json& opts, Network& scratch) {
    const Network* net = &h->net;
    if (opts.contains("q_limits")) {
        scratch = h->net;
        for (const json& e : opts.at("q_limits")) {
            const int b = scratch.internal_index(e.at("bus").get<int>());
            scratch.q_limits[b] =
                QLimit{e.at("qmin").get<double>(), e.at("qmax").get<double>()};
        }
        net = &scratch;
    }
    if (!opts.value("use_q_limits", !opts.contains("q_limits") ? false : true))
        return {};
    return detect_q_limits(*net, v, opts.value("tol", 1e-9));
}

json verdict_to_json(const BoundaryVerdict& verdict) {
    json j;
    j["on_boundary"] = verdict.on_boundary;
    if (verdict.direction) {
        json dir = json::array();
        for (int i = 0; i < verdict.direction->size(); ++i)
            dir.push_back((*verdict.direction)(i));
        j["direction"] = dir;
    } else {
        j["direction"] = nullptr;
    }
    if (verdict.certificate) {
        json lam = json::array();
        for (int i = 0; i < verdict.certificate->lambda.size(); ++i)
            lam.push_back(verdict.certificate->lambda(i));
        j["certificate"] = {{"lambda", lam},
                            {"mu", verdict.certificate->mu},
                            {"violation", verdict.certificate->violation}};
    } else {
        j["certificate"] = nullptr;
    }
    j["binding"] = verdict.binding_info;
    return j;
}

std::string csv_join(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    out += '\n';
    return out;
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

json pareto_point_json(const Network& net, const ParetoPoint& pt, bool on_boundary) {
    json buses = json::array();
    for (int o = 0; o < net.n(); ++o) buses.push_back(net.bus_ids[net.pq_bus(o)]);
    return {{"z", pt.z},
            {"buses", buses},
            {"p", pt.p},
            {"residual", pt.residual_norm},
            {"degenerate", pt.degenerate},
            {"on_boundary", on_boundary}};
}

}  // namespace

extern "C" {

const char* lk_last_error(void) { return g_error.c_str(); }

void lk_string_free(char* s) { std::free(s); }

lk_status lk_network_from_matpower_opts(const char* text, const char* opts_json,
                                        lk_network** out) {
    if (!text || !out) return fail(LK_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        const json opts = parse_opts(opts_json);
        ModelPolicy policy;
        if (opts.value("strict", false)) {
            policy.shunts = ShuntPolicy::Reject;
            policy.taps = TapPolicy::Reject;
        }
        const NetworkCase cs = parse_matpower(text);
        auto h = std::make_unique<lk_network>();
        h->net = model_network(cs, policy);
        h->initial = case_initial_state(h->net, cs);
        *out = h.release();
    });
}

lk_status lk_network_from_matpower(const char* text, lk_network** out) {
    return lk_network_from_matpower_opts(text, nullptr, out);
}

lk_status lk_network_from_json(const char* text, lk_network** out) {
    if (!text || !out) return fail(LK_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        auto h = std::make_unique<lk_network>();
        h->net = parse_network_json(text);
        *out = h.release();
    });
}

lk_status lk_network_to_json(const lk_network* net, char** json_out) {
    if (!net || !json_out) return fail(LK_ERR_ARGUMENT, "null argument");
    return guarded([&] { *json_out = dup_string(serialize_network_json(net->net)); });
}

void lk_network_free(lk_network* net) { delete net; }

int lk_network_bus_count(const lk_network* net) {
    return net ? net->net.bus_count() : 0;
}

lk_status lk_network_warnings(const lk_network* net, char** json_out) {
    if (!net || !json_out) return fail(LK_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *json_out = dup_string(json(net->net.warnings).dump());
    });
}

lk_status lk_solve(const lk_network* net, const char* opts_json, lk_state** out) {
    if (!net || !out) return fail(LK_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        const json opts = parse_opts(opts_json);
        NewtonOptions nopts;
        nopts.tol = opts.value("tol", nopts.tol);
        nopts.max_iter = opts.value("max_iter", nopts.max_iter);
        auto h = std::make_unique<lk_state>();
        if (!opts.value("flat_start", false) && net->initial)
            h->v = solve_power_flow(net->net, *net->initial, nopts);
        else
            h->v = solve_power_flow(net->net, nopts);
        *out = h.release();
    });
}

lk_status lk_state_from_json(const lk_network* net, const char* text,
                             lk_state** out) {
    if (!net || !text || !out) return fail(LK_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        auto h = std::make_unique<lk_state>();
        h->v = parse_state_json(net->net, text);
        *out = h.release();
    });
}

lk_status lk_state_to_json(const lk_network* net, const lk_state* st,
                           char** json_out) {
    if (!net || !st || !json_out) return fail(LK_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *json_out = dup_string(serialize_state_json(net->net, st->v));
    });
}

void lk_state_free(lk_state* st) { delete st; }

lk_status lk_check_boundary(const lk_network* net, const lk_state* st,
                            const char* opts_json, char** report_json) {
    if (!net || !report_json) return fail(LK_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        const json opts = parse_opts(opts_json);
        const double eps = opts.value("epsilon", 0.0);
        const double tol = opts.value("tol", 1e-9);
        const VoltageState v = resolve_state(net, st);
        Network scratch;
        const ConstraintSet cs = build_constraints(net, v, opts, scratch);
        const BoundaryProblem bp(net->net, v);
        const BoundaryVerdict verdict = bp.check_on_boundary(cs, tol);
        json j = verdict_to_json(verdict);
        j["epsilon"] = eps;
        j["alarm"] = eps > 0.0 ? bp.check_alarm(eps, cs, tol).on_boundary
                               : verdict.on_boundary;
        *report_json = dup_string(j.dump(2));
    });
}

lk_status lk_margin(const lk_network* net, const lk_state* st,
                    const char* opts_json, char** report_json) {
    if (!net || !report_json) return fail(LK_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        const json opts = parse_opts(opts_json);
        const VoltageState v = resolve_state(net, st);
        Network scratch;
        const ConstraintSet cs = build_constraints(net, v, opts, scratch);
        const BoundaryProblem bp(net->net, v);
        const MarginResult mr = bp.margin(cs);
        json dir = json::array();
        for (int i = 0; i < mr.direction.size(); ++i) dir.push_back(mr.direction(i));
        json binding = json::array();
        for (const auto& [bus, sense] : cs.binding_q_buses)
            binding.push_back({{"bus", net->net.bus_ids[bus]},
                               {"sense", sense == LimitSense::AtMax ? "max" : "min"}});
        const json j = {{"margin", mr.m}, {"direction", dir}, {"binding", binding}};
        *report_json = dup_string(j.dump(2));
    });
}

lk_status lk_pareto_point(const lk_network* net, const double* z, int nz,
                          char** report_json) {
    if (!net || !z || !report_json) return fail(LK_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        const GrowthDirection dir(z, z + nz);
        json j;
        try {
            j = pareto_point_json(net->net, locate_boundary_point(net->net, dir), true);
        } catch (const NotParetoError& e) {
            j = pareto_point_json(net->net, e.point, false);
        }
        *report_json = dup_string(j.dump(2));
    });
}

lk_status lk_pareto_sweep(const lk_network* net, int count, char** csv_out) {
    if (!net || !csv_out) return fail(LK_ERR_ARGUMENT, "null argument");
    if (count < 1) return fail(LK_ERR_ARGUMENT, "sweep needs at least 1 direction");
    return guarded([&] {
        if (net->net.n() != 2)
            throw InvariantViolation("angular sweep requires exactly 2 load buses");
        const SweepResult res = sweep_front(net->net, angular_directions(count));
        std::string csv = "z_1,z_2,p_1,p_2,residual,on_boundary\n";
        for (const ParetoPoint& pt : res.points)
            csv += csv_join({num(pt.z[0]), num(pt.z[1]), num(pt.p[0]), num(pt.p[1]),
                             num(pt.residual_norm), "1"});
        *csv_out = dup_string(csv);
    });
}

lk_status lk_margin_trace(const lk_network* net, const lk_state* st, int steps,
                          char** csv_out) {
    if (!net || !csv_out) return fail(LK_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        const VoltageState start = resolve_state(net, st);
        GrowthDirection z(net->net.n(), 0.0);
        double zmax = 0.0;
        for (int o = 0; o < net->net.n(); ++o) {
            z[o] = std::max(net->net.p_target[net->net.pq_bus(o)], 0.0);
            zmax = std::max(zmax, z[o]);
        }
        if (zmax <= 0.0)
            throw InvariantViolation("no positive base load to grow along");
        // strictly positive weights: zero entries (generator-heavy buses)
        // would leave improving directions open at the located endpoint
        for (double& w : z) w = std::max(w, 1e-3 * zmax);
        VoltageState end_state(net->net.bus_count());
        try {
            end_state = locate_boundary_point(net->net, z).v;
        } catch (const NotParetoError& e) {
            end_state = e.point.v;  // trace to the stationary point regardless
        }
        std::string csv = "scale,sum_p,margin\n";
        for (const TracePoint& tp : ray_margin_trace(net->net, start, end_state, steps))
            csv += csv_join({num(tp.scale), num(tp.sum_p), num(tp.margin)});
        *csv_out = dup_string(csv);
    });
}

lk_status lk_circles(const lk_network* net, const lk_state* st, int bus_id,
                     int samples, char** csv_out, char** summary_json) {
    if (!net || !csv_out || !summary_json)
        return fail(LK_ERR_ARGUMENT, "null argument");
    if (samples < 4) return fail(LK_ERR_ARGUMENT, "need at least 4 samples");
    return guarded([&] {
        const int bus = net->net.internal_index(bus_id);
        if (net->net.is_slack(bus))
            throw InvariantViolation("circles are defined for load buses only");
        const VoltageState v = resolve_state(net, st);
        const auto [active, reactive] = power_circles(
            net->net, v, bus, net->net.p_target[bus], net->net.q_target[bus]);
        std::string csv = "bus,kind,theta,x,y\n";
        for (const CircleDescriptor* c : {&active, &reactive}) {
            const char* kind = c->kind == CircleKind::Active ? "active" : "reactive";
            for (const auto& [theta, x, y] : sample_circle(*c, samples))
                csv += csv_join({std::to_string(bus_id), kind, num(theta), num(x),
                                 num(y)});
        }
        json j = {{"bus", bus_id},
                  {"active", {{"cx", active.cx}, {"cy", active.cy},
                              {"radius_sq", active.radius_sq}}},
                  {"reactive", {{"cx", reactive.cx}, {"cy", reactive.cy},
                                {"radius_sq", reactive.radius_sq}}},
                  {"max_p", max_active_consumption(net->net, v, bus)}};
        try {
            const CircleIntersection xi = intersect(active, reactive);
            json pts = json::array();
            for (const auto& [x, y] : xi.points) pts.push_back({x, y});
            j["points"] = pts;
            j["gap"] = xi.gap;
            j["disjoint"] = false;
        } catch (const DisjointCircles&) {
            j["points"] = json::array();
            j["gap"] = nullptr;
            j["disjoint"] = true;
        }
        *csv_out = dup_string(csv);
        *summary_json = dup_string(j.dump(2));
    });
}

lk_status lk_region_scan(const lk_network* net, const char* grid_json,
                         char** region_csv, char** front_csv, char** locus_csv) {
    if (!net || !grid_json || !region_csv || !front_csv || !locus_csv)
        return fail(LK_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        const json g = json::parse(grid_json);
        GridSpec spec;
        spec.real_only = g.value("real_only", true);
        spec.allow_large_state = g.value("allow_large", false);
        GridAxis axis;
        axis.lo = g.at("lo").get<double>();
        axis.hi = g.at("hi").get<double>();
        axis.step = g.at("step").get<double>();
        const int nvars = spec.real_only ? net->net.n() : 2 * net->net.n();
        spec.axes.assign(nvars, axis);

        const RegionSample sample = sample_region(net->net, spec);
        std::string header;
        for (int k = 0; k < sample.state_dim; ++k)
            header += "x_" + std::to_string(k + 1) + ",";
        for (int k = 0; k < sample.p_dim; ++k)
            header += "p_" + std::to_string(k + 1) + ",";

        std::string region = header + "det\n";
        std::vector<std::vector<double>> pts;
        pts.reserve(sample.count);
        for (std::size_t i = 0; i < sample.count; ++i) {
            std::string row;
            for (int k = 0; k < sample.state_dim; ++k)
                row += num(sample.state_at(i)[k]) + ",";
            for (int k = 0; k < sample.p_dim; ++k)
                row += num(sample.power_at(i)[k]) + ",";
            region += row + num(sample.det[i]) + "\n";
            pts.emplace_back(sample.power_at(i), sample.power_at(i) + sample.p_dim);
        }
        *region_csv = dup_string(region);

        std::string front;
        for (int k = 0; k < sample.p_dim; ++k) {
            if (k) front += ",";
            front += "p_" + std::to_string(k + 1);
        }
        front += "\n";
        for (const std::vector<double>& p : pareto_front(pts)) {
            for (int k = 0; k < sample.p_dim; ++k) {
                if (k) front += ",";
                front += num(p[k]);
            }
            front += "\n";
        }
        *front_csv = dup_string(front);

        std::string locus = header + "det,boundary\n";
        for (const SingularPoint& sp : singular_locus(net->net, sample)) {
            std::string row;
            for (double x : sp.x) row += num(x) + ",";
            for (double p : sp.p) row += num(p) + ",";
            locus += row + num(sp.det_j) + "," + (sp.boundary ? "1" : "0") + "\n";
        }
        *locus_csv = dup_string(locus);
    });
}

lk_status lk_thevenin_sweep(const lk_network* net, int bus_id, double lo,
                            double hi, int steps, char** csv_out) {
    if (!net || !csv_out) return fail(LK_ERR_ARGUMENT, "null argument");
    if (steps < 2 || !(hi > lo) || lo < 0.0)
        return fail(LK_ERR_ARGUMENT, "bad sweep range");
    return guarded([&] {
        const Network& base = net->net;
        const int bus = base.internal_index(bus_id);
        if (base.is_slack(bus))
            throw InvariantViolation("sweep bus must be a load bus");

        // Load axis: per-unit active power at the most loaded bus; the rest
        // of the profile (and the reactive targets) scale proportionally.
        double pmax = 0.0;
        for (int o = 0; o < base.n(); ++o)
            pmax = std::max(pmax, base.p_target[base.pq_bus(o)]);
        std::vector<double> wp(base.bus_count(), 0.0), wq(base.bus_count(), 0.0);
        for (int o = 0; o < base.n(); ++o) {
            const int b = base.pq_bus(o);
            if (pmax > 0.0) {
                wp[b] = base.p_target[b] / pmax;
                wq[b] = base.q_target[b] / pmax;
            } else {
                wp[b] = 1.0;
            }
        }

        std::string csv = "load,thevenin_margin,proposed_margin\n";
        Network work = base;
        VoltageState guess = net->initial ? *net->initial : flat_state(base);
        for (int s = 0; s < steps; ++s) {
            const double load = lo + (hi - lo) * s / (steps - 1);
            for (int o = 0; o < base.n(); ++o) {
                const int b = base.pq_bus(o);
                work.p_target[b] = load * wp[b];
                work.q_target[b] = load * wq[b];
            }
            VoltageState v;
            try {
                v = solve_power_flow(work, guess);
            } catch (const NonConvergence&) {
                break;  // past the nose: emit what was reachable
            }
            guess = v;  // continuation
            const Complex s_load(work.p_target[bus], work.q_target[bus]);
            const double tm = thevenin_margin(work, v, bus, s_load);
            const double pm = BoundaryProblem(work, v).margin().m;
            csv += csv_join({num(load), num(tm), num(pm)});
        }
        *csv_out = dup_string(csv);
    });
}

}  // extern "C"
