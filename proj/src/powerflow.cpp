#include "loadkit/powerflow.hpp"

#include <cmath>

#include "loadkit/errors.hpp"

namespace loadkit {

TCoefficients t_coefficients(const Network& net, const VoltageState& v, int bus) {
    TCoefficients t;
    for (int li : net.neighbor_lines(bus)) {
        const Line& ln = net.lines[li];
        const int k = ln.other(bus);
        t.t1 -= ln.g;
        t.t2 += v.re[k] * ln.g - v.im[k] * ln.b;
        t.t3 += v.re[k] * ln.b + v.im[k] * ln.g;
        t.t4 += ln.b;
    }
    return t;
}

Injections injections(const Network& net, const VoltageState& v) {
    const int nb = net.bus_count();
    Injections out;
    out.p.resize(nb);
    out.q.resize(nb);
    for (int d = 0; d < nb; ++d) {
        const TCoefficients t = t_coefficients(net, v, d);
        const double vr = v.re[d], vi = v.im[d];
        out.p[d] = t.t1 * vr * vr + t.t2 * vr + t.t1 * vi * vi + t.t3 * vi;
        out.q[d] = t.t4 * vr * vr - t.t3 * vr + t.t4 * vi * vi + t.t2 * vi;
    }
    return out;
}

JacobianMatrix jacobian(const Network& net, const VoltageState& v) {
    const int n = net.n();
    JacobianMatrix J;
    J.n = n;
    J.m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int od = 0; od < n; ++od) {
        const int d = net.pq_bus(od);
        const TCoefficients t = t_coefficients(net, v, d);
        const double vr = v.re[d], vi = v.im[d];
        // diagonal blocks
        J.m(od, od) = 2.0 * t.t1 * vr + t.t2;
        J.m(od, n + od) = 2.0 * t.t1 * vi + t.t3;
        J.m(n + od, od) = 2.0 * t.t4 * vr - t.t3;
        J.m(n + od, n + od) = 2.0 * t.t4 * vi + t.t2;
        // neighbor contributions
        for (int li : net.neighbor_lines(d)) {
            const Line& ln = net.lines[li];
            const int k = ln.other(d);
            if (net.is_slack(k)) continue;
            const int ok = net.pq_ordinal(k);
            J.m(od, ok) += ln.g * vr + ln.b * vi;
            J.m(od, n + ok) += -ln.b * vr + ln.g * vi;
            J.m(n + od, ok) += -ln.b * vr + ln.g * vi;
            J.m(n + od, n + ok) += -ln.g * vr - ln.b * vi;
        }
    }
    return J;
}

Eigen::VectorXd q_gradient(const Network& net, const VoltageState& v, int bus) {
    const int n = net.n();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * n);
    const TCoefficients t = t_coefficients(net, v, bus);
    const double vr = v.re[bus], vi = v.im[bus];
    if (!net.is_slack(bus)) {
        const int ob = net.pq_ordinal(bus);
        g(ob) = 2.0 * t.t4 * vr - t.t3;
        g(n + ob) = 2.0 * t.t4 * vi + t.t2;
    }
    for (int li : net.neighbor_lines(bus)) {
        const Line& ln = net.lines[li];
        const int k = ln.other(bus);
        if (net.is_slack(k)) continue;
        const int ok = net.pq_ordinal(k);
        g(ok) += -ln.b * vr + ln.g * vi;
        g(n + ok) += -ln.g * vr - ln.b * vi;
    }
    return g;
}

Eigen::VectorXd residual(const Network& net, const VoltageState& v) {
    const int n = net.n();
    const Injections inj = injections(net, v);
    Eigen::VectorXd r(2 * n);
    for (int od = 0; od < n; ++od) {
        const int d = net.pq_bus(od);
        r(od) = inj.p[d] - net.p_target[d];
        r(n + od) = inj.q[d] - net.q_target[d];
    }
    return r;
}

namespace {

void apply_step(const Network& net, VoltageState& v, const Eigen::VectorXd& dx) {
    const int n = net.n();
    for (int od = 0; od < n; ++od) {
        const int d = net.pq_bus(od);
        v.re[d] += dx(od);
        v.im[d] += dx(n + od);
    }
}

}  // namespace

VoltageState solve_power_flow(const Network& net, const VoltageState& init,
                              const NewtonOptions& opts) {
    VoltageState v = init;
    v.set(net.slack, net.slack_voltage);

    Eigen::VectorXd r = residual(net, v);
    double rnorm = r.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < opts.max_iter; ++it) {
        if (rnorm <= opts.tol) return v;
        const JacobianMatrix J = jacobian(net, v);
        Eigen::VectorXd dx = J.m.partialPivLu().solve(-r);
        if (!dx.allFinite())
            throw NonConvergence("Newton step is non-finite (singular Jacobian)", rnorm);

        // step halving until the residual norm decreases
        double scale = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opts.max_halvings; ++h) {
            VoltageState trial = v;
            apply_step(net, trial, scale * dx);
            Eigen::VectorXd rt = residual(net, trial);
            const double tn = rt.lpNorm<Eigen::Infinity>();
            if (std::isfinite(tn) && (tn < rnorm || tn <= opts.tol)) {
                v = trial;
                r = std::move(rt);
                rnorm = tn;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if (!accepted)
            throw NonConvergence("Newton stalled; residual " + std::to_string(rnorm), rnorm);
    }
    if (rnorm <= opts.tol) return v;
    throw NonConvergence("Newton iteration budget exhausted; residual " +
                             std::to_string(rnorm),
                         rnorm);
}

VoltageState solve_power_flow(const Network& net, const NewtonOptions& opts) {
    return solve_power_flow(net, flat_state(net), opts);
}

}  // namespace loadkit
