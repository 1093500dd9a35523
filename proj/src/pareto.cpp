#include "loadkit/pareto.hpp"

#include <algorithm>
#include <cmath>

#include "loadkit/boundary.hpp"
#include "loadkit/powerflow.hpp"

namespace loadkit {

namespace {

constexpr double kPi = 3.14159265358979323846;

// J^T z restricted to the p-block rows, as a function of the state vector.
Eigen::VectorXd stationarity_eval(const Network& net, const VoltageState& v,
                                  const Eigen::VectorXd& z) {
    const JacobianMatrix J = jacobian(net, v);
    return J.m.topRows(J.n).transpose() * z;
}

VoltageState state_from_vector(const Network& net, const Eigen::VectorXd& x) {
    VoltageState v(net.bus_count());
    v.set(net.slack, net.slack_voltage);
    const int n = net.n();
    for (int o = 0; o < n; ++o) {
        const int bus = net.pq_bus(o);
        v.re[bus] = x(o);
        v.im[bus] = x(n + o);
    }
    return v;
}

}  // namespace

ParetoPoint locate_boundary_point(const Network& net, const GrowthDirection& z) {
    const int n = net.n();
    if (static_cast<int>(z.size()) != n)
        throw InvariantViolation("growth direction has wrong dimension");
    Eigen::VectorXd zv(n);
    double zmax = 0.0;
    for (int d = 0; d < n; ++d) {
        if (!std::isfinite(z[d]) || z[d] < 0.0)
            throw InvariantViolation("growth direction must be nonnegative and finite");
        zv(d) = z[d];
        zmax = std::max(zmax, z[d]);
    }
    if (zmax <= 0.0) throw InvariantViolation("growth direction is all zero");

    // The stationarity map is affine in the state: assemble it column by column.
    const int m = 2 * n;
    VoltageState zero(net.bus_count());
    zero.set(net.slack, net.slack_voltage);
    const Eigen::VectorXd b0 = stationarity_eval(net, zero, zv);
    Eigen::MatrixXd A(m, m);
    for (int j = 0; j < m; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
        e(j) = 1.0;
        A.col(j) = stationarity_eval(net, state_from_vector(net, e), zv) - b0;
    }

    ParetoPoint out;
    out.z = z;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    Eigen::VectorXd x;
    if (lu.isInvertible()) {
        x = lu.solve(-b0);
    } else {
        // minimum-norm least-squares fallback, flagged degenerate
        x = A.completeOrthogonalDecomposition().solve(-b0);
        const double res = (A * x + b0).lpNorm<Eigen::Infinity>();
        const int nullity = m - static_cast<int>(lu.rank());
        if (res > 1e-7 * std::max(1.0, b0.norm()))
            throw SingularSystem("stationarity system is rank-deficient and inconsistent",
                                 nullity);
        out.degenerate = true;
    }

    out.v = state_from_vector(net, x);
    out.residual_norm = stationarity_eval(net, out.v, zv).lpNorm<Eigen::Infinity>();
    const Injections inj = injections(net, out.v);
    out.p.resize(n);
    for (int o = 0; o < n; ++o) out.p[o] = inj.p[net.pq_bus(o)];

    // Second-order test: the weighted power sum is quadratic in the state,
    // so A is its (constant) Hessian and the stationary point maximizes it
    // iff A is negative semidefinite. Otherwise the objective is unbounded
    // above and the stationary point is a saddle, not a boundary maximizer.
    const Eigen::MatrixXd H = 0.5 * (A + A.transpose());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H,
                                                             Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    if (eig.eigenvalues().maxCoeff() > 1e-9 * scale)
        throw NotParetoError(std::move(out),
                             "weighted power sum is unbounded for this growth "
                             "direction; the stationary point is a saddle");

    const BoundaryProblem bp(net, out.v);
    if (!bp.check_on_boundary().on_boundary) throw NotParetoError(std::move(out));
    return out;
}

SweepResult sweep_front(const Network& net,
                        const std::vector<GrowthDirection>& directions) {
    SweepResult res;
    for (const GrowthDirection& z : directions) {
        try {
            res.points.push_back(locate_boundary_point(net, z));
        } catch (const Error& e) {
            res.failures.emplace_back(z, e.what());
        }
    }
    if (net.n() == 2) {
        std::sort(res.points.begin(), res.points.end(),
                  [](const ParetoPoint& a, const ParetoPoint& b) {
                      return std::atan2(a.p[1], a.p[0]) < std::atan2(b.p[1], b.p[0]);
                  });
    }
    return res;
}

std::vector<GrowthDirection> angular_directions(int count) {
    std::vector<GrowthDirection> out;
    out.reserve(count);
    for (int i = 1; i <= count; ++i) {
        const double a = (kPi / 2.0) * i / (count + 1);
        out.push_back({std::cos(a), std::sin(a)});
    }
    return out;
}

std::vector<TracePoint> ray_margin_trace(const Network& net,
                                         const VoltageState& v_start,
                                         const VoltageState& v_end, int steps) {
    if (steps < 2) throw InvariantViolation("trace needs at least 2 steps");
    std::vector<TracePoint> out;
    out.reserve(steps);
    double base_sum = 0.0;
    for (int s = 0; s < steps; ++s) {
        const double t = static_cast<double>(s) / (steps - 1);
        VoltageState v(net.bus_count());
        for (int b = 0; b < net.bus_count(); ++b) {
            v.re[b] = (1.0 - t) * v_start.re[b] + t * v_end.re[b];
            v.im[b] = (1.0 - t) * v_start.im[b] + t * v_end.im[b];
        }
        v.set(net.slack, net.slack_voltage);
        const Injections inj = injections(net, v);
        TracePoint tp;
        for (int o = 0; o < net.n(); ++o) tp.sum_p += inj.p[net.pq_bus(o)];
        if (s == 0) base_sum = tp.sum_p;
        tp.scale = base_sum != 0.0 ? tp.sum_p / base_sum : t;
        tp.margin = BoundaryProblem(net, v).margin().m;
        out.push_back(tp);
    }
    return out;
}

}  // namespace loadkit
