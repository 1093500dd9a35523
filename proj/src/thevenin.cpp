#include "loadkit/thevenin.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "loadkit/errors.hpp"

namespace loadkit {

TheveninEquivalent thevenin_at(const Network& net, const VoltageState& v, int bus) {
    if (net.is_slack(bus))
        throw InvariantViolation("thevenin_at: bus is the slack");

    const int n = net.n();
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
    Eigen::VectorXcd I = Eigen::VectorXcd::Zero(n);

    for (const Line& ln : net.lines) {
        const Complex y{ln.g, ln.b};
        const bool fs = net.is_slack(ln.from), ts = net.is_slack(ln.to);
        if (fs && ts) continue;
        if (fs || ts) {
            const int k = net.pq_ordinal(fs ? ln.to : ln.from);
            M(k, k) += y;
            I(k) += y * net.slack_voltage;
        } else {
            const int a = net.pq_ordinal(ln.from), b = net.pq_ordinal(ln.to);
            M(a, a) += y;
            M(b, b) += y;
            M(a, b) -= y;
            M(b, a) -= y;
        }
    }

    // other constant-power loads: small-signal admittance -conj(s)/|v|^2
    for (int k = 0; k < net.bus_count(); ++k) {
        if (k == bus || net.is_slack(k)) continue;
        const Complex s{net.p_target[k], net.q_target[k]};
        const double vm2 = std::norm(v.at(k));
        if (vm2 <= 0.0 || s == Complex{0.0, 0.0}) continue;
        M(net.pq_ordinal(k), net.pq_ordinal(k)) -= std::conj(s) / vm2;
    }

    Eigen::FullPivLU<Eigen::MatrixXcd> lu(M);
    if (!lu.isInvertible())
        throw SingularNetwork("reduced node matrix is singular");

    const int ob = net.pq_ordinal(bus);
    Eigen::VectorXcd unit = Eigen::VectorXcd::Zero(n);
    unit(ob) = Complex{1.0, 0.0};

    TheveninEquivalent out;
    out.bus = bus;
    out.z_thev = lu.solve(unit)(ob);
    out.e_thev = lu.solve(I)(ob);
    return out;
}

double thevenin_margin(const Network& net, const VoltageState& v, int bus,
                       Complex s_load) {
    const double smag = std::abs(s_load);
    if (smag <= 0.0) return 1.0;
    const TheveninEquivalent te = thevenin_at(net, v, bus);
    const double z_app = std::norm(v.at(bus)) / smag;
    if (z_app <= 0.0) return 0.0;
    const double ratio = std::abs(te.z_thev) / z_app;
    const double margin = 1.0 - std::sqrt(ratio);
    return std::min(1.0, std::max(0.0, margin));
}

}  // namespace loadkit
