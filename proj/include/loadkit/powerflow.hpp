#pragma once

#include <Eigen/Dense>

#include "loadkit/network.hpp"

namespace loadkit {

// The four per-bus sums over N(d). t1 and t4 depend only on the network;
// t2 and t3 are linear in the neighbor voltages.
struct TCoefficients {
    double t1 = 0.0;
    double t2 = 0.0;
    double t3 = 0.0;
    double t4 = 0.0;
};

TCoefficients t_coefficients(const Network& net, const VoltageState& v, int bus);

struct Injections {
    // indexed by internal bus; slack entries are the slack's own
    // consumption-positive power (useful for q-limit rows), PQ entries
    // are the consumption-positive bus powers
    std::vector<double> p;
    std::vector<double> q;
};

Injections injections(const Network& net, const VoltageState& v);

// 2n x 2n real matrix, columns [v_re(pq 0..n-1), v_im(pq 0..n-1)],
// rows [p(pq 0..n-1); q(pq 0..n-1)]. Every entry is affine in the state.
struct JacobianMatrix {
    Eigen::MatrixXd m;
    int n = 0;  // non-slack bus count

    // gradient of p_d (PQ ordinal) over all 2n state variables
    Eigen::VectorXd h_row(int pq_ordinal) const { return m.row(pq_ordinal); }
    // gradient of q_d (PQ ordinal)
    Eigen::VectorXd g_row(int pq_ordinal) const { return m.row(n + pq_ordinal); }
};

JacobianMatrix jacobian(const Network& net, const VoltageState& v);

// Gradient of the (consumption-positive) reactive power of an arbitrary bus,
// including the slack, with respect to the 2n state variables. For PQ buses
// this equals the matching Jacobian q-row.
Eigen::VectorXd q_gradient(const Network& net, const VoltageState& v, int bus);

// Stacked (p(v) - p_target, q(v) - q_target) over PQ buses.
Eigen::VectorXd residual(const Network& net, const VoltageState& v);

struct NewtonOptions {
    double tol = 1e-10;
    int max_iter = 60;
    int max_halvings = 10;
};

// Damped Newton on the rectangular equations; throws NonConvergence.
VoltageState solve_power_flow(const Network& net, const VoltageState& init,
                              const NewtonOptions& opts = {});
VoltageState solve_power_flow(const Network& net, const NewtonOptions& opts = {});

}  // namespace loadkit
