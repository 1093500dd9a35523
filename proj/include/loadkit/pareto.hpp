#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "loadkit/errors.hpp"
#include "loadkit/network.hpp"

namespace loadkit {

// Per-bus load growth weights, z_d >= 0 over PQ ordinals, not all zero.
using GrowthDirection = std::vector<double>;

struct ParetoPoint {
    GrowthDirection z;
    VoltageState v;
    std::vector<double> p;   // active powers of the PQ buses
    double residual_norm = 0.0;
    bool degenerate = false;  // rank-deficient system solved in least squares
};

struct NotParetoError : NotPareto {
    ParetoPoint point;
    explicit NotParetoError(ParetoPoint pt)
        : NotPareto("located point fails the on-boundary check"),
          point(std::move(pt)) {}
    NotParetoError(ParetoPoint pt, const std::string& why)
        : NotPareto(why), point(std::move(pt)) {}
};

// Solves the stationarity system J(v)^T z = 0 over the p-block; the
// Jacobian is affine in the state, so this is one 2n x 2n linear solve.
ParetoPoint locate_boundary_point(const Network& net, const GrowthDirection& z);

struct SweepResult {
    std::vector<ParetoPoint> points;  // sorted by angle in p-space for 2 loads
    std::vector<std::pair<GrowthDirection, std::string>> failures;
};

SweepResult sweep_front(const Network& net,
                        const std::vector<GrowthDirection>& directions);

// count directions z = (cos a, sin a), a strictly inside (0, 90) degrees
std::vector<GrowthDirection> angular_directions(int count);

struct TracePoint {
    double scale = 0.0;  // sum p normalized by the starting point
    double sum_p = 0.0;
    double margin = 0.0;
};

// Margin along linearly interpolated voltage states between two operating
// points, e.g. from a base case toward a located boundary point.
std::vector<TracePoint> ray_margin_trace(const Network& net,
                                         const VoltageState& v_start,
                                         const VoltageState& v_end, int steps);

}  // namespace loadkit
