#pragma once

#include <vector>

#include "loadkit/network.hpp"

namespace loadkit {

struct GridAxis {
    double lo = 0.0;
    double hi = 1.0;
    double step = 0.01;

    int count() const;
};

// Grid over the state variables. In real-only mode the variables are the
// v_re of the PQ buses (v_im pinned to 0, reactive rows ignored); otherwise
// they are [v_re..., v_im...] of the PQ buses.
struct GridSpec {
    std::vector<GridAxis> axes;
    bool real_only = true;
    bool allow_large_state = false;  // override the 4-variable default guard
};

// Flat ground-truth scan: state, active powers of PQ buses, det of the
// relevant Jacobian block at every grid point.
struct RegionSample {
    GridSpec grid;
    int state_dim = 0;
    int p_dim = 0;
    std::size_t count = 0;
    std::vector<double> states;  // count x state_dim
    std::vector<double> powers;  // count x p_dim
    std::vector<double> det;     // count

    const double* state_at(std::size_t i) const { return &states[i * state_dim]; }
    const double* power_at(std::size_t i) const { return &powers[i * p_dim]; }
};

struct SingularPoint {
    std::vector<double> x;
    std::vector<double> p;
    double det_j = 0.0;
    bool boundary = false;  // else strict interior (cusp-type)
};

RegionSample sample_region(const Network& net, const GridSpec& grid);

// Componentwise nondominated subset (larger is better in every coordinate).
std::vector<std::vector<double>> pareto_front(
    const std::vector<std::vector<double>>& points);

std::vector<SingularPoint> singular_locus(const Network& net,
                                          const RegionSample& sample,
                                          double cusp_tol = 1e-6);

// Helpers shared with the locus refinement and its tests.
VoltageState state_from_grid(const Network& net, const double* x, int dim,
                             bool real_only);
double region_det(const Network& net, const double* x, int dim, bool real_only);
std::vector<double> region_p(const Network& net, const double* x, int dim,
                             bool real_only);

// Bisection on the det sign change between two states along a segment.
std::vector<double> bisect_singular(const Network& net, std::vector<double> a,
                                    std::vector<double> b, bool real_only,
                                    double tol = 1e-8);

}  // namespace loadkit
