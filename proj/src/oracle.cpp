#include "loadkit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "loadkit/errors.hpp"
#include "loadkit/powerflow.hpp"

namespace loadkit {

int GridAxis::count() const {
    if (step <= 0.0 || hi < lo) return 0;
    return static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

VoltageState state_from_grid(const Network& net, const double* x, int dim,
                             bool real_only) {
    VoltageState v(net.bus_count());
    v.set(net.slack, net.slack_voltage);
    const int n = net.n();
    for (int o = 0; o < n; ++o) {
        const int bus = net.pq_bus(o);
        v.re[bus] = x[o];
        v.im[bus] = real_only ? 0.0 : x[n + o];
    }
    (void)dim;
    return v;
}

double region_det(const Network& net, const double* x, int dim, bool real_only) {
    const VoltageState v = state_from_grid(net, x, dim, real_only);
    const JacobianMatrix J = jacobian(net, v);
    if (real_only) return J.m.topLeftCorner(J.n, J.n).determinant();
    return J.m.determinant();
}

std::vector<double> region_p(const Network& net, const double* x, int dim,
                             bool real_only) {
    const VoltageState v = state_from_grid(net, x, dim, real_only);
    const Injections inj = injections(net, v);
    std::vector<double> p(net.n());
    for (int o = 0; o < net.n(); ++o) p[o] = inj.p[net.pq_bus(o)];
    return p;
}

RegionSample sample_region(const Network& net, const GridSpec& grid) {
    const int dim = static_cast<int>(grid.axes.size());
    const int expected = grid.real_only ? net.n() : 2 * net.n();
    if (dim != expected)
        throw InvariantViolation("grid has " + std::to_string(dim) +
                                 " axes, state needs " + std::to_string(expected));
    if (dim > 4 && !grid.allow_large_state)
        throw GridTooLarge("more than 4 state variables; pass the override flag");

    std::size_t total = 1;
    std::vector<int> shape(dim);
    for (int a = 0; a < dim; ++a) {
        shape[a] = grid.axes[a].count();
        if (shape[a] <= 0) total = 0;
        else total *= static_cast<std::size_t>(shape[a]);
        if (total > 10'000'000)
            throw GridTooLarge("grid exceeds 1e7 points");
    }

    RegionSample out;
    out.grid = grid;
    out.state_dim = dim;
    out.p_dim = net.n();
    out.count = total;
    out.states.resize(total * dim);
    out.powers.resize(total * out.p_dim);
    out.det.resize(total);

    std::vector<int> idx(dim, 0);
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < total; ++i) {
        for (int a = 0; a < dim; ++a)
            x[a] = grid.axes[a].lo + grid.axes[a].step * idx[a];
        const VoltageState v = state_from_grid(net, x.data(), dim, grid.real_only);
        const Injections inj = injections(net, v);
        for (int o = 0; o < out.p_dim; ++o)
            out.powers[i * out.p_dim + o] = inj.p[net.pq_bus(o)];
        const JacobianMatrix J = jacobian(net, v);
        out.det[i] = grid.real_only ? J.m.topLeftCorner(J.n, J.n).determinant()
                                    : J.m.determinant();
        std::copy(x.begin(), x.end(), out.states.begin() + i * dim);
        // advance the multi-index (last axis fastest)
        for (int a = dim - 1; a >= 0; --a) {
            if (++idx[a] < shape[a]) break;
            idx[a] = 0;
        }
    }
    return out;
}

namespace {

bool dominates(const std::vector<double>& a, const std::vector<double>& b) {
    bool strict = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return false;
        if (a[i] > b[i]) strict = true;
    }
    return strict;
}

}  // namespace

std::vector<std::vector<double>> pareto_front(
    const std::vector<std::vector<double>>& points) {
    if (points.empty()) return {};
    if (points.front().size() == 2) {
        // sort by first coordinate descending, keep the running max of the second
        std::vector<std::size_t> order(points.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (points[a][0] != points[b][0]) return points[a][0] > points[b][0];
            return points[a][1] > points[b][1];
        });
        std::vector<std::vector<double>> front;
        double best = -std::numeric_limits<double>::infinity();
        double last0 = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t i : order) {
            if (points[i][1] > best) {
                // equal-first-coordinate runs: only the best second survives
                if (!front.empty() && points[i][0] == last0) continue;
                front.push_back(points[i]);
                best = points[i][1];
                last0 = points[i][0];
            }
        }
        return front;
    }
    std::vector<std::vector<double>> front;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < points.size() && !dominated; ++j)
            if (j != i && dominates(points[j], points[i])) dominated = true;
        if (dominated) continue;
        if (std::find(front.begin(), front.end(), points[i]) == front.end())
            front.push_back(points[i]);
    }
    return front;
}

namespace {

double front_distance(const std::vector<std::vector<double>>& front,
                      const std::vector<double>& p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : front) {
        double s = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i)
            s += (f[i] - p[i]) * (f[i] - p[i]);
        best = std::min(best, std::sqrt(s));
    }
    return best;
}

}  // namespace

std::vector<SingularPoint> singular_locus(const Network& net,
                                          const RegionSample& sample,
                                          double cusp_tol) {
    const int dim = sample.state_dim;
    std::vector<int> shape(dim);
    std::vector<std::size_t> stride(dim);
    {
        std::size_t s = 1;
        for (int a = dim - 1; a >= 0; --a) {
            shape[a] = sample.grid.axes[a].count();
            stride[a] = s;
            s *= static_cast<std::size_t>(shape[a]);
        }
    }

    std::vector<std::vector<double>> all_p;
    all_p.reserve(sample.count);
    for (std::size_t i = 0; i < sample.count; ++i)
        all_p.emplace_back(sample.power_at(i), sample.power_at(i) + sample.p_dim);
    const auto front = pareto_front(all_p);

    double max_step = 0.0;
    for (const auto& ax : sample.grid.axes) max_step = std::max(max_step, ax.step);
    const double boundary_tol = 5.0 * max_step;

    std::vector<SingularPoint> locus;
    auto classify_and_add = [&](std::vector<double> x, double detv) {
        SingularPoint sp;
        sp.p = region_p(net, x.data(), dim, sample.grid.real_only);
        sp.x = std::move(x);
        sp.det_j = detv;
        sp.boundary = front_distance(front, sp.p) <= boundary_tol;
        locus.push_back(std::move(sp));
    };

    for (int axis = 0; axis < dim; ++axis) {
        for (std::size_t i = 0; i < sample.count; ++i) {
            const std::size_t along = (i / stride[axis]) % shape[axis];
            if (along + 1 >= static_cast<std::size_t>(shape[axis])) continue;
            const std::size_t j = i + stride[axis];
            const double da = sample.det[i], db = sample.det[j];
            if (da == 0.0) {
                if (axis == 0) classify_and_add(
                    {sample.state_at(i), sample.state_at(i) + dim}, 0.0);
                continue;
            }
            if (da * db < 0.0) {
                // linear interpolation of the zero crossing
                const double t = da / (da - db);
                std::vector<double> x(sample.state_at(i), sample.state_at(i) + dim);
                x[axis] += t * sample.grid.axes[axis].step;
                classify_and_add(std::move(x), 0.0);
            } else if (along > 0) {
                // cusp-type touch: local minimum of |det| below threshold
                const std::size_t h = i - stride[axis];
                const double mid = std::abs(da);
                if (mid < cusp_tol && mid <= std::abs(sample.det[h]) &&
                    mid <= std::abs(db))
                    classify_and_add({sample.state_at(i), sample.state_at(i) + dim},
                                     da);
            }
        }
    }
    return locus;
}

std::vector<double> bisect_singular(const Network& net, std::vector<double> a,
                                    std::vector<double> b, bool real_only,
                                    double tol) {
    const int dim = static_cast<int>(a.size());
    double fa = region_det(net, a.data(), dim, real_only);
    double fb = region_det(net, b.data(), dim, real_only);
    if (fa * fb > 0.0)
        throw InvariantViolation("bisect_singular: no sign change in bracket");
    auto gap = [&] {
        double g = 0.0;
        for (int k = 0; k < dim; ++k) g = std::max(g, std::abs(a[k] - b[k]));
        return g;
    };
    std::vector<double> mid(dim);
    while (gap() > tol) {
        for (int k = 0; k < dim; ++k) mid[k] = 0.5 * (a[k] + b[k]);
        const double fm = region_det(net, mid.data(), dim, real_only);
        if (fm == 0.0) return mid;
        if (fa * fm < 0.0) {
            b = mid;
            fb = fm;
        } else {
            a = mid;
            fa = fm;
        }
    }
    for (int k = 0; k < dim; ++k) mid[k] = 0.5 * (a[k] + b[k]);
    return mid;
}

}  // namespace loadkit
