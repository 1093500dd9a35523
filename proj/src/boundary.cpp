#include "loadkit/boundary.hpp"

#include <cmath>

#include "loadkit/errors.hpp"

namespace loadkit {

namespace {
constexpr double kDegenerateRowNorm = 1e-12;
}

BoundaryProblem::BoundaryProblem(const Network& net, const VoltageState& v)
    : J_(jacobian(net, v)), net_(&net), state_(&v) {
    for (int d = 0; d < J_.n; ++d) {
        if (J_.h_row(d).norm() < kDegenerateRowNorm)
            dropped_.push_back(d);
        else
            kept_.push_back(d);
    }
}

BoundaryProblem::BoundaryProblem(const JacobianMatrix& J) : J_(J) {
    for (int d = 0; d < J_.n; ++d) {
        if (J_.h_row(d).norm() < kDegenerateRowNorm)
            dropped_.push_back(d);
        else
            kept_.push_back(d);
    }
}

Eigen::VectorXd BoundaryProblem::q_row_for(int bus) const {
    if (net_ && state_) return q_gradient(*net_, *state_, bus);
    // without network context only PQ rows of J are available
    if (bus < 0 || bus >= J_.n)
        throw SolverFailure("q-gradient requested for a bus outside the Jacobian");
    return J_.g_row(bus);
}

Eigen::MatrixXd BoundaryProblem::h_rows() const {
    Eigen::MatrixXd H(kept_.size(), 2 * J_.n);
    for (size_t i = 0; i < kept_.size(); ++i) H.row(i) = J_.h_row(kept_[i]);
    return H;
}

Eigen::MatrixXd BoundaryProblem::cone_rows(const ConstraintSet& cs,
                                           std::vector<std::string>* info) const {
    const int nh = static_cast<int>(kept_.size());
    const int extra = static_cast<int>(cs.binding_q_buses.size() +
                                       cs.p_upper_buses.size() +
                                       cs.direction_rows.size());
    Eigen::MatrixXd R(nh + extra, 2 * J_.n);
    R.topRows(nh) = h_rows();
    int r = nh;
    for (const auto& [bus, sense] : cs.binding_q_buses) {
        const Eigen::VectorXd g = q_row_for(bus);
        // consumption-positive q at its upper bound cannot increase,
        // at its lower bound cannot decrease
        R.row(r++) = (sense == LimitSense::AtMax) ? Eigen::VectorXd(-g) : g;
        if (info)
            info->push_back("q-limit bus ordinal " + std::to_string(bus) +
                            (sense == LimitSense::AtMax ? " (max)" : " (min)"));
    }
    for (int od : cs.p_upper_buses) {
        R.row(r++) = -J_.h_row(od).transpose();
        if (info) info->push_back("p upper bound at PQ ordinal " + std::to_string(od));
    }
    for (const auto& row : cs.direction_rows) {
        R.row(r++) = row.transpose();
        if (info) info->push_back("direction restriction row");
    }
    return R;
}

BoundaryVerdict BoundaryProblem::check_alarm(double epsilon,
                                             const ConstraintSet& cs,
                                             double tol) const {
    BoundaryVerdict verdict;
    for (int d : dropped_)
        verdict.binding_info.push_back("dropped degenerate h-row (isolated bus), ordinal " +
                                       std::to_string(d));

    const Eigen::MatrixXd R = cone_rows(cs, &verdict.binding_info);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(R.rows());
    rhs.head(kept_.size()).setConstant(epsilon);

    Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * J_.n);
    for (int d : kept_) c += J_.h_row(d);

    const FeasibilityResult res = lp_feasibility(R, rhs, c, 1.0, tol);
    if (res.feasible) {
        verdict.on_boundary = false;
        verdict.direction = res.y;
    } else {
        verdict.on_boundary = true;
        verdict.certificate = res.cert;
    }
    return verdict;
}

BoundaryVerdict BoundaryProblem::check_on_boundary(const ConstraintSet& cs,
                                                   double tol) const {
    return check_alarm(0.0, cs, tol);
}

MarginResult BoundaryProblem::margin(const ConstraintSet& cs) const {
    const Eigen::MatrixXd R = cone_rows(cs, nullptr);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * J_.n);
    for (int d : kept_) c += J_.h_row(d);

    const Eigen::VectorXd proj = project_onto_cone(R, c);
    MarginResult out;
    out.m = proj.norm();
    out.direction = out.m > 0.0 ? Eigen::VectorXd(proj / out.m)
                                : Eigen::VectorXd(Eigen::VectorXd::Zero(proj.size()));
    return out;
}

ConstraintSet detect_q_limits(const Network& net, const VoltageState& v,
                              double tol) {
    ConstraintSet cs;
    const Injections inj = injections(net, v);
    for (int i = 0; i < net.bus_count(); ++i) {
        if (!net.q_limits[i]) continue;
        // generator reactive output at the solved state
        const double qg = net.q_load[i] - inj.q[i];
        if (qg >= net.q_limits[i]->qmax - tol) {
            // production capped: net consumption sits at its lower bound
            cs.binding_q_buses.emplace_back(i, LimitSense::AtMin);
        } else if (qg <= net.q_limits[i]->qmin + tol) {
            cs.binding_q_buses.emplace_back(i, LimitSense::AtMax);
        }
    }
    return cs;
}

}  // namespace loadkit
