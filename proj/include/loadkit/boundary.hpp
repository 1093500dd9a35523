#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "loadkit/lp.hpp"
#include "loadkit/powerflow.hpp"

namespace loadkit {

enum class LimitSense { AtMin, AtMax };

// Direction restrictions layered onto the feasibility system and the
// margin cone. Rows come from first-order readings of binding operational
// limits at the operating point.
struct ConstraintSet {
    // reactive limits: (PQ-or-slack internal bus index, which bound is binding)
    std::vector<std::pair<int, LimitSense>> binding_q_buses;
    // buses whose active power sits at an upper bound (direction y.h_d <= 0)
    std::vector<int> p_upper_buses;  // PQ ordinals
    // generic half-space rows r with y.r >= 0 (voltage / current limits)
    std::vector<Eigen::VectorXd> direction_rows;

    bool empty() const {
        return binding_q_buses.empty() && p_upper_buses.empty() &&
               direction_rows.empty();
    }
};

struct BoundaryVerdict {
    bool on_boundary = false;
    std::optional<Eigen::VectorXd> direction;  // feasible improving y
    std::optional<FarkasCertificate> certificate;
    std::vector<std::string> binding_info;
};

struct MarginResult {
    double m = 0.0;
    Eigen::VectorXd direction;  // unit vector in the feasible cone (zero if m=0)
};

// Assembles the q-gradient rows needed by a ConstraintSet; the network and
// state are required because g-rows of the slack bus are not part of J.
class BoundaryProblem {
public:
    BoundaryProblem(const Network& net, const VoltageState& v);
    explicit BoundaryProblem(const JacobianMatrix& J);  // no slack g-rows

    // feasibility system of the loadability test, with optional epsilon
    BoundaryVerdict check_on_boundary(const ConstraintSet& cs = {},
                                      double tol = 1e-9) const;
    BoundaryVerdict check_alarm(double epsilon, const ConstraintSet& cs = {},
                                double tol = 1e-9) const;

    // loadability margin via projection onto the feasible cone
    MarginResult margin(const ConstraintSet& cs = {}) const;

    const JacobianMatrix& jacobian_matrix() const { return J_; }
    const std::vector<int>& dropped_rows() const { return dropped_; }

    Eigen::VectorXd q_row_for(int bus) const;  // internal bus index

private:
    Eigen::MatrixXd h_rows() const;       // kept p-block rows
    Eigen::MatrixXd cone_rows(const ConstraintSet& cs,
                              std::vector<std::string>* info) const;

    JacobianMatrix J_;
    const Network* net_ = nullptr;
    const VoltageState* state_ = nullptr;
    std::vector<int> kept_;     // PQ ordinals with non-degenerate h_d
    std::vector<int> dropped_;  // electrically isolated rows
};

// Detects binding reactive limits by comparing solved reactive production
// against the network's per-bus limits (generation-positive convention).
ConstraintSet detect_q_limits(const Network& net, const VoltageState& v,
                              double tol = 1e-9);

}  // namespace loadkit
