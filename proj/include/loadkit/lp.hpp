#pragma once

#include <Eigen/Dense>

namespace loadkit {

// Farkas-type infeasibility certificate for {A y >= b_ge, a^T y = b_eq}:
//   lambda >= 0,  A^T lambda + mu a = 0,  lambda^T b_ge + mu b_eq > 0.
struct FarkasCertificate {
    Eigen::VectorXd lambda;
    double mu = 0.0;
    double violation = 0.0;  // lambda^T b_ge + mu b_eq, strictly positive
};

struct FeasibilityResult {
    bool feasible = false;
    Eigen::VectorXd y;        // set when feasible
    FarkasCertificate cert;   // set when infeasible
};

// Certified feasibility of {rows_ge * y >= rhs_ge, row_eq . y = rhs_eq}
// over free y, via a self-contained phase-1 simplex (Bland's rule).
// Throws SolverFailure if the pivot budget is exhausted.
FeasibilityResult lp_feasibility(const Eigen::MatrixXd& rows_ge,
                                 const Eigen::VectorXd& rhs_ge,
                                 const Eigen::VectorXd& row_eq, double rhs_eq,
                                 double tol = 1e-9);

// Nonnegative least squares: minimize ||E x - f||_2 subject to x >= 0
// (Lawson-Hanson active set). Used for projection onto polyhedral cones.
Eigen::VectorXd nnls(const Eigen::MatrixXd& E, const Eigen::VectorXd& f,
                     double tol = 1e-12);

// Euclidean projection of c onto the cone {y : rows * y >= 0}.
Eigen::VectorXd project_onto_cone(const Eigen::MatrixXd& rows,
                                  const Eigen::VectorXd& c);

}  // namespace loadkit
