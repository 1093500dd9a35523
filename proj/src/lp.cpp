#include "loadkit/lp.hpp"

#include <cmath>
#include <vector>

#include "loadkit/errors.hpp"

namespace loadkit {

namespace {

// Dense phase-1 simplex over standard form min 1^T(artificials),
// A x = b, x >= 0, with Bland's rule. Columns: the caller's structural
// columns followed by one artificial per row.
class PhaseOneSimplex {
public:
    PhaseOneSimplex(Eigen::MatrixXd A, Eigen::VectorXd b) {
        m_ = static_cast<int>(A.rows());
        ns_ = static_cast<int>(A.cols());
        // flip rows so b >= 0
        flip_.assign(m_, 1.0);
        for (int i = 0; i < m_; ++i) {
            if (b(i) < 0.0) {
                A.row(i) = -A.row(i);
                b(i) = -b(i);
                flip_[i] = -1.0;
            }
        }
        T_.resize(m_, ns_ + m_ + 1);
        T_.leftCols(ns_) = A;
        T_.middleCols(ns_, m_) = Eigen::MatrixXd::Identity(m_, m_);
        T_.col(ns_ + m_) = b;
        basis_.resize(m_);
        for (int i = 0; i < m_; ++i) basis_[i] = ns_ + i;
        // reduced costs: c_j - sum over rows of artificial-cost rows
        rc_ = Eigen::VectorXd::Zero(ns_ + m_);
        for (int j = 0; j < ns_ + m_; ++j) {
            double s = 0.0;
            for (int i = 0; i < m_; ++i) s += T_(i, j);
            rc_(j) = (j >= ns_ ? 1.0 : 0.0) - s;
        }
        obj_ = -b.sum();  // negated objective value
    }

    // returns phase-1 optimum (>= 0); ~0 means the system is feasible
    double solve(double tol) {
        const long max_pivots = 2000L + 40L * static_cast<long>(m_ + ns_) *
                                           static_cast<long>(m_ + 1);
        // Dantzig's rule for speed, switching permanently to Bland's rule
        // once the objective stalls (degeneracy or creeping sub-tolerance
        // steps), which restores the anti-cycling guarantee. The switch is
        // sticky: alternating rules can itself fail to terminate.
        int stalled = 0;
        bool bland = false;
        double last_obj = obj_;
        const double progress = 1e-9 * std::max(1.0, std::abs(obj_));
        for (long it = 0; it < max_pivots; ++it) {
            if (obj_ > last_obj + progress) {  // obj_ holds the negated objective
                stalled = 0;
                last_obj = obj_;
            } else if (++stalled >= 50) {
                bland = true;
            }
            // choose an entering column with an admissible pivot row; a
            // phase-1 objective is bounded, so a column without one is a
            // numerical artifact and is skipped rather than fatal
            int enter = -1, leave = -1;
            std::vector<char> skipped(ns_ + m_, 0);
            while (true) {
                enter = -1;
                if (!bland) {
                    double best_rc = -tol;
                    for (int j = 0; j < ns_ + m_; ++j) {
                        if (!skipped[j] && rc_(j) < best_rc) {
                            best_rc = rc_(j);  // Dantzig: most negative
                            enter = j;
                        }
                    }
                } else {
                    for (int j = 0; j < ns_ + m_; ++j) {
                        if (!skipped[j] && rc_(j) < -tol) {
                            enter = j;  // Bland: first improving column
                            break;
                        }
                    }
                }
                if (enter < 0) return -obj_;
                // lexicographic ratio test: among admissible rows with the
                // minimal ratio, keep the lexicographically smallest scaled
                // row. This breaks the pervasive degenerate ties (most
                // right-hand sides here are zero) without cycling.
                leave = -1;
                double best_ratio = 0.0;
                for (int i = 0; i < m_; ++i) {
                    const double a = T_(i, enter);
                    if (a <= tol) continue;
                    const double ratio = T_(i, ns_ + m_) / a;
                    if (leave < 0 || ratio < best_ratio - 1e-12) {
                        leave = i;
                        best_ratio = ratio;
                    } else if (ratio <= best_ratio + 1e-12 &&
                               lex_smaller(i, leave, enter)) {
                        leave = i;
                    }
                }
                if (leave >= 0) break;
                skipped[enter] = 1;
            }
            pivot(leave, enter);
        }
        throw SolverFailure("phase-1 simplex exceeded its pivot budget");
    }

    Eigen::VectorXd structural_solution() const {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(ns_);
        for (int i = 0; i < m_; ++i)
            if (basis_[i] < ns_) x(basis_[i]) = T_(i, ns_ + m_);
        return x;
    }

    // Row duals of the original (unflipped) system. Recovered from the
    // reduced costs of the artificial columns: pi_i = 1 - rc(art_i).
    Eigen::VectorXd duals() const {
        Eigen::VectorXd pi(m_);
        for (int i = 0; i < m_; ++i) pi(i) = flip_[i] * (1.0 - rc_(ns_ + i));
        return pi;
    }

private:
    // true when row a, scaled by its pivot-column entry, precedes row b
    // lexicographically (rhs first, then the tableau columns)
    bool lex_smaller(int a, int b, int enter) const {
        const double sa = 1.0 / T_(a, enter);
        const double sb = 1.0 / T_(b, enter);
        const double da = T_(a, ns_ + m_) * sa, db = T_(b, ns_ + m_) * sb;
        if (std::abs(da - db) > 1e-12) return da < db;
        for (int j = 0; j < ns_ + m_; ++j) {
            const double va = T_(a, j) * sa, vb = T_(b, j) * sb;
            if (std::abs(va - vb) > 1e-12) return va < vb;
        }
        return a < b;
    }

    void pivot(int leave, int enter) {
        const double piv = T_(leave, enter);
        T_.row(leave) /= piv;
        for (int i = 0; i < m_; ++i) {
            if (i == leave) continue;
            const double f = T_(i, enter);
            if (f != 0.0) T_.row(i) -= f * T_.row(leave);
        }
        const double frc = rc_(enter);
        if (frc != 0.0) {
            rc_ -= frc * T_.row(leave).head(ns_ + m_);
            obj_ -= frc * T_(leave, ns_ + m_);
        }
        basis_[leave] = enter;
    }

    int m_ = 0, ns_ = 0;
    Eigen::MatrixXd T_;
    Eigen::VectorXd rc_;
    double obj_ = 0.0;
    std::vector<int> basis_;
    std::vector<double> flip_;
};

}  // namespace

FeasibilityResult lp_feasibility(const Eigen::MatrixXd& rows_ge,
                                 const Eigen::VectorXd& rhs_ge,
                                 const Eigen::VectorXd& row_eq, double rhs_eq,
                                 double tol) {
    const int mg = static_cast<int>(rows_ge.rows());
    const int ny = static_cast<int>(row_eq.size());
    if (rows_ge.cols() != 0 && rows_ge.cols() != ny)
        throw SolverFailure("lp_feasibility: inconsistent dimensions");
    if (!rows_ge.allFinite() || !row_eq.allFinite() || !std::isfinite(rhs_eq))
        throw SolverFailure("lp_feasibility: non-finite coefficients");

    // variables: y = u - w (u,w >= 0), slack s_i >= 0 per ge-row
    const int m = mg + 1;
    const int ns = 2 * ny + mg;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, ns);
    Eigen::VectorXd b(m);
    for (int i = 0; i < mg; ++i) {
        A.block(i, 0, 1, ny) = rows_ge.row(i);
        A.block(i, ny, 1, ny) = -rows_ge.row(i);
        A(i, 2 * ny + i) = -1.0;
        b(i) = rhs_ge(i);
    }
    A.block(mg, 0, 1, ny) = row_eq.transpose();
    A.block(mg, ny, 1, ny) = -row_eq.transpose();
    b(mg) = rhs_eq;

    PhaseOneSimplex spx(std::move(A), std::move(b));
    const double opt = spx.solve(tol);

    FeasibilityResult res;
    if (opt <= std::max(tol, 1e-9)) {
        res.feasible = true;
        const Eigen::VectorXd x = spx.structural_solution();
        res.y = x.head(ny) - x.segment(ny, ny);
        return res;
    }
    res.feasible = false;
    const Eigen::VectorXd pi = spx.duals();
    res.cert.lambda = pi.head(mg).cwiseMax(0.0);  // clip tiny negatives
    res.cert.mu = pi(mg);
    res.cert.violation = res.cert.lambda.dot(rhs_ge) + res.cert.mu * rhs_eq;
    return res;
}

Eigen::VectorXd nnls(const Eigen::MatrixXd& E, const Eigen::VectorXd& f,
                     double tol) {
    const int n = static_cast<int>(E.cols());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<bool> passive(n, false);
    int npassive = 0;

    Eigen::VectorXd w = E.transpose() * (f - E * x);
    const double wtol = tol * std::max(1.0, f.norm()) * std::max(1.0, E.norm());

    const int max_outer = 3 * n + 30;
    for (int outer = 0; outer < max_outer; ++outer) {
        // most-violated KKT multiplier among the active set
        int best = -1;
        double best_w = wtol;
        for (int j = 0; j < n; ++j)
            if (!passive[j] && w(j) > best_w) {
                best_w = w(j);
                best = j;
            }
        if (best < 0) break;
        passive[best] = true;
        ++npassive;

        for (int inner = 0; inner < 3 * n + 30; ++inner) {
            // least squares on the passive set
            Eigen::MatrixXd Ep(E.rows(), npassive);
            std::vector<int> idx(npassive);
            int c = 0;
            for (int j = 0; j < n; ++j)
                if (passive[j]) {
                    Ep.col(c) = E.col(j);
                    idx[c++] = j;
                }
            Eigen::VectorXd z = Ep.colPivHouseholderQr().solve(f);
            bool all_pos = true;
            for (int k = 0; k < npassive; ++k)
                if (z(k) <= 0.0) all_pos = false;
            if (all_pos) {
                x.setZero();
                for (int k = 0; k < npassive; ++k) x(idx[k]) = z(k);
                break;
            }
            // step toward z until the first passive variable hits zero
            double alpha = 1.0;
            for (int k = 0; k < npassive; ++k)
                if (z(k) <= 0.0) {
                    const double a = x(idx[k]) / (x(idx[k]) - z(k));
                    alpha = std::min(alpha, a);
                }
            for (int k = 0; k < npassive; ++k)
                x(idx[k]) += alpha * (z(k) - x(idx[k]));
            for (int j = 0; j < n; ++j)
                if (passive[j] && x(j) <= tol) {
                    passive[j] = false;
                    x(j) = 0.0;
                    --npassive;
                }
            if (npassive == 0) break;
        }
        w = E.transpose() * (f - E * x);
    }
    return x;
}

Eigen::VectorXd project_onto_cone(const Eigen::MatrixXd& rows,
                                  const Eigen::VectorXd& c) {
    if (rows.rows() == 0) return c;
    // Moreau: c = proj_K(c) + proj_polar(c); the polar part is -R^T lambda
    // with lambda the NNLS minimizer of ||c + R^T lambda||.
    const Eigen::MatrixXd E = -rows.transpose();
    const Eigen::VectorXd lambda = nnls(E, c);
    return c + rows.transpose() * lambda;
}

}  // namespace loadkit
