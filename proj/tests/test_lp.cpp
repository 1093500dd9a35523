#include <doctest.h>

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "loadkit/lp.hpp"

using namespace loadkit;

namespace {

// Validates whichever answer lp_feasibility returns: a feasible point must
// satisfy the system, an infeasibility certificate must prove it empty.
void check_certified(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                     const Eigen::VectorXd& a, double beta) {
    const FeasibilityResult res = lp_feasibility(A, b, a, beta);
    if (res.feasible) {
        CHECK(((A * res.y - b).minCoeff() > -1e-7));
        CHECK(a.dot(res.y) == doctest::Approx(beta).epsilon(1e-7));
    } else {
        const FarkasCertificate& c = res.cert;
        REQUIRE(c.lambda.size() == A.rows());
        CHECK(c.lambda.minCoeff() >= -1e-9);
        const Eigen::VectorXd combo = A.transpose() * c.lambda + c.mu * a;
        CHECK(combo.lpNorm<Eigen::Infinity>() < 1e-7);
        CHECK(c.violation > 1e-10);
        CHECK(c.violation ==
              doctest::Approx(c.lambda.dot(b) + c.mu * beta).epsilon(1e-9));
    }
}

// Exhaustive active-set solver for min ||x' - c|| over {R x >= 0}, valid for
// small row counts: tries every subset of rows forced to equality.
Eigen::VectorXd brute_force_cone_projection(const Eigen::MatrixXd& R,
                                            const Eigen::VectorXd& c) {
    const int m = static_cast<int>(R.rows());
    const int n = static_cast<int>(R.cols());
    Eigen::VectorXd best = Eigen::VectorXd::Zero(n);
    double best_d2 = c.squaredNorm();  // projection onto {0}-active fallback
    bool found = false;
    for (int mask = 0; mask < (1 << m); ++mask) {
        std::vector<int> act;
        for (int i = 0; i < m; ++i)
            if (mask & (1 << i)) act.push_back(i);
        Eigen::VectorXd x;
        if (act.empty()) {
            x = c;
        } else {
            Eigen::MatrixXd Ra(act.size(), n);
            for (size_t i = 0; i < act.size(); ++i) Ra.row(i) = R.row(act[i]);
            // projection onto the nullspace of the active rows
            const Eigen::MatrixXd P =
                Eigen::MatrixXd::Identity(n, n) -
                Ra.transpose() *
                    (Ra * Ra.transpose())
                        .completeOrthogonalDecomposition()
                        .pseudoInverse() *
                    Ra;
            x = P * c;
        }
        if ((R * x).minCoeff() < -1e-9) continue;
        const double d2 = (x - c).squaredNorm();
        if (!found || d2 < best_d2 - 1e-14) {
            best = x;
            best_d2 = d2;
            found = true;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("simple feasible system returns a satisfying point") {
    Eigen::MatrixXd A(2, 2);
    A << 1, 0, 0, 1;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd a(2);
    a << 1, 1;
    const FeasibilityResult res = lp_feasibility(A, b, a, 1.0);
    REQUIRE(res.feasible);
    CHECK(res.y.minCoeff() >= -1e-9);
    CHECK(a.dot(res.y) == doctest::Approx(1.0));
}

TEST_CASE("opposed half-spaces with a positive equality are infeasible") {
    // y.h2 >= 0, y.h3 >= 0 with h3 = -h2 forces y.h2 = 0, but the equality
    // needs y.(h2+h3) = 1 with h2+h3 = 0 — the Farkas pair (1,1) proves it.
    Eigen::MatrixXd A(2, 2);
    A << -0.5, 0.5, 0.5, -0.5;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(2);  // h2 + h3
    const FeasibilityResult res = lp_feasibility(A, b, a, 1.0);
    REQUIRE(!res.feasible);
    check_certified(A, b, a, 1.0);
}

TEST_CASE("scaled systems keep their feasibility verdict") {
    Eigen::MatrixXd A(2, 2);
    A << 0.25, 0.25, 0.25, 0.25;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd a(2);
    a << 0.5, 0.5;
    CHECK(lp_feasibility(A, b, a, 1.0).feasible);
    CHECK(lp_feasibility(10 * A, b, 10 * a, 1.0).feasible);
    CHECK(lp_feasibility(0.01 * A, b, 0.01 * a, 1.0).feasible);
}

TEST_CASE("random systems are always certified") {
    std::mt19937 rng(101);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_int_distribution<int> mdist(1, 6), ndist(1, 4);
    for (int trial = 0; trial < 300; ++trial) {
        const int m = mdist(rng), n = ndist(rng);
        Eigen::MatrixXd A(m, n);
        Eigen::VectorXd b(m), a(n);
        for (int i = 0; i < m; ++i) {
            b(i) = g(rng) * 0.1;
            for (int j = 0; j < n; ++j) A(i, j) = g(rng);
        }
        for (int j = 0; j < n; ++j) a(j) = g(rng);
        check_certified(A, b, a, g(rng));
    }
}

TEST_CASE("degenerate duplicated rows do not break certification") {
    Eigen::MatrixXd A(4, 2);
    A << 1, 1, 1, 1, -1, -1, -1, -1;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(4);
    Eigen::VectorXd a(2);
    a << 1, 0;
    check_certified(A, b, a, 1.0);
}

TEST_CASE("nnls satisfies the KKT conditions") {
    std::mt19937 rng(77);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_int_distribution<int> mdist(1, 6), ndist(1, 5);
    for (int trial = 0; trial < 300; ++trial) {
        const int m = mdist(rng), n = ndist(rng);
        Eigen::MatrixXd E(m, n);
        Eigen::VectorXd f(m);
        for (int i = 0; i < m; ++i) {
            f(i) = g(rng);
            for (int j = 0; j < n; ++j) E(i, j) = g(rng);
        }
        const Eigen::VectorXd x = nnls(E, f);
        REQUIRE(x.size() == n);
        CHECK(x.minCoeff() >= -1e-12);
        const Eigen::VectorXd grad = E.transpose() * (E * x - f);
        for (int j = 0; j < n; ++j) {
            CHECK(grad(j) >= -1e-7);                    // stationarity on the bound
            CHECK(std::abs(x(j) * grad(j)) < 1e-7);     // complementary slackness
        }
    }
}

TEST_CASE("cone projection matches exhaustive active-set search") {
    std::mt19937 rng(55);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_int_distribution<int> mdist(1, 5), ndist(2, 3);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = mdist(rng), n = ndist(rng);
        Eigen::MatrixXd R(m, n);
        Eigen::VectorXd c(n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) R(i, j) = g(rng);
        for (int j = 0; j < n; ++j) c(j) = g(rng);
        const Eigen::VectorXd p = project_onto_cone(R, c);
        const Eigen::VectorXd q = brute_force_cone_projection(R, c);
        CHECK((p - c).norm() == doctest::Approx((q - c).norm()).epsilon(1e-6));
        // membership and the Pythagorean split of the projection
        CHECK((R * p).minCoeff() > -1e-8);
        CHECK(p.squaredNorm() + (c - p).squaredNorm() ==
              doctest::Approx(c.squaredNorm()).epsilon(1e-8));
        CHECK(std::abs(p.dot(c - p)) < 1e-8);
    }
}

TEST_CASE("projection of an interior point is the identity") {
    Eigen::MatrixXd R(2, 2);
    R << 1, 0, 0, 1;
    Eigen::VectorXd c(2);
    c << 2.0, 3.0;
    CHECK((project_onto_cone(R, c) - c).norm() < 1e-12);
    c << -1.0, -1.0;  // polar direction projects to the origin
    CHECK(project_onto_cone(R, c).norm() < 1e-12);
}
