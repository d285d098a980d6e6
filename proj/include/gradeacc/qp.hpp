#pragma once

#include <Eigen/Core>

namespace gradeacc {

/// Result of a dense convex QP solve.
struct QPResult {
    enum class Status { optimal, infeasible, iteration_limit };

    Eigen::VectorXd x;
    Status status = Status::iteration_limit;
    int iterations = 0;
    double objective = 0.0;
};

/// Minimizes 0.5*x'Gx + g0'x subject to CI'x + ci0 >= 0 with the dual
/// active-set method of Goldfarb and Idnani. G must be positive definite;
/// CI holds one constraint normal per column. Small dense problems only
/// (tens of variables): every step refactorizes instead of updating.
QPResult solve_qp(const Eigen::MatrixXd& G, const Eigen::VectorXd& g0,
                  const Eigen::MatrixXd& CI, const Eigen::VectorXd& ci0);

}  // namespace gradeacc
