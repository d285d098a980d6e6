#include "gradeacc/qp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace gradeacc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kViolationTol = 1.0e-9;
constexpr double kZeroStepTol = 1.0e-11;
}  // namespace

QPResult solve_qp(const Eigen::MatrixXd& G, const Eigen::VectorXd& g0,
                  const Eigen::MatrixXd& CI, const Eigen::VectorXd& ci0) {
    const Eigen::Index n = G.rows();
    const Eigen::Index m = CI.cols();
    if (G.cols() != n || g0.size() != n || (m > 0 && CI.rows() != n) || ci0.size() != m) {
        throw std::invalid_argument("solve_qp: inconsistent dimensions");
    }

    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) {
        throw std::invalid_argument("solve_qp: G must be positive definite");
    }

    QPResult result;
    result.x = llt.solve(-g0);

    std::vector<Eigen::Index> active;   // indices of active constraints
    Eigen::VectorXd multipliers(m);     // u_k for active constraints, indexed by position
    multipliers.setZero();

    const int max_iters = 50 * static_cast<int>(m + n) + 100;
    int iter = 0;

    while (true) {
        // Most violated inactive constraint.
        Eigen::Index p = -1;
        double worst = -kViolationTol;
        for (Eigen::Index i = 0; i < m; ++i) {
            bool is_active = false;
            for (Eigen::Index a : active) {
                if (a == i) {
                    is_active = true;
                    break;
                }
            }
            if (is_active) {
                continue;
            }
            const double s = CI.col(i).dot(result.x) + ci0(i);
            if (s < worst) {
                worst = s;
                p = i;
            }
        }
        if (p < 0) {
            result.status = QPResult::Status::optimal;
            break;
        }

        double u_p = 0.0;  // multiplier of the entering constraint
        while (true) {
            if (++iter > max_iters) {
                result.status = QPResult::Status::iteration_limit;
                result.iterations = iter;
                result.objective = 0.5 * result.x.dot(G * result.x) + g0.dot(result.x);
                return result;
            }

            const Eigen::VectorXd n_p = CI.col(p);
            const Eigen::VectorXd gi_np = llt.solve(n_p);

            const Eigen::Index q = static_cast<Eigen::Index>(active.size());
            Eigen::VectorXd r(q);
            Eigen::VectorXd z;
            if (q > 0) {
                Eigen::MatrixXd N(n, q);
                for (Eigen::Index j = 0; j < q; ++j) {
                    N.col(j) = CI.col(active[static_cast<std::size_t>(j)]);
                }
                const Eigen::MatrixXd gi_N = llt.solve(N);
                const Eigen::MatrixXd M = N.transpose() * gi_N;
                r = M.ldlt().solve(N.transpose() * gi_np);
                z = gi_np - gi_N * r;
            } else {
                z = gi_np;
            }

            // Dual blocking step over active constraints with r_k > 0.
            double t1 = kInf;
            Eigen::Index blocking = -1;
            for (Eigen::Index j = 0; j < q; ++j) {
                if (r(j) > kZeroStepTol) {
                    const double t = multipliers(j) / r(j);
                    if (t < t1) {
                        t1 = t;
                        blocking = j;
                    }
                }
            }

            // Full primal step that makes constraint p feasible.
            const double ztn = z.dot(n_p);
            const double s_p = n_p.dot(result.x) + ci0(p);
            double t2 = kInf;
            if (z.lpNorm<Eigen::Infinity>() > kZeroStepTol * (1.0 + result.x.norm()) &&
                ztn > 0.0) {
                t2 = -s_p / ztn;
            }

            const double t = std::min(t1, t2);
            if (t >= kInf) {
                result.status = QPResult::Status::infeasible;
                result.iterations = iter;
                result.objective = 0.5 * result.x.dot(G * result.x) + g0.dot(result.x);
                return result;
            }

            if (t2 >= kInf) {
                // Pure dual step: drop the blocking constraint, stay on p.
                for (Eigen::Index j = 0; j < q; ++j) {
                    multipliers(j) -= t * r(j);
                }
                u_p += t;
                active.erase(active.begin() + blocking);
                for (Eigen::Index j = blocking; j + 1 < q; ++j) {
                    multipliers(j) = multipliers(j + 1);
                }
                continue;
            }

            // Primal (and dual) step.
            result.x += t * z;
            for (Eigen::Index j = 0; j < q; ++j) {
                multipliers(j) -= t * r(j);
            }
            u_p += t;

            if (t == t2) {
                active.push_back(p);
                multipliers(static_cast<Eigen::Index>(active.size()) - 1) = u_p;
                break;  // pick the next violated constraint
            }

            // Partial step: drop the blocking constraint and iterate on p.
            active.erase(active.begin() + blocking);
            for (Eigen::Index j = blocking; j + 1 < q; ++j) {
                multipliers(j) = multipliers(j + 1);
            }
        }
    }

    result.iterations = iter;
    result.objective = 0.5 * result.x.dot(G * result.x) + g0.dot(result.x);
    return result;
}

}  // namespace gradeacc
