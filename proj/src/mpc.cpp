#include "gradeacc/mpc.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gradeacc/qp.hpp"

namespace gradeacc {

namespace {

constexpr double kSlackPenaltyPerMeter = 1.0e6;
constexpr double kSlackRidge = 1.0e-3;
constexpr double kInputRidge = 1.0e-10;
constexpr double kSlackTriggerM = 1.0e-6;

struct RolloutView {
    std::vector<VehicleState> states;  // N+1
};

RolloutView rollout(const MPCProblem& prob, const std::vector<double>& u_kn) {
    const int n = prob.cfg.horizon_steps;
    RolloutView out;
    out.states.resize(static_cast<std::size_t>(n) + 1);
    out.states[0] = prob.x0;
    for (int k = 0; k < n; ++k) {
        out.states[static_cast<std::size_t>(k) + 1] =
            step_euler(out.states[static_cast<std::size_t>(k)], 1000.0 * u_kn[static_cast<std::size_t>(k)],
                       prob.grade_preview[static_cast<std::size_t>(k)], prob.cfg.dt_s, prob.vehicle);
    }
    return out;
}

double true_objective(const MPCProblem& prob, const std::vector<double>& u_kn,
                      const RolloutView& traj, double u_prev_kn) {
    const MPCConfig& c = prob.cfg;
    const int n = c.horizon_steps;
    double j = 0.0;
    for (int k = 0; k < n; ++k) {
        const double dv = traj.states[static_cast<std::size_t>(k)].velocity_mps - c.v_ref_mps;
        j += c.q_tracking * dv * dv;
    }
    const double dvn = traj.states[static_cast<std::size_t>(n)].velocity_mps - c.v_ref_mps;
    j += c.p_terminal * dvn * dvn;
    for (int k = 0; k < n; ++k) {
        const double w = u_kn[static_cast<std::size_t>(k)];
        j += c.r_effort * w * w;
        const double dw = w - (k == 0 ? u_prev_kn : u_kn[static_cast<std::size_t>(k) - 1]);
        j += c.r_jerk * dw * dw;
    }
    return j;
}

double constraint_violation(const MPCProblem& prob, const RolloutView& traj) {
    const MPCConfig& c = prob.cfg;
    const int n = c.horizon_steps;
    double viol = 0.0;
    for (int k = 1; k <= n; ++k) {
        const double v = traj.states[static_cast<std::size_t>(k)].velocity_mps;
        viol = std::max(viol, c.v_min_mps - v);
        viol = std::max(viol, v - c.v_max_mps);
    }
    if (prob.lead) {
        for (int k = 0; k <= n; ++k) {
            const auto& x = traj.states[static_cast<std::size_t>(k)];
            const double gap = prob.lead->position_m[static_cast<std::size_t>(k)] - x.position_m;
            viol = std::max(viol, prob.boundary->d_safe(x.velocity_mps) - gap);
        }
    }
    return viol;
}

double merit(const MPCProblem& prob, const std::vector<double>& u_kn, const RolloutView& traj,
             double u_prev_kn) {
    return true_objective(prob, u_kn, traj, u_prev_kn) +
           kSlackPenaltyPerMeter * std::max(0.0, constraint_violation(prob, traj));
}

}  // namespace

void MPCConfig::validate() const {
    if (horizon_steps < 2) {
        throw std::invalid_argument("mpc: horizon must have at least 2 steps");
    }
    if (dt_s <= 0.0) {
        throw std::invalid_argument("mpc: dt must be positive");
    }
    if (q_tracking < 0.0 || r_effort < 0.0 || r_jerk < 0.0 || p_terminal < 0.0) {
        throw std::invalid_argument("mpc: weights must be nonnegative");
    }
    if (!(v_min_mps < v_max_mps) || !(u_min_n < u_max_n)) {
        throw std::invalid_argument("mpc: bounds must satisfy min < max");
    }
    if (sqp_max_iters < 1 || sqp_tol_n <= 0.0) {
        throw std::invalid_argument("mpc: bad SQP settings");
    }
}

std::string to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::optimal:
            return "optimal";
        case SolveStatus::max_iters:
            return "max-iters";
        case SolveStatus::infeasible_fallback:
            return "infeasible-fallback";
    }
    return "unknown";
}

MPCProblem build_problem(const VehicleState& x, const GradeProfile& profile,
                         const std::optional<LeadPrediction>& lead,
                         const std::optional<SafeSetBoundary>& boundary, const MPCConfig& cfg,
                         const VehicleParams& vehicle) {
    cfg.validate();
    if (lead.has_value() != boundary.has_value()) {
        throw std::invalid_argument(
            "build_problem: lead prediction and safe-set boundary must be both present or both "
            "absent");
    }
    MPCProblem prob;
    prob.x0 = x;
    prob.grade_preview = profile.preview(x.position_m, x.velocity_mps, cfg.horizon_steps, cfg.dt_s);
    if (lead) {
        const std::size_t want = static_cast<std::size_t>(cfg.horizon_steps) + 1;
        if (lead->position_m.size() != want || lead->velocity_mps.size() != want) {
            throw std::invalid_argument("build_problem: lead prediction length mismatch");
        }
        prob.lead = lead;
        prob.boundary = boundary;
    }
    prob.cfg = cfg;
    prob.vehicle = vehicle;
    return prob;
}

MPCSolution solve(const MPCProblem& prob, const std::vector<double>* warm_start,
                  double u_prev_n) {
    const MPCConfig& cfg = prob.cfg;
    const int n = cfg.horizon_steps;
    const std::size_t nu = static_cast<std::size_t>(n);
    if (prob.grade_preview.size() != nu + 1) {
        throw std::invalid_argument("solve: grade preview length mismatch");
    }

    const double u_min_kn = cfg.u_min_n / 1000.0;
    const double u_max_kn = cfg.u_max_n / 1000.0;
    const double u_prev_kn = u_prev_n / 1000.0;

    std::vector<double> u(nu, 0.0);
    if (warm_start && warm_start->size() == nu) {
        for (std::size_t k = 0; k < nu; ++k) {
            u[k] = std::clamp((*warm_start)[k] / 1000.0, u_min_kn, u_max_kn);
        }
    }

    MPCSolution sol;
    sol.status = SolveStatus::max_iters;

    RolloutView traj = rollout(prob, u);
    double current_merit = merit(prob, u, traj, u_prev_kn);
    sol.merit_history.push_back(current_merit);

    double slack = 0.0;
    const Eigen::Index nz = static_cast<Eigen::Index>(nu) + 1;  // inputs in kN plus slack

    int iter = 0;
    for (iter = 1; iter <= cfg.sqp_max_iters; ++iter) {
        // Affine prediction maps built on the linearization along the nominal
        // trajectory: s_k = so(k) + S.row(k)*w, v_k = vo(k) + V.row(k)*w.
        Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n + 1, n);
        Eigen::MatrixXd V = Eigen::MatrixXd::Zero(n + 1, n);
        Eigen::VectorXd so = Eigen::VectorXd::Zero(n + 1);
        Eigen::VectorXd vo = Eigen::VectorXd::Zero(n + 1);
        so(0) = prob.x0.position_m;
        vo(0) = prob.x0.velocity_mps;
        for (int k = 0; k < n; ++k) {
            const auto& xk = traj.states[static_cast<std::size_t>(k)];
            const Linearization lin =
                linearize(xk, 1000.0 * u[static_cast<std::size_t>(k)],
                          prob.grade_preview[static_cast<std::size_t>(k)], cfg.dt_s, prob.vehicle);
            S.row(k + 1) = lin.A(0, 0) * S.row(k) + lin.A(0, 1) * V.row(k);
            V.row(k + 1) = lin.A(1, 0) * S.row(k) + lin.A(1, 1) * V.row(k);
            S(k + 1, k) += lin.B(0) * 1000.0;
            V(k + 1, k) += lin.B(1) * 1000.0;
            so(k + 1) = lin.A(0, 0) * so(k) + lin.A(0, 1) * vo(k) + lin.c(0);
            vo(k + 1) = lin.A(1, 0) * so(k) + lin.A(1, 1) * vo(k) + lin.c(1);
        }

        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nz, nz);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(nz);

        auto add_quadratic = [&](const Eigen::VectorXd& a, double offset, double weight) {
            if (weight <= 0.0) {
                return;
            }
            H += 2.0 * weight * a * a.transpose();
            g += 2.0 * weight * offset * a;
        };

        for (int k = 1; k < n; ++k) {
            Eigen::VectorXd a = Eigen::VectorXd::Zero(nz);
            a.head(n) = V.row(k).transpose();
            add_quadratic(a, vo(k) - cfg.v_ref_mps, cfg.q_tracking);
        }
        {
            Eigen::VectorXd a = Eigen::VectorXd::Zero(nz);
            a.head(n) = V.row(n).transpose();
            add_quadratic(a, vo(n) - cfg.v_ref_mps, cfg.p_terminal);
        }
        for (int k = 0; k < n; ++k) {
            H(k, k) += 2.0 * (cfg.r_effort + kInputRidge);
        }
        {
            // Jerk: first step anchored at the previously applied input.
            Eigen::VectorXd a = Eigen::VectorXd::Zero(nz);
            a(0) = 1.0;
            add_quadratic(a, -u_prev_kn, cfg.r_jerk);
        }
        for (int k = 1; k < n; ++k) {
            Eigen::VectorXd a = Eigen::VectorXd::Zero(nz);
            a(k) = 1.0;
            a(k - 1) = -1.0;
            add_quadratic(a, 0.0, cfg.r_jerk);
        }
        g(nz - 1) += kSlackPenaltyPerMeter;
        H(nz - 1, nz - 1) += 2.0 * kSlackRidge;

        const int n_safety = prob.lead ? (n + 1) : 0;
        const Eigen::Index m = 2 * static_cast<Eigen::Index>(nu) + 1 + 2 * n + n_safety;
        Eigen::MatrixXd CI = Eigen::MatrixXd::Zero(nz, m);
        Eigen::VectorXd ci0 = Eigen::VectorXd::Zero(m);
        Eigen::Index col = 0;
        for (int k = 0; k < n; ++k) {  // input box
            CI(k, col) = 1.0;
            ci0(col) = -u_min_kn;
            ++col;
            CI(k, col) = -1.0;
            ci0(col) = u_max_kn;
            ++col;
        }
        CI(nz - 1, col) = 1.0;  // slack >= 0
        ci0(col) = 0.0;
        ++col;
        for (int k = 1; k <= n; ++k) {  // velocity bounds
            CI.col(col).head(n) = V.row(k).transpose();
            ci0(col) = vo(k) - cfg.v_min_mps;
            ++col;
            CI.col(col).head(n) = -V.row(k).transpose();
            ci0(col) = cfg.v_max_mps - vo(k);
            ++col;
        }
        if (prob.lead) {
            for (int k = 0; k <= n; ++k) {
                const double v_nom = traj.states[static_cast<std::size_t>(k)].velocity_mps;
                const double d_nom = prob.boundary->d_safe(v_nom);
                const double slope = prob.boundary->d_safe_slope(v_nom);
                CI.col(col).head(n) = (-S.row(k) - slope * V.row(k)).transpose();
                CI(nz - 1, col) = 1.0;
                ci0(col) = prob.lead->position_m[static_cast<std::size_t>(k)] - so(k) - d_nom -
                           slope * (vo(k) - v_nom);
                ++col;
            }
        }

        const QPResult qp = solve_qp(H, g, CI, ci0);
        if (qp.status != QPResult::Status::optimal) {
            sol.status = SolveStatus::infeasible_fallback;
            break;
        }

        std::vector<double> candidate(nu);
        double best_merit = current_merit;
        std::vector<double> best_u = u;
        RolloutView best_traj = traj;
        bool accepted = false;
        for (double alpha : {1.0, 0.5, 0.25, 0.125, 0.0625}) {
            for (std::size_t k = 0; k < nu; ++k) {
                candidate[k] = u[k] + alpha * (qp.x(static_cast<Eigen::Index>(k)) - u[k]);
            }
            RolloutView cand_traj = rollout(prob, candidate);
            const double cand_merit = merit(prob, candidate, cand_traj, u_prev_kn);
            if (cand_merit <= current_merit + 1.0e-9 * (1.0 + std::abs(current_merit))) {
                best_merit = cand_merit;
                best_u = candidate;
                best_traj = std::move(cand_traj);
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // No descent available: the linearization is already tight here.
            sol.status = SolveStatus::optimal;
            break;
        }

        double delta_n = 0.0;
        for (std::size_t k = 0; k < nu; ++k) {
            delta_n = std::max(delta_n, 1000.0 * std::abs(best_u[k] - u[k]));
        }
        u = std::move(best_u);
        traj = std::move(best_traj);
        current_merit = best_merit;
        sol.merit_history.push_back(current_merit);
        slack = qp.x(nz - 1);

        if (delta_n < cfg.sqp_tol_n) {
            sol.status = SolveStatus::optimal;
            break;
        }
    }

    if (sol.status != SolveStatus::infeasible_fallback && slack > kSlackTriggerM) {
        sol.status = SolveStatus::infeasible_fallback;
    }

    sol.inputs_n.resize(nu);
    for (std::size_t k = 0; k < nu; ++k) {
        sol.inputs_n[k] = 1000.0 * u[k];
    }
    sol.predicted = traj.states;
    sol.iterations = std::min(iter, cfg.sqp_max_iters);
    sol.objective = true_objective(prob, u, traj, u_prev_kn);
    sol.slack_m = slack;
    return sol;
}

Controller::Controller(MPCConfig cfg, VehicleParams model_params)
    : cfg_(std::move(cfg)), params_(std::move(model_params)) {
    cfg_.validate();
    params_.validate();
}

void Controller::reset() {
    warm_.clear();
    u_prev_ = 0.0;
}

Controller::StepResult Controller::step(const VehicleState& x, const GradeProfile& model_profile,
                                        const std::optional<LeadPrediction>& lead,
                                        const std::optional<SafeSetBoundary>& boundary) {
    const MPCProblem prob = build_problem(x, model_profile, lead, boundary, cfg_, params_);
    const std::vector<double>* warm = warm_.size() == static_cast<std::size_t>(cfg_.horizon_steps)
                                          ? &warm_
                                          : nullptr;
    StepResult result;
    result.solution = solve(prob, warm, u_prev_);

    if (result.solution.status == SolveStatus::infeasible_fallback) {
        result.u_applied_n = cfg_.u_min_n;  // maximum braking keeps the gap admissible
        warm_.assign(static_cast<std::size_t>(cfg_.horizon_steps), cfg_.u_min_n);
    } else {
        result.u_applied_n = result.solution.inputs_n.front();
        // Shift the optimal sequence one step for the next warm start.
        warm_.assign(result.solution.inputs_n.begin() + 1, result.solution.inputs_n.end());
        warm_.push_back(result.solution.inputs_n.back());
    }
    u_prev_ = result.u_applied_n;
    return result;
}

}  // namespace gradeacc
