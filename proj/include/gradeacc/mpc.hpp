#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gradeacc/grade_map.hpp"
#include "gradeacc/safe_set.hpp"
#include "gradeacc/vehicle.hpp"

namespace gradeacc {

struct MPCConfig {
    int horizon_steps = 25;  // N
    double dt_s = 0.2;
    double q_tracking = 10.0;
    double r_effort = 1.0;
    double r_jerk = 10.0;
    double p_terminal = 100.0;
    double v_min_mps = 0.0;
    double v_max_mps = 30.0;
    double u_min_n = -3000.0;
    double u_max_n = 3000.0;
    double v_ref_mps = 20.0;
    int sqp_max_iters = 20;
    double sqp_tol_n = 0.5;  // convergence tolerance on input-sequence change

    void validate() const;
};

/// Future lead samples at the controller dt, as delivered over V2V:
/// n_steps + 1 positions and velocities starting at the current instant.
struct LeadPrediction {
    std::vector<double> position_m;
    std::vector<double> velocity_mps;
};

/// One controller step's inputs: previews assembled, constraints selected.
struct MPCProblem {
    VehicleState x0;
    std::vector<double> grade_preview;  // N+1 values
    std::optional<LeadPrediction> lead;
    std::optional<SafeSetBoundary> boundary;
    MPCConfig cfg;
    VehicleParams vehicle;
};

enum class SolveStatus { optimal, max_iters, infeasible_fallback };

std::string to_string(SolveStatus status);

struct MPCSolution {
    std::vector<double> inputs_n;           // N inputs, Newtons
    std::vector<VehicleState> predicted;    // N+1 states, nonlinear rollout
    SolveStatus status = SolveStatus::infeasible_fallback;
    int iterations = 0;
    double objective = 0.0;                 // cost of the final trajectory
    std::vector<double> merit_history;      // per-SQP-iteration merit values
    double slack_m = 0.0;                   // safety slack in the final QP
};

/// Assembles the horizon problem. The safety constraint rows exist exactly
/// when a lead prediction is given; lead and boundary must be both present
/// or both absent.
MPCProblem build_problem(const VehicleState& x, const GradeProfile& profile,
                         const std::optional<LeadPrediction>& lead,
                         const std::optional<SafeSetBoundary>& boundary, const MPCConfig& cfg,
                         const VehicleParams& vehicle);

/// Successive-linearization solve: linearize dynamics and the safe-distance
/// boundary about the current trajectory, solve the convex QP, re-simulate,
/// repeat until the input change drops below sqp_tol. u_prev anchors the
/// first jerk term. An infeasible QP or positive safety slack yields
/// infeasible_fallback.
MPCSolution solve(const MPCProblem& prob, const std::vector<double>* warm_start = nullptr,
                  double u_prev_n = 0.0);

/// Stateful receding-horizon controller: keeps the warm start and the last
/// applied input between steps. One instance per vehicle, single-threaded.
class Controller {
  public:
    Controller(MPCConfig cfg, VehicleParams model_params);

    struct StepResult {
        double u_applied_n = 0.0;
        MPCSolution solution;
    };

    /// Solves and returns the first input; on infeasible_fallback returns
    /// u_min (maximum braking), which the safe-set construction guarantees
    /// keeps the gap admissible.
    StepResult step(const VehicleState& x, const GradeProfile& model_profile,
                    const std::optional<LeadPrediction>& lead,
                    const std::optional<SafeSetBoundary>& boundary);

    double last_applied_n() const { return u_prev_; }
    const MPCConfig& config() const { return cfg_; }
    void reset();

  private:
    MPCConfig cfg_;
    VehicleParams params_;
    std::vector<double> warm_;
    double u_prev_ = 0.0;
};

}  // namespace gradeacc
