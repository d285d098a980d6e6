#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gradeacc/batch.hpp"
#include "gradeacc/grade_map.hpp"
#include "gradeacc/mpc.hpp"
#include "gradeacc/safe_set.hpp"
#include "gradeacc/vehicle.hpp"

namespace gradeacc {

/// Scripted lead-vehicle motion. Velocity-scripted kinds play back a
/// velocity law kinematically; an optional brake time switches the lead to
/// dynamic maximum braking on its road (grade-dependent) until standstill.
struct LeadScript {
    enum class Kind { absent, constant, sine, replay };

    Kind kind = Kind::absent;
    double base_velocity_mps = 0.0;
    double amplitude_mps = 0.0;  // sine only
    double period_s = 30.0;      // sine only
    double phase_rad = 0.0;      // sine only
    std::vector<double> replay_time_s;      // replay only, ascending
    std::vector<double> replay_velocity_mps;
    std::optional<double> brake_time_s;  // full braking from this time on

    double scripted_velocity(double t_s) const;
};

/// Intersection geometry: each vehicle approaches the center along its own
/// road axis; communication starts once both are within the radius.
struct IntersectionSpec {
    GradeProfile lead_profile = GradeProfile::flat();
    double ego_center_m = 0.0;   // intersection center on the ego axis
    double lead_center_m = 0.0;  // intersection center on the lead axis
    double comm_radius_m = 0.0;
};

struct ScenarioConfig {
    GradeProfile profile = GradeProfile::flat();  // ego road (true grades)
    LeadScript lead;
    VehicleState ego_initial{0.0, 0.0};
    VehicleState lead_initial{0.0, 0.0};
    VehicleParams ego_params;
    VehicleParams lead_params;
    MPCConfig mpc;
    SafeSetParams safe_set;
    double duration_s = 60.0;
    std::uint64_t seed = 0;
    double lead_velocity_noise_mps = 0.0;  // uniform amplitude on predictions
    double plant_mass_scale = 1.0;         // plant-vs-model mismatch knob
    bool baseline_no_grade = false;        // run the controller with theta == 0
    std::optional<IntersectionSpec> intersection;

    void validate() const;
};

struct ScenarioRecord {
    double t_s = 0.0;
    double s_ego_m = 0.0;
    double v_ego_mps = 0.0;
    double s_lead_m = 0.0;    // virtual lead on the ego axis when intersecting
    double v_lead_mps = 0.0;
    double u_n = 0.0;
    double gap_m = 0.0;
    double d_safe_m = 0.0;
    double theta_rad = 0.0;  // true grade at the ego position
    SolveStatus status = SolveStatus::optimal;
    bool has_lead = false;   // false rows leave lead columns empty in the CSV

    bool operator==(const ScenarioRecord&) const = default;
};

struct ScenarioLog {
    std::vector<ScenarioRecord> records;
    double dt_s = 0.0;
    bool safety_violation = false;  // gap <= l_min occurred; run was aborted
    double violation_time_s = -1.0;

    bool operator==(const ScenarioLog&) const = default;
};

/// Closed-loop car following: the lead plays its script, the boundary is
/// recomputed per step from the current lead snapshot, the ego runs the MPC
/// and is integrated with the true grade at its position. A gap at or below
/// l_min records a safety violation and aborts the run.
ScenarioLog simulate_car_following(const ScenarioConfig& cfg);

/// Virtual-lead projection for intersection crossing. Returns the offset of
/// the virtual lead ahead of the ego (may be negative on conflict) and its
/// velocity, as a VehicleState relative to the ego position.
VehicleState project_lead_for_intersection(double ego_dist_to_center_m,
                                           double lead_dist_to_center_m, double lead_v_mps);

/// Intersection crossing: pure CC until both vehicles are inside the
/// communication radius, then the ego follows the projected virtual lead.
/// Each vehicle sees its own road's grades.
ScenarioLog simulate_intersection(const ScenarioConfig& cfg);

/// CC/ACC switching demonstration; requires v_ref above the lead's mean
/// speed. Delegates to simulate_car_following.
ScenarioLog simulate_switching(const ScenarioConfig& cfg);

/// Dispatch on cfg.intersection.
ScenarioLog simulate(const ScenarioConfig& cfg);

/// Independent scenario runs, optionally across OpenMP threads. Results are
/// identical to the serial order either way.
std::vector<ScenarioLog> run_batch(const std::vector<ScenarioConfig>& configs,
                                   batch::Exec mode = batch::Exec::parallel);

/// ScenarioLog CSV: header
/// `t_s,s_ego_m,v_ego_mps,s_lead_m,v_lead_mps,u_N,gap_m,d_safe_m,theta_rad,status`.
void write_scenario_log_csv(const ScenarioLog& log, const std::string& path);
ScenarioLog read_scenario_log_csv(const std::string& path);

/// Lead replay CSV with header `time_s,velocity_mps`.
LeadScript load_lead_replay_csv(const std::string& path);

}  // namespace gradeacc
