#pragma once

#include <array>
#include <optional>
#include <vector>

#include "gradeacc/batch.hpp"
#include "gradeacc/grade_map.hpp"
#include "gradeacc/vehicle.hpp"

namespace gradeacc {

/// Knobs shared by the two-step safe-set integration.
struct SafeSetParams {
    double v_max_mps = 30.0;  // upper bound of the boundary's validity range
    double dt_int_s = 0.05;   // integration interval
    double l_min_m = 5.0;     // minimum admissible gap between mass centers
    int max_steps = 10000;    // guard against non-terminating braking integration

    void validate() const;
};

struct LeadStopResult {
    std::vector<VehicleState> trajectory;  // first entry = initial lead state
    double stop_position_m = 0.0;
    double stop_time_s = 0.0;
};

/// Step 1: forward Euler integration of the lead under maximum braking with
/// the grade evaluated at the lead's position, until it reaches standstill.
/// Throws std::runtime_error if braking cannot stop the vehicle within
/// max_steps (infeasible road/vehicle combination).
LeadStopResult lead_stop_trajectory(const VehicleState& lead, const GradeProfile& profile,
                                    const VehicleParams& p_lead, double dt_int_s,
                                    int max_steps = 10000);

struct BackwardPoint {
    double v_mps = 0.0;
    double s_m = 0.0;
};

/// Step 2: backward-in-time recursion of the ego under maximum braking,
/// starting from (v = 0, s = s_stop - l_min) and ending at the first point
/// with v >= v_max. Velocities are strictly increasing along the result.
std::vector<BackwardPoint> ego_backward_trajectory(double s_stop_m, const GradeProfile& profile,
                                                   const VehicleParams& p_ego, double v_max_mps,
                                                   double dt_int_s, double l_min_m,
                                                   int max_steps = 10000);

struct BoundaryPoint {
    double v_e_mps = 0.0;
    double d_min_m = 0.0;
};

/// Boundary of the robust control invariant set: minimum safe gap as a
/// degree-2 polynomial of ego velocity, floored at l_min. Immutable.
struct SafeSetBoundary {
    std::array<double, 3> coeffs{};  // d(v) = c0 + c1*v + c2*v^2
    double v_max_mps = 0.0;          // validity range [0, v_max]
    double lead_position_m = 0.0;    // lead snapshot used at computation
    double lead_velocity_mps = 0.0;
    double l_min_m = 0.0;
    double fit_residual_m = 0.0;  // max |data - polynomial| over the data points
    bool degenerate = false;      // constant fallback (too few data points)
    std::vector<BoundaryPoint> points;  // integration data backing the fit

    /// max(l_min, polynomial). Beyond v_max the quadratic extrapolates; a
    /// decreasing extrapolation throws instead of silently shrinking the gap.
    double d_safe(double v_e_mps) const;

    /// Derivative of d_safe in v (0 on the floor).
    double d_safe_slope(double v_e_mps) const;
};

/// Two-step boundary computation on a single road (car following): lead
/// braking forward from its snapshot, ego braking backward from the stop
/// point, least-squares degree-2 fit over the (v_e, d_min) points. The fit
/// is shifted up to majorize the data so the stored polynomial never
/// under-approximates the integrated requirement.
SafeSetBoundary compute_boundary(const VehicleState& lead, const GradeProfile& profile,
                                 const VehicleParams& p_lead, const VehicleParams& p_ego,
                                 const SafeSetParams& params);

/// Same computation with the lead on its own road (intersection projection):
/// the lead brakes on `lead_profile` from `lead`, the stop point is mapped
/// onto the ego axis via `lead_position_ego_axis_m`, and the ego integrates
/// backward on `ego_profile`.
SafeSetBoundary compute_boundary_two_roads(const VehicleState& lead,
                                           const GradeProfile& lead_profile,
                                           double lead_position_ego_axis_m,
                                           const GradeProfile& ego_profile,
                                           const VehicleParams& p_lead,
                                           const VehicleParams& p_ego,
                                           const SafeSetParams& params);

/// Worst-case baseline: lead grade fixed at theta_max (fastest lead stop),
/// ego grade fixed at theta_min (slowest ego stop).
SafeSetBoundary conservative_boundary(double theta_min_rad, double theta_max_rad,
                                      double v_lead_mps, const VehicleParams& p_lead,
                                      const VehicleParams& p_ego, const SafeSetParams& params);

/// Headway view of the boundary: d_safe(v)/v with the boundary recomputed at
/// lead velocity v (ego and lead at the same speed). Throws std::domain_error
/// at v = 0.
double safe_time_gap(const SafeSetBoundary& boundary, const GradeProfile& profile,
                     const VehicleParams& p_lead, const VehicleParams& p_ego, double v_mps,
                     const SafeSetParams& params);

/// Boundaries for a family of lead velocities (one per entry), computed
/// serially or with the OpenMP sweep. Results are identical either way.
std::vector<SafeSetBoundary> boundary_family(const std::vector<double>& lead_velocities_mps,
                                             double lead_position_m, const GradeProfile& profile,
                                             const VehicleParams& p_lead,
                                             const VehicleParams& p_ego,
                                             const SafeSetParams& params,
                                             batch::Exec mode = batch::Exec::parallel);

/// Per-step recomputation cache: reuses the last boundary while the lead
/// snapshot is unchanged within tolerance (e.g. a stopped lead).
class BoundaryCache {
  public:
    explicit BoundaryCache(double tolerance = 1.0e-6) : tol_(tolerance) {}

    const SafeSetBoundary& get(const VehicleState& lead, const GradeProfile& profile,
                               const VehicleParams& p_lead, const VehicleParams& p_ego,
                               const SafeSetParams& params);

    const SafeSetBoundary& get_two_roads(const VehicleState& lead,
                                         const GradeProfile& lead_profile,
                                         double lead_position_ego_axis_m,
                                         const GradeProfile& ego_profile,
                                         const VehicleParams& p_lead, const VehicleParams& p_ego,
                                         const SafeSetParams& params);

  private:
    bool hit(const VehicleState& lead, double lead_pos_ego_axis) const;

    double tol_;
    std::optional<SafeSetBoundary> cached_;
    double cached_lead_s_ = 0.0;
    double cached_lead_v_ = 0.0;
    double cached_lead_s_ego_axis_ = 0.0;
};

}  // namespace gradeacc
