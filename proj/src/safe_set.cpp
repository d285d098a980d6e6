#include "gradeacc/safe_set.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gradeacc {

void SafeSetParams::validate() const {
    if (v_max_mps <= 0.0 || dt_int_s <= 0.0 || l_min_m < 0.0 || max_steps < 1) {
        throw std::invalid_argument("safe-set parameters out of range");
    }
}

LeadStopResult lead_stop_trajectory(const VehicleState& lead, const GradeProfile& profile,
                                    const VehicleParams& p_lead, double dt_int_s,
                                    int max_steps) {
    if (dt_int_s <= 0.0) {
        throw std::invalid_argument("lead_stop_trajectory: dt_int must be positive");
    }
    if (lead.velocity_mps < 0.0) {
        throw std::invalid_argument("lead_stop_trajectory: lead velocity must be >= 0");
    }
    LeadStopResult result;
    result.trajectory.push_back(lead);

    VehicleState x = lead;
    int k = 0;
    while (x.velocity_mps > 0.0) {
        if (k >= max_steps) {
            throw std::runtime_error(
                "lead_stop_trajectory: maximum braking cannot stop the vehicle within the step "
                "limit (road too steep downhill for the configured brakes)");
        }
        const double theta = profile.grade_at(x.position_m);
        x = step_euler(x, -p_lead.brake_force_max_n, theta, dt_int_s, p_lead);
        result.trajectory.push_back(x);
        ++k;
    }
    result.stop_position_m = x.position_m;
    result.stop_time_s = k * dt_int_s;
    return result;
}

std::vector<BackwardPoint> ego_backward_trajectory(double s_stop_m, const GradeProfile& profile,
                                                   const VehicleParams& p_ego, double v_max_mps,
                                                   double dt_int_s, double l_min_m,
                                                   int max_steps) {
    if (dt_int_s <= 0.0 || v_max_mps <= 0.0 || l_min_m < 0.0) {
        throw std::invalid_argument("ego_backward_trajectory: bad arguments");
    }
    std::vector<BackwardPoint> points;
    points.push_back({0.0, s_stop_m - l_min_m});

    // Backward-in-time recursion under maximum braking: evaluated at the
    // current (later-time) point, so velocity grows as we step back.
    double v = 0.0;
    double s = s_stop_m - l_min_m;
    int k = 0;
    while (v < v_max_mps) {
        if (k >= max_steps) {
            throw std::runtime_error(
                "ego_backward_trajectory: velocity does not reach v_max within the step limit");
        }
        const double theta = profile.grade_at(s);
        const double total_force = -p_ego.brake_force_max_n - aero_drag(v, p_ego) -
                                   rolling_resistance(theta, v, p_ego) -
                                   gravity_force(theta, p_ego);
        const double v_prev = v - dt_int_s / p_ego.mass_kg * total_force;
        const double s_prev = s - dt_int_s * v;
        if (v_prev <= v) {
            throw std::runtime_error(
                "ego_backward_trajectory: braking deceleration is not positive (downhill grade "
                "exceeds brake capability)");
        }
        v = v_prev;
        s = s_prev;
        points.push_back({v, s});
        ++k;
    }
    return points;
}

namespace {

SafeSetBoundary fit_boundary(std::vector<BoundaryPoint> points, const VehicleState& lead_snapshot,
                             const SafeSetParams& params) {
    SafeSetBoundary b;
    b.v_max_mps = params.v_max_mps;
    b.lead_position_m = lead_snapshot.position_m;
    b.lead_velocity_mps = lead_snapshot.velocity_mps;
    b.l_min_m = params.l_min_m;
    b.points = std::move(points);

    const std::size_t n = b.points.size();
    if (n < 3) {
        // Not enough data to fit: constant boundary covering whatever the
        // integration produced, floored at l_min.
        double d_max = params.l_min_m;
        for (const auto& pt : b.points) {
            d_max = std::max(d_max, pt.d_min_m);
        }
        b.coeffs = {d_max, 0.0, 0.0};
        b.degenerate = true;
        b.fit_residual_m = 0.0;
        return b;
    }

    Eigen::MatrixXd vander(static_cast<Eigen::Index>(n), 3);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double v = b.points[i].v_e_mps;
        vander(static_cast<Eigen::Index>(i), 0) = 1.0;
        vander(static_cast<Eigen::Index>(i), 1) = v;
        vander(static_cast<Eigen::Index>(i), 2) = v * v;
        rhs(static_cast<Eigen::Index>(i)) = b.points[i].d_min_m;
    }
    Eigen::Vector3d c = vander.colPivHouseholderQr().solve(rhs);

    // Shift the fit up so the polynomial majorizes every data point: the
    // stored boundary must never promise a smaller gap than the integration
    // said is needed.
    double max_under = 0.0;
    for (const auto& pt : b.points) {
        const double fit = c(0) + c(1) * pt.v_e_mps + c(2) * pt.v_e_mps * pt.v_e_mps;
        max_under = std::max(max_under, pt.d_min_m - fit);
    }
    c(0) += max_under;

    double residual = 0.0;
    for (const auto& pt : b.points) {
        const double fit = c(0) + c(1) * pt.v_e_mps + c(2) * pt.v_e_mps * pt.v_e_mps;
        residual = std::max(residual, std::abs(fit - pt.d_min_m));
    }
    if (!std::isfinite(residual)) {
        throw std::runtime_error("safe-set fit produced a non-finite residual");
    }

    b.coeffs = {c(0), c(1), c(2)};
    b.fit_residual_m = residual;
    return b;
}

}  // namespace

double SafeSetBoundary::d_safe(double v_e_mps) const {
    if (v_e_mps < 0.0) {
        throw std::domain_error("d_safe: ego velocity must be >= 0");
    }
    const double poly = coeffs[0] + coeffs[1] * v_e_mps + coeffs[2] * v_e_mps * v_e_mps;
    if (v_e_mps > v_max_mps) {
        const double slope = coeffs[1] + 2.0 * coeffs[2] * v_e_mps;
        if (slope < 0.0) {
            throw std::domain_error(
                "d_safe: quadratic extrapolation beyond the validity range is decreasing; "
                "recompute the boundary with a larger v_max");
        }
    }
    return std::max(l_min_m, poly);
}

double SafeSetBoundary::d_safe_slope(double v_e_mps) const {
    const double poly = coeffs[0] + coeffs[1] * v_e_mps + coeffs[2] * v_e_mps * v_e_mps;
    if (poly < l_min_m) {
        return 0.0;  // on the floor
    }
    return coeffs[1] + 2.0 * coeffs[2] * v_e_mps;
}

SafeSetBoundary compute_boundary(const VehicleState& lead, const GradeProfile& profile,
                                 const VehicleParams& p_lead, const VehicleParams& p_ego,
                                 const SafeSetParams& params) {
    return compute_boundary_two_roads(lead, profile, lead.position_m, profile, p_lead, p_ego,
                                      params);
}

SafeSetBoundary compute_boundary_two_roads(const VehicleState& lead,
                                           const GradeProfile& lead_profile,
                                           double lead_position_ego_axis_m,
                                           const GradeProfile& ego_profile,
                                           const VehicleParams& p_lead,
                                           const VehicleParams& p_ego,
                                           const SafeSetParams& params) {
    params.validate();
    const LeadStopResult stop =
        lead_stop_trajectory(lead, lead_profile, p_lead, params.dt_int_s, params.max_steps);
    const double lead_travel = stop.stop_position_m - lead.position_m;
    const double stop_ego_axis = lead_position_ego_axis_m + lead_travel;

    const auto back =
        ego_backward_trajectory(stop_ego_axis, ego_profile, p_ego, params.v_max_mps,
                                params.dt_int_s, params.l_min_m, params.max_steps);

    std::vector<BoundaryPoint> points;
    points.reserve(back.size());
    for (const auto& bp : back) {
        points.push_back({bp.v_mps, lead_position_ego_axis_m - bp.s_m});
    }
    VehicleState snapshot{lead_position_ego_axis_m, lead.velocity_mps};
    return fit_boundary(std::move(points), snapshot, params);
}

SafeSetBoundary conservative_boundary(double theta_min_rad, double theta_max_rad,
                                      double v_lead_mps, const VehicleParams& p_lead,
                                      const VehicleParams& p_ego, const SafeSetParams& params) {
    if (theta_min_rad > theta_max_rad) {
        throw std::invalid_argument("conservative_boundary: theta_min must be <= theta_max");
    }
    // Worst case within the bounds: the lead stops as fast as possible
    // (steepest uphill), the ego needs the longest distance (steepest
    // downhill).
    const double span = 1.0e7;
    const GradeProfile lead_road({-span, span}, {theta_max_rad, theta_max_rad});
    const GradeProfile ego_road({-span, span}, {theta_min_rad, theta_min_rad});
    const VehicleState lead{0.0, v_lead_mps};
    return compute_boundary_two_roads(lead, lead_road, 0.0, ego_road, p_lead, p_ego, params);
}

double safe_time_gap(const SafeSetBoundary& boundary, const GradeProfile& profile,
                     const VehicleParams& p_lead, const VehicleParams& p_ego, double v_mps,
                     const SafeSetParams& params) {
    if (v_mps <= 0.0) {
        throw std::domain_error("safe_time_gap: undefined at v = 0");
    }
    const VehicleState lead{boundary.lead_position_m, v_mps};
    const SafeSetBoundary matched = compute_boundary(lead, profile, p_lead, p_ego, params);
    return matched.d_safe(v_mps) / v_mps;
}

std::vector<SafeSetBoundary> boundary_family(const std::vector<double>& lead_velocities_mps,
                                             double lead_position_m, const GradeProfile& profile,
                                             const VehicleParams& p_lead,
                                             const VehicleParams& p_ego,
                                             const SafeSetParams& params, batch::Exec mode) {
    std::vector<SafeSetBoundary> out(lead_velocities_mps.size());
    batch::for_each_index(lead_velocities_mps.size(), mode, [&](std::size_t i) {
        const VehicleState lead{lead_position_m, lead_velocities_mps[i]};
        out[i] = compute_boundary(lead, profile, p_lead, p_ego, params);
    });
    return out;
}

bool BoundaryCache::hit(const VehicleState& lead, double lead_pos_ego_axis) const {
    return cached_.has_value() && std::abs(lead.position_m - cached_lead_s_) <= tol_ &&
           std::abs(lead.velocity_mps - cached_lead_v_) <= tol_ &&
           std::abs(lead_pos_ego_axis - cached_lead_s_ego_axis_) <= tol_;
}

const SafeSetBoundary& BoundaryCache::get(const VehicleState& lead, const GradeProfile& profile,
                                          const VehicleParams& p_lead,
                                          const VehicleParams& p_ego,
                                          const SafeSetParams& params) {
    return get_two_roads(lead, profile, lead.position_m, profile, p_lead, p_ego, params);
}

const SafeSetBoundary& BoundaryCache::get_two_roads(
    const VehicleState& lead, const GradeProfile& lead_profile, double lead_position_ego_axis_m,
    const GradeProfile& ego_profile, const VehicleParams& p_lead, const VehicleParams& p_ego,
    const SafeSetParams& params) {
    if (!hit(lead, lead_position_ego_axis_m)) {
        cached_ = compute_boundary_two_roads(lead, lead_profile, lead_position_ego_axis_m,
                                             ego_profile, p_lead, p_ego, params);
        cached_lead_s_ = lead.position_m;
        cached_lead_v_ = lead.velocity_mps;
        cached_lead_s_ego_axis_ = lead_position_ego_axis_m;
    }
    return *cached_;
}

}  // namespace gradeacc
