#pragma once

#include <Eigen/Core>

namespace gradeacc {

/// Longitudinal point-mass model parameters for one vehicle.
struct VehicleParams {
    double mass_kg = 2278.0;
    double frontal_area_m2 = 2.63;
    double air_density_kgpm3 = 1.206;
    double drag_coeff = 0.2791;
    double rolling_coeff = 0.0089;
    double gravity_mps2 = 9.81;
    double brake_force_max_n = 3000.0;    // magnitude, > 0
    double traction_force_max_n = 3000.0; // > 0

    /// Throws std::invalid_argument on non-physical values.
    void validate() const;
};

struct VehicleState {
    double position_m = 0.0;
    double velocity_mps = 0.0;
};

/// Aerodynamic drag 0.5*rho*Cd*Af*v^2. Throws std::domain_error for v < 0.
double aero_drag(double velocity_mps, const VehicleParams& p);

/// Rolling resistance m*g*Cr*cos(theta) while moving, zero at standstill.
double rolling_resistance(double theta_rad, double velocity_mps, const VehicleParams& p);

/// Grade force m*g*sin(theta); positive uphill (resists forward motion).
double gravity_force(double theta_rad, const VehicleParams& p);

/// One forward-Euler step of the longitudinal dynamics.
/// u_newton is the signed net force (traction positive, braking negative).
/// Velocity is clamped at zero: the model never reverses.
VehicleState step_euler(const VehicleState& x, double u_newton, double theta_rad,
                        double dt_s, const VehicleParams& p);

/// Affine model x' = A x + B u + c of step_euler about a nominal point.
/// Exact at the nominal point; Jacobians are taken on the moving branch
/// (the v >= 0 clamp is not differentiated).
struct Linearization {
    Eigen::Matrix2d A;
    Eigen::Vector2d B;
    Eigen::Vector2d c;

    VehicleState predict(const VehicleState& x, double u_newton) const;
};

Linearization linearize(const VehicleState& x, double u_newton, double theta_rad,
                        double dt_s, const VehicleParams& p);

}  // namespace gradeacc
