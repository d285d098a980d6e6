#include "gradeacc/vehicle.hpp"

#include <cmath>
#include <stdexcept>

namespace gradeacc {

void VehicleParams::validate() const {
    auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
    if (!positive(mass_kg) || !positive(frontal_area_m2) || !positive(air_density_kgpm3) ||
        !positive(gravity_mps2) || !positive(brake_force_max_n) ||
        !positive(traction_force_max_n)) {
        throw std::invalid_argument("vehicle parameters must be strictly positive");
    }
    if (drag_coeff < 0.0 || rolling_coeff < 0.0) {
        throw std::invalid_argument("drag and rolling coefficients must be >= 0");
    }
}

double aero_drag(double velocity_mps, const VehicleParams& p) {
    if (velocity_mps < 0.0) {
        throw std::domain_error("aero_drag: velocity must be nonnegative");
    }
    return 0.5 * p.air_density_kgpm3 * p.drag_coeff * p.frontal_area_m2 * velocity_mps *
           velocity_mps;
}

double rolling_resistance(double theta_rad, double velocity_mps, const VehicleParams& p) {
    if (velocity_mps <= 0.0) {
        return 0.0;  // standstill: no rolling resistance torque to react
    }
    return p.mass_kg * p.gravity_mps2 * p.rolling_coeff * std::cos(theta_rad);
}

double gravity_force(double theta_rad, const VehicleParams& p) {
    return p.mass_kg * p.gravity_mps2 * std::sin(theta_rad);
}

VehicleState step_euler(const VehicleState& x, double u_newton, double theta_rad,
                        double dt_s, const VehicleParams& p) {
    if (dt_s <= 0.0) {
        throw std::invalid_argument("step_euler: dt must be positive");
    }
    const double total_force = u_newton - aero_drag(x.velocity_mps, p) -
                               rolling_resistance(theta_rad, x.velocity_mps, p) -
                               gravity_force(theta_rad, p);
    VehicleState next;
    next.position_m = x.position_m + x.velocity_mps * dt_s;
    next.velocity_mps = std::max(0.0, x.velocity_mps + dt_s / p.mass_kg * total_force);
    return next;
}

VehicleState Linearization::predict(const VehicleState& x, double u_newton) const {
    const Eigen::Vector2d xv(x.position_m, x.velocity_mps);
    const Eigen::Vector2d next = A * xv + B * u_newton + c;
    return VehicleState{next(0), next(1)};
}

Linearization linearize(const VehicleState& x, double u_newton, double theta_rad,
                        double dt_s, const VehicleParams& p) {
    Linearization lin;
    const double drag_slope =
        p.air_density_kgpm3 * p.drag_coeff * p.frontal_area_m2 * x.velocity_mps;
    lin.A << 1.0, dt_s,  //
        0.0, 1.0 - dt_s / p.mass_kg * drag_slope;
    lin.B << 0.0, dt_s / p.mass_kg;

    const VehicleState next = step_euler(x, u_newton, theta_rad, dt_s, p);
    const Eigen::Vector2d xv(x.position_m, x.velocity_mps);
    lin.c = Eigen::Vector2d(next.position_m, next.velocity_mps) - lin.A * xv - lin.B * u_newton;
    return lin;
}

}  // namespace gradeacc
