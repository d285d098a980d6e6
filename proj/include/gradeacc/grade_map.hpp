#pragma once

#include <string>
#include <vector>

namespace gradeacc {

/// Position-indexed road grade profile. Immutable after construction;
/// lookups are pure and safe for concurrent readers.
class GradeProfile {
  public:
    /// Takes ownership of the sample arrays. Requires at least two samples,
    /// strictly increasing positions and |theta| < pi/2 everywhere.
    GradeProfile(std::vector<double> positions_m, std::vector<double> grades_rad);

    /// Grade at position s, linearly interpolated between bracketing samples
    /// and clamped to the endpoint value outside the mapped extent.
    double grade_at(double s_m) const;

    /// Grade preview over an MPC horizon: theta_k = grade_at(s0 + k*v0*dt)
    /// for k = 0..n_steps, assuming constant velocity over the horizon.
    /// Returns n_steps + 1 values.
    std::vector<double> preview(double s0_m, double v0_mps, int n_steps, double dt_s) const;

    double start_m() const { return positions_.front(); }
    double end_m() const { return positions_.back(); }
    const std::vector<double>& positions() const { return positions_; }
    const std::vector<double>& grades() const { return grades_; }

    /// theta == 0 over [0, length]; the baseline controller's road model.
    static GradeProfile flat(double length_m = 1.0e7);

  private:
    std::vector<double> positions_;
    std::vector<double> grades_;
};

/// Builds a grade profile from elevation samples: central finite difference
/// of elevation at interior points, one-sided at the ends, followed by a
/// centered moving-average smoothing of theta (window 1 = off, truncated at
/// the profile ends). Throws std::invalid_argument on unsorted positions,
/// fewer than 3 samples, or an even/oversized window.
GradeProfile grade_from_elevation(const std::vector<double>& positions_m,
                                  const std::vector<double>& elevations_m,
                                  int smoothing_window = 1);

/// theta(s) = amplitude * sin(2*pi*s / wavelength) sampled every `spacing_m`
/// meters over [0, length_m].
GradeProfile synthetic_sine(double amplitude_rad, double wavelength_m, double length_m,
                            double spacing_m);

/// Elevation CSV with header `position_m,elevation_m`.
GradeProfile load_elevation_csv(const std::string& path, int smoothing_window = 1);

/// Pre-computed grade CSV with header `position_m,grade_rad`.
GradeProfile load_grade_csv(const std::string& path);

}  // namespace gradeacc
