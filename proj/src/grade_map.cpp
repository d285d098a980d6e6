#include "gradeacc/grade_map.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gradeacc/csv.hpp"

namespace gradeacc {

namespace {
constexpr double kHalfPi = 1.57079632679489661923;
}

GradeProfile::GradeProfile(std::vector<double> positions_m, std::vector<double> grades_rad)
    : positions_(std::move(positions_m)), grades_(std::move(grades_rad)) {
    if (positions_.size() != grades_.size()) {
        throw std::invalid_argument("grade profile: position/grade size mismatch");
    }
    if (positions_.size() < 2) {
        throw std::invalid_argument("grade profile needs at least 2 samples");
    }
    for (std::size_t i = 1; i < positions_.size(); ++i) {
        if (!(positions_[i] > positions_[i - 1])) {
            throw std::invalid_argument("grade profile positions must be strictly increasing");
        }
    }
    for (double th : grades_) {
        if (!(std::abs(th) < kHalfPi)) {
            throw std::invalid_argument("grade angle must satisfy |theta| < pi/2");
        }
    }
}

double GradeProfile::grade_at(double s_m) const {
    if (s_m <= positions_.front()) {
        return grades_.front();
    }
    if (s_m >= positions_.back()) {
        return grades_.back();
    }
    const auto it = std::upper_bound(positions_.begin(), positions_.end(), s_m);
    const std::size_t hi = static_cast<std::size_t>(it - positions_.begin());
    const std::size_t lo = hi - 1;
    const double t = (s_m - positions_[lo]) / (positions_[hi] - positions_[lo]);
    return grades_[lo] + t * (grades_[hi] - grades_[lo]);
}

std::vector<double> GradeProfile::preview(double s0_m, double v0_mps, int n_steps,
                                          double dt_s) const {
    if (n_steps < 1 || dt_s <= 0.0 || v0_mps < 0.0) {
        throw std::invalid_argument("preview: need n_steps >= 1, dt > 0, v0 >= 0");
    }
    std::vector<double> thetas(static_cast<std::size_t>(n_steps) + 1);
    for (int k = 0; k <= n_steps; ++k) {
        thetas[static_cast<std::size_t>(k)] = grade_at(s0_m + k * v0_mps * dt_s);
    }
    return thetas;
}

GradeProfile GradeProfile::flat(double length_m) {
    return GradeProfile({0.0, length_m}, {0.0, 0.0});
}

GradeProfile grade_from_elevation(const std::vector<double>& positions_m,
                                  const std::vector<double>& elevations_m,
                                  int smoothing_window) {
    const std::size_t n = positions_m.size();
    if (n != elevations_m.size()) {
        throw std::invalid_argument("elevation input: position/elevation size mismatch");
    }
    if (n < 3) {
        throw std::invalid_argument("elevation input needs at least 3 samples");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(positions_m[i] > positions_m[i - 1])) {
            throw std::invalid_argument("elevation positions must be strictly increasing");
        }
    }
    if (smoothing_window < 1 || smoothing_window % 2 == 0) {
        throw std::invalid_argument("smoothing window must be an odd integer >= 1");
    }
    if (static_cast<std::size_t>(smoothing_window) > n) {
        throw std::invalid_argument("smoothing window larger than sample count");
    }

    std::vector<double> theta(n);
    theta[0] = std::atan((elevations_m[1] - elevations_m[0]) / (positions_m[1] - positions_m[0]));
    theta[n - 1] = std::atan((elevations_m[n - 1] - elevations_m[n - 2]) /
                             (positions_m[n - 1] - positions_m[n - 2]));
    for (std::size_t i = 1; i + 1 < n; ++i) {
        theta[i] = std::atan((elevations_m[i + 1] - elevations_m[i - 1]) /
                             (positions_m[i + 1] - positions_m[i - 1]));
    }

    if (smoothing_window > 1) {
        const std::size_t half = static_cast<std::size_t>(smoothing_window / 2);
        std::vector<double> smoothed(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t lo = (i >= half) ? i - half : 0;
            const std::size_t hi = std::min(n - 1, i + half);
            double sum = 0.0;
            for (std::size_t j = lo; j <= hi; ++j) {
                sum += theta[j];
            }
            smoothed[i] = sum / static_cast<double>(hi - lo + 1);
        }
        theta = std::move(smoothed);
    }
    return GradeProfile(positions_m, std::move(theta));
}

GradeProfile synthetic_sine(double amplitude_rad, double wavelength_m, double length_m,
                            double spacing_m) {
    if (!(std::abs(amplitude_rad) < kHalfPi) || wavelength_m <= 0.0 || spacing_m <= 0.0 ||
        length_m <= 0.0) {
        throw std::invalid_argument("synthetic_sine: bad arguments");
    }
    std::vector<double> pos;
    std::vector<double> theta;
    const double two_pi = 2.0 * 3.14159265358979323846;
    for (double s = 0.0; s <= length_m + 0.5 * spacing_m; s += spacing_m) {
        pos.push_back(s);
        theta.push_back(amplitude_rad * std::sin(two_pi * s / wavelength_m));
    }
    return GradeProfile(std::move(pos), std::move(theta));
}

GradeProfile load_elevation_csv(const std::string& path, int smoothing_window) {
    const auto rows = csv::read_numeric_csv(path, "position_m,elevation_m");
    std::vector<double> pos;
    std::vector<double> elev;
    pos.reserve(rows.size());
    elev.reserve(rows.size());
    for (const auto& r : rows) {
        pos.push_back(r[0]);
        elev.push_back(r[1]);
    }
    return grade_from_elevation(pos, elev, smoothing_window);
}

GradeProfile load_grade_csv(const std::string& path) {
    const auto rows = csv::read_numeric_csv(path, "position_m,grade_rad");
    std::vector<double> pos;
    std::vector<double> theta;
    pos.reserve(rows.size());
    theta.reserve(rows.size());
    for (const auto& r : rows) {
        pos.push_back(r[0]);
        theta.push_back(r[1]);
    }
    return GradeProfile(std::move(pos), std::move(theta));
}

}  // namespace gradeacc
